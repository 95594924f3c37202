import logging

import numpy as np
import pytest
from conftest import cn
from hypothesis import given, settings
from hypothesis import strategies as st

from cfrobust import oracles
from cfrobust.errors import DivergenceError, DomainError, SingularHError
from cfrobust.metrics import error_stats, mse_conditioned, mse_unconditioned, \
    mse_unconditioned_alpha
from cfrobust.model import LinkBudget, RobustnessBounds, SolverParams
from cfrobust.power import (epl, gdpa, mse_grad_d, mse_grad_d_conditioned, rgdpa,
                            wrgdpa, wrgdpa_alpha_derivatives)
from cfrobust.precoding import zf_precoder
from conftest import make_instance
from cfrobust.channel import mask_channel

LINK = LinkBudget.from_snr_db(10.0)
PARAMS = SolverParams()
BOUNDS = RobustnessBounds()


def _unit(rng, M, n):
    W = cn(rng, (M, n))
    return W / np.linalg.norm(W, axis=0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gradients_fd(seed):
    r = np.random.default_rng(seed)
    G, W = cn(r, (6, 3)), _unit(r, 6, 3)
    d = r.uniform(-1, 2, 3)
    fc = lambda x: mse_conditioned(x, W, G, None, LINK)  # noqa: E731
    fu = lambda x: mse_unconditioned(x, W, G, None, LINK)  # noqa: E731
    assert oracles.rel_err(mse_grad_d_conditioned(d, W, G, LINK),
                           oracles.finite_diff(fc, d), floor=1.0) < 1e-5
    assert oracles.rel_err(mse_grad_d(d, W, G, LINK),
                           oracles.finite_diff(fu, d), floor=1.0) < 1e-5


def test_gradient_special_points(rng):
    G, W = cn(rng, (5, 2)), _unit(rng, 5, 2)
    d = np.array([0.7, 1.3])
    assert np.all(mse_grad_d_conditioned(d, W, np.zeros_like(G), LINK) == 0)
    expected = -2 * np.sqrt(LINK.rho_f) * np.diagonal(G.T @ W).real
    assert np.allclose(mse_grad_d_conditioned(np.zeros(2), W, G, LINK), expected)
    assert np.all(mse_grad_d(np.zeros(2), W, G, LINK) == 0)
    assert np.all(mse_grad_d(d, W, G, LINK) >= 0)


def test_rgdpa_minus_gdpa_gradient_is_linear_term(rng):
    G, W = cn(rng, (6, 3)), _unit(rng, 6, 3)
    d = rng.uniform(0.1, 1.0, 3)
    diff = mse_grad_d_conditioned(d, W, G, LINK) - mse_grad_d(d, W, G, LINK)
    assert np.allclose(diff, -2 * np.sqrt(LINK.rho_f) * np.diagonal(G.T @ W).real, atol=1e-14)


def test_zero_step_keeps_direction(rng):
    G, W = cn(rng, (6, 3)), _unit(rng, 6, 3)
    d0 = np.array([0.2, 0.5, 0.9])
    res = gdpa(W, G, LINK, SolverParams(step_d=0.0), d0=d0)
    assert np.allclose(res.d / np.linalg.norm(res.d), d0 / np.linalg.norm(d0))
    assert np.sum(res.d ** 2) == pytest.approx(LINK.power_budget)


@pytest.mark.parametrize("alloc", ["gdpa", "rgdpa"])
def test_trace_nonincreasing(alloc, rng):
    G, W = cn(rng, (8, 4)), _unit(rng, 8, 4)
    stats = None
    fn = gdpa if alloc == "gdpa" else rgdpa
    res = fn(W, G, LINK, PARAMS) if alloc == "gdpa" else fn(W, G, stats, LINK, PARAMS)
    assert np.all(np.diff(res.objective_trace) <= 1e-12)
    assert np.linalg.norm(W * res.d) ** 2 == pytest.approx(LINK.power_budget, rel=1e-9)


def test_gdpa_vs_grid_under_scaling(rng):
    # with W diag(d) on the budget sphere the unconditioned MSE only depends
    # on the direction of d; the descent's direction must be near-optimal
    G, W = cn(rng, (6, 2)), _unit(rng, 6, 2)
    params = SolverParams(iters_d=2000)
    res = gdpa(W, G, LINK, params)
    f = lambda t: mse_unconditioned(np.sqrt(LINK.power_budget) * np.array([np.cos(t), np.sin(t)]),  # noqa: E731
                                    W, G, None, LINK)
    _, fmin = oracles.grid_extrema(f, 0.0, np.pi / 2, 10_001)
    assert mse_unconditioned(res.d, W, G, None, LINK) <= fmin * 1.01


def test_rgdpa_closed_form_diagonal(rng):
    # orthogonal estimate columns with W matched to them diagonalizes C
    Q, _ = np.linalg.qr(cn(rng, (6, 3)))
    G = Q * np.array([0.5, 1.0, 2.0])
    W = Q.conj() * np.exp(1j * np.array([0.3, -0.7, 1.1]))
    E = G.T @ W
    C = np.real(np.diag(W.conj().T @ G.conj() @ G.T @ W))
    assert np.max(np.abs(E - np.diag(np.diag(E)))) < 1e-12
    res = rgdpa(W, G, None, LINK, SolverParams(iters_d=500), d0=np.ones(3))
    expected = np.diagonal(E).real / (np.sqrt(LINK.rho_f) * C)
    assert np.max(np.abs(res.d_unscaled - expected)) < 1e-4


def test_rgdpa_grid_fixed_point(rng):
    G, W = cn(rng, (5, 2)), _unit(rng, 5, 2)
    res = rgdpa(W, G, None, LINK, SolverParams(iters_d=2000))
    d = res.d_unscaled
    f = lambda x: mse_conditioned(x, W, G, None, LINK)  # noqa: E731
    grid = np.linspace(-2, 2, 201)
    vals = np.array([[f(np.array([a, b])) for b in grid] for a in grid])
    assert f(d) <= vals.min() + 1e-9
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    assert np.max(np.abs(d - [grid[i], grid[j]])) <= grid[1] - grid[0]


def test_fixed_step_divergence(rng):
    G, W = cn(rng, (6, 3)), _unit(rng, 6, 3)
    params = SolverParams(step_d=5.0, backtracking=False)
    with pytest.raises(DivergenceError):
        rgdpa(W, G, None, LINK, params)


def test_negative_coefficients_flagged(rng, caplog):
    G = cn(rng, (6, 2))
    W = -G.conj() / np.linalg.norm(G, axis=0)  # Re(G^T W)_jj < 0
    with caplog.at_level(logging.WARNING, logger="cfrobust"):
        res = rgdpa(W, G, None, LINK, SolverParams(iters_d=200))
    assert not res.nonnegative and np.all(res.d < 0)
    assert "negative" in caplog.text


def test_epl(rng):
    W = _unit(rng, 5, 4)
    res = epl(W, LinkBudget(power_budget=2.0))
    assert np.allclose(res.d, np.sqrt(0.5))


def _zf_instance(seed, M=8, n=3):
    r = np.random.default_rng(seed)
    V, Ve = cn(r, (M, n)), cn(r, (M, n))
    pre = zf_precoder(V)
    return V, Ve, pre.W, pre.d


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.6))
def test_alpha_derivatives_fd(seed, alpha):
    V, Ve, W, d = _zf_instance(seed % 10_000)
    E = lambda a: mse_unconditioned_alpha(d, W, V, Ve, a, LINK)  # noqa: E731
    dE, d2E, ws = wrgdpa_alpha_derivatives(V, Ve, alpha, d, W, LINK)
    assert oracles.rel_err(dE, oracles.finite_diff(E, alpha, 1e-6), floor=1.0) < 1e-4
    assert oracles.rel_err(d2E, oracles.second_diff(E, alpha, 1e-4), floor=1.0) < 1e-3
    assert ws.alpha == alpha


def test_alpha_derivatives_no_error_channel():
    V, _, W, d = _zf_instance(1)
    dE, _, _ = wrgdpa_alpha_derivatives(V, np.zeros_like(V), 0.2, d, W, LINK)
    T1 = np.sum(np.abs(V.T @ W * d) ** 2)
    assert dE == pytest.approx(-LINK.rho_f * T1, rel=1e-12)


def test_alpha_derivatives_guards():
    V, Ve, W, d = _zf_instance(2)
    with pytest.raises(DomainError):
        wrgdpa_alpha_derivatives(V, Ve, 0.0, d, W, LINK)
    Vs = V.copy()
    Vs[:, 1] = Vs[:, 0]
    with pytest.raises(SingularHError):
        wrgdpa_alpha_derivatives(Vs, np.zeros_like(Vs), 0.2, d, W, LINK)


def _curvature_at(V, Ve, W, d, alpha):
    _, d2E, _ = wrgdpa_alpha_derivatives(V, Ve, alpha, d, W, LINK)
    return d2E


def _find(kind, count=3):
    found = []
    for s in range(500):
        V, Ve, W, d = _zf_instance(s, M=6, n=4)
        c = _curvature_at(V, Ve, W, d, BOUNDS.midpoint)
        if (c > 0) == (kind == "convex") and c != 0:
            found.append((V, Ve, W, d))
            if len(found) == count:
                return found
    pytest.skip(f"no {kind} instance found")


def test_wrgdpa_convex_takes_endpoint():
    for V, Ve, W, d in _find("convex"):
        res = wrgdpa(V, Ve, W, LINK, BOUNDS, PARAMS, d0=d)
        assert res.alpha_worst in (BOUNDS.alpha_lo, BOUNDS.alpha_hi)
        E = lambda a: mse_unconditioned_alpha(d, W, V, Ve, a, LINK)  # noqa: E731
        assert E(res.alpha_worst) == max(E(BOUNDS.alpha_lo), E(BOUNDS.alpha_hi))


def test_wrgdpa_concave_matches_grid():
    for V, Ve, W, d in _find("concave"):
        res = wrgdpa(V, Ve, W, LINK, BOUNDS, PARAMS, d0=d)
        E = lambda a: mse_unconditioned_alpha(d, W, V, Ve, a, LINK)  # noqa: E731
        amax, _ = oracles.grid_search_alpha(E, BOUNDS.alpha_lo, BOUNDS.alpha_hi, 2001)
        assert abs(res.alpha_worst - amax) < 1e-3


def test_wrgdpa_budget_identity(ref_net):
    lsf, chan, mask = make_instance(ref_net, 0, 0.15)
    uc = mask_channel(chan, mask, [0, 3, 5, 9])
    pre = zf_precoder(uc.G_hat)
    res = wrgdpa(uc.V, uc.V_err, pre.W, LINK, BOUNDS, PARAMS, d0=pre.d, alpha0=0.15)
    if res.scaled:
        assert abs(np.linalg.norm(pre.W * res.d) ** 2 - LINK.power_budget) < 1e-9
    assert BOUNDS.alpha_lo <= res.alpha_worst <= BOUNDS.alpha_hi


def test_rgdpa_with_error_stats_constant_shift(ref_net):
    lsf, chan, mask = make_instance(ref_net, 1, 0.15)
    S = [1, 2, 4]
    uc = mask_channel(chan, mask, S)
    pre = zf_precoder(uc.G_hat)
    stats = error_stats(lsf, mask, S, 0.15)
    a = rgdpa(pre.W, uc.G_hat, stats, LINK, PARAMS, d0=pre.d)
    b = rgdpa(pre.W, uc.G_hat, None, LINK, PARAMS, d0=pre.d)
    # the error term is frozen, so it shifts the objective but not the iterate
    assert np.allclose(a.d, b.d)
    shift = np.array(a.objective_trace) - np.array(b.objective_trace)
    assert np.allclose(shift, shift[0])
