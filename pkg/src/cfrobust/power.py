"""Gradient-descent power allocation: GDPA, RGDPA and the worst-case WRGDPA.

All three optimize the power vector ``d`` of ``P = W diag(d)`` with ``W``
fixed. The step size is normalized by the curvature of the MSE quadratic at
the starting estimate, ``lambda = step_d / (2 rho max_j C_jj)`` with
``C = W^H G_hat^* G_hat^T W``, so ``step_d < 1`` is stable for any channel
scale.

WRGDPA first locates the worst imperfection level for the unconditioned MSE
written as a function of alpha (see :func:`mse_unconditioned_alpha`), whose
error term uses the alpha-dependent ZF precoder of
``G(alpha) = sqrt(1 - alpha) V + sqrt(alpha) V_err``. The derivatives of that
precoder follow from differentiating ``H P = Q`` with ``H = G^H G`` and
``Q = G^H`` twice:

    P'  = H^{-1} (Q'  - H' P)
    P'' = H^{-1} (Q'' - H'' P - 2 H' P')
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DivergenceError, DomainError, SingularHError
from .metrics import (ErrorStats, _check_alpha, gram_diag, mse_conditioned,
                      mse_unconditioned, mse_unconditioned_alpha)
from .model import LinkBudget, RobustnessBounds, SolverParams
from .precoding import COND_LIMIT, power_scale

__all__ = [
    "PowerResult",
    "WrgdpaWorkspace",
    "mse_grad_d_conditioned",
    "mse_grad_d",
    "gdpa",
    "rgdpa",
    "wrgdpa",
    "wrgdpa_alpha_derivatives",
    "epl",
]

log = logging.getLogger(__name__)

_MAX_HALVINGS = 20
_EDGE_EPS = 1e-6
# relative slack when checking that a fixed-step update did not increase the MSE
_DIVERGENCE_SLACK = 1e-12


@dataclass
class PowerResult:
    """Output of a power allocator.

    ``d`` is the final (budget-scaled) vector; ``d_unscaled`` the raw
    descent iterate. ``objective_trace`` holds the MSE at the start and
    after every descent step.
    """

    d: np.ndarray
    alpha_worst: float
    objective_trace: list[float] = field(default_factory=list)
    scaled: bool = False
    d_unscaled: np.ndarray | None = None
    nonnegative: bool = True
    alpha_trace: list[float] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class WrgdpaWorkspace:
    H: np.ndarray
    Q: np.ndarray
    H_d1: np.ndarray
    H_d2: np.ndarray
    Q_d1: np.ndarray
    Q_d2: np.ndarray
    P_a: np.ndarray
    P_ad1: np.ndarray
    P_ad2: np.ndarray
    alpha: float


def _check_grad_args(d, W, G_hat_a):
    d = np.asarray(d, dtype=float)
    W = np.asarray(W, dtype=complex)
    G = np.asarray(G_hat_a, dtype=complex)
    if W.ndim != 2 or G.shape != W.shape or d.shape != (W.shape[1],):
        raise DimensionError(f"inconsistent shapes d{d.shape}, W{W.shape}, G{G.shape}")
    return d, W, G


def mse_grad_d(d, W, G_hat_a, link: LinkBudget) -> np.ndarray:
    """Gradient of the unconditioned MSE: ``2 rho C_jj d_j``."""
    d, W, G = _check_grad_args(d, W, G_hat_a)
    return 2.0 * link.rho_f * gram_diag(W, G) * d


def mse_grad_d_conditioned(d, W, G_hat_a, link: LinkBudget) -> np.ndarray:
    """Gradient of the conditioned MSE: ``2 rho C_jj d_j - 2 sqrt(rho) Re(G_hat^T W)_jj``."""
    d, W, G = _check_grad_args(d, W, G_hat_a)
    lin = np.diagonal(G.T @ W).real
    return 2.0 * link.rho_f * gram_diag(W, G) * d - 2.0 * np.sqrt(link.rho_f) * lin


def _step_size(W, G_hat_a, link, params) -> float:
    cmax = float(np.max(gram_diag(W, G_hat_a)))
    if not cmax > 0:
        return 0.0
    return params.step_d / (2.0 * link.rho_f * cmax)


def _descend(objective, grad, d0, lam, iters, backtracking):
    d = np.array(d0, dtype=float)
    f = objective(d)
    trace = [f]
    for i in range(iters):
        g = grad(d)
        trial = d - lam * g
        ft = objective(trial)
        if backtracking:
            halvings = 0
            while ft > f and halvings < _MAX_HALVINGS:
                lam *= 0.5
                trial = d - lam * g
                ft = objective(trial)
                halvings += 1
            if ft > f:
                # no decrease possible along the gradient: stationary to precision
                break
        elif ft > f + _DIVERGENCE_SLACK * abs(f):
            raise DivergenceError(f"objective increased at iteration {i + 1}: "
                                  f"{f:.6g} -> {ft:.6g} with step {lam:.3g}")
        d, f = trial, ft
        trace.append(f)
    return d, trace


def _finish(W, d_raw, budget, alpha, trace, always_scale: bool, alpha_trace=()):
    power = float(np.linalg.norm(W * d_raw) ** 2)
    if always_scale or abs(power - budget) > 1e-9 * budget:
        d = power_scale(W, d_raw, budget)
        scaled = True
    else:
        d, scaled = d_raw.copy(), False
    nonneg = bool(np.all(d >= 0))
    if not nonneg:
        log.warning("power allocation produced negative coefficients: %s", d[d < 0])
    return PowerResult(d=d, alpha_worst=alpha, objective_trace=trace, scaled=scaled,
                       d_unscaled=d_raw, nonnegative=nonneg, alpha_trace=list(alpha_trace))


def epl(W, link: LinkBudget, alpha: float = 0.0) -> PowerResult:
    """Equal power loading scaled to the budget."""
    W = np.asarray(W, dtype=complex)
    d = power_scale(W, np.ones(W.shape[1]), link.power_budget)
    return PowerResult(d=d, alpha_worst=alpha, scaled=True, d_unscaled=np.ones(W.shape[1]))


def _start(W, d0, link):
    if d0 is None:
        return power_scale(W, np.ones(W.shape[1]), link.power_budget)
    return np.asarray(d0, dtype=float)


def gdpa(W, G_hat_a, link: LinkBudget, params: SolverParams, d0=None,
         stats: ErrorStats | None = None, alpha: float = 0.0) -> PowerResult:
    """Descent on the unconditioned MSE, then rescale to the power budget.

    ``d0`` defaults to equal loading; callers normally pass the column norms
    of the base precoder. ``stats`` only adds the (constant) error term to
    the reported objective.
    """
    W = np.asarray(W, dtype=complex)
    d0 = _start(W, d0, link)
    P_err = W * d0
    lam = _step_size(W, G_hat_a, link, params)
    d, trace = _descend(lambda x: mse_unconditioned(x, W, G_hat_a, stats, link, P_err=P_err),
                        lambda x: mse_grad_d(x, W, G_hat_a, link),
                        d0, lam, params.iters_d, params.backtracking)
    return _finish(W, d, link.power_budget, alpha, trace, always_scale=True)


def rgdpa(W, G_hat_a, stats: ErrorStats | None, link: LinkBudget, params: SolverParams,
          d0=None) -> PowerResult:
    """Descent on the MSE conditioned on the channel estimate, then rescale.

    The error-expectation term is frozen at the starting precoder
    ``W diag(d0)``, so it does not enter the gradient.
    """
    W = np.asarray(W, dtype=complex)
    d0 = _start(W, d0, link)
    P_err = W * d0
    lam = _step_size(W, G_hat_a, link, params)
    d, trace = _descend(lambda x: mse_conditioned(x, W, G_hat_a, stats, link, P_err=P_err),
                        lambda x: mse_grad_d_conditioned(x, W, G_hat_a, link),
                        d0, lam, params.iters_d, params.backtracking)
    alpha = stats.alpha if stats is not None else 0.0
    return _finish(W, d, link.power_budget, alpha, trace, always_scale=True)


# ------------------------------------------------------------------ WRGDPA

def _mix_coefficients(alpha):
    """(a, a', a'') for sqrt(1 - alpha) and (b, b', b'') for sqrt(alpha)."""
    a = np.sqrt(1.0 - alpha)
    b = np.sqrt(alpha)
    return ((a, -0.5 / a, -0.25 / a ** 3),
            (b, 0.5 / b, -0.25 / b ** 3))


def _workspace(V, Ve, alpha) -> WrgdpaWorkspace:
    (a, a1, a2), (b, b1, b2) = _mix_coefficients(alpha)
    G, G1, G2 = a * V + b * Ve, a1 * V + b1 * Ve, a2 * V + b2 * Ve
    Gh, G1h, G2h = G.conj().T, G1.conj().T, G2.conj().T
    H = Gh @ G
    cond = np.linalg.cond(H)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularHError(f"H is singular to working precision (cond {cond:.3g})")
    H1 = G1h @ G + Gh @ G1
    H2 = G2h @ G + 2.0 * (G1h @ G1) + Gh @ G2
    P = np.linalg.solve(H, Gh)
    P1 = np.linalg.solve(H, G1h - H1 @ P)
    P2 = np.linalg.solve(H, G2h - H2 @ P - 2.0 * (H1 @ P1))
    return WrgdpaWorkspace(H=H, Q=Gh, H_d1=H1, H_d2=H2, Q_d1=G1h, Q_d2=G2h,
                           P_a=P, P_ad1=P1, P_ad2=P2, alpha=float(alpha))


def wrgdpa_alpha_derivatives(V_a, V_err_a, alpha: float, d, W, link: LinkBudget):
    """First and second alpha-derivatives of the alpha-form unconditioned MSE.

    Returns
    -------
    (dE, d2E, workspace)

    Raises
    ------
    SingularHError
        If ``H = G(alpha)^H G(alpha)`` has condition number above 1e12.
    """
    if not _EDGE_EPS < alpha < 1.0 - _EDGE_EPS:
        raise DomainError(f"alpha must lie in ({_EDGE_EPS}, {1 - _EDGE_EPS}), got {alpha}")
    V = np.asarray(V_a, dtype=complex)
    Ve = np.asarray(V_err_a, dtype=complex)
    W = np.asarray(W, dtype=complex)
    d = np.asarray(d, dtype=float)
    if V.shape != Ve.shape or V.shape != W.shape or d.shape != (W.shape[1],):
        raise DimensionError("V_a, V_err_a, W and d have inconsistent shapes")
    ws = _workspace(V, Ve, alpha)
    rho = link.rho_f
    T1 = float(np.dot(gram_diag(W, V), d * d))
    X, X1, X2 = ws.P_a @ Ve, ws.P_ad1 @ Ve, ws.P_ad2 @ Ve
    T2 = np.vdot(X, X).real
    T2_1 = 2.0 * np.vdot(X, X1).real
    T2_2 = 2.0 * np.vdot(X1, X1).real + 2.0 * np.vdot(X, X2).real
    dE = -rho * T1 + rho * T2 + rho * alpha * T2_1
    d2E = 2.0 * rho * T2_1 + rho * alpha * T2_2
    return float(dE), float(d2E), ws


def _worst_alpha(V, Ve, W, d, link, bounds, params, alpha0):
    lo, hi = bounds.alpha_lo, bounds.alpha_hi
    E = lambda a: mse_unconditioned_alpha(d, W, V, Ve, a, link)  # noqa: E731
    if hi <= lo:
        return float(lo), [float(lo)]
    start = bounds.clip(alpha0)
    dE, d2E, _ = wrgdpa_alpha_derivatives(V, Ve, start, d, W, link)
    if d2E > params.hessian_tol * abs(E(start)):
        # convex in alpha: the maximum sits on the boundary
        e_lo, e_hi = E(lo), E(hi)
        a = hi if e_hi > e_lo else lo
        return float(a), [float(a)]

    alpha, f = start, E(start)
    trace = [alpha]
    gamma = params.step_alpha_ascent * (hi - lo) / abs(dE) if dE != 0 else 0.0
    for _ in range(params.iters_alpha):
        if gamma == 0.0:
            break
        g = dE if len(trace) == 1 else wrgdpa_alpha_derivatives(V, Ve, alpha, d, W, link)[0]
        trial = min(max(alpha + gamma * g, lo), hi)
        ft = E(trial)
        halvings = 0
        while ft < f and halvings < _MAX_HALVINGS:
            gamma *= 0.5
            trial = min(max(alpha + gamma * g, lo), hi)
            ft = E(trial)
            halvings += 1
        if ft < f:
            break
        alpha, f = trial, ft
        trace.append(alpha)
    return float(alpha), trace


def wrgdpa(V_a, V_err_a, W, link: LinkBudget, bounds: RobustnessBounds,
           params: SolverParams, d0=None, alpha0: float | None = None) -> PowerResult:
    """Worst-case robust power allocation for the ZF precoder.

    Phase 1 finds the alpha in ``[alpha_lo, alpha_hi]`` that maximizes the
    alpha-form MSE at ``d0``: if it is convex at ``alpha0`` the larger
    endpoint wins, otherwise projected gradient ascent runs for ``iters_alpha``
    steps. Phase 2 descends on ``d`` with the estimate
    ``sqrt(1 - alpha_worst) V_a``. Phase 3 rescales to the budget whenever the
    resulting power differs from it.
    """
    V = np.asarray(V_a, dtype=complex)
    Ve = np.asarray(V_err_a, dtype=complex)
    W = np.asarray(W, dtype=complex)
    alpha0 = bounds.midpoint if alpha0 is None else _check_alpha(alpha0)
    d0 = _start(W, d0, link)

    alpha_w, alpha_trace = _worst_alpha(V, Ve, W, d0, link, bounds, params, alpha0)

    G_nom = np.sqrt(1.0 - alpha0) * V
    G_w = np.sqrt(1.0 - alpha_w) * V
    lam = _step_size(W, G_nom, link, params)
    # only the desired-signal term depends on d; the error term is a constant
    c0 = mse_unconditioned_alpha(np.zeros_like(d0), W, V, Ve, alpha_w, link)
    Cw = link.rho_f * gram_diag(W, G_w)
    d, trace = _descend(lambda x: c0 + float(np.dot(Cw, x * x)),
                        lambda x: mse_grad_d(x, W, G_w, link),
                        d0, lam, params.iters_d, params.backtracking)
    return _finish(W, d, link.power_budget, alpha_w, trace, always_scale=False,
                   alpha_trace=alpha_trace)
