"""Independent numerical oracles: finite differences, Monte Carlo, grids, enumeration.

Nothing in the production path imports this module. The sampled quantities
here are computed from their definitions (draw the error channel, form the
received signal, average) rather than from the closed forms they certify.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .channel import ChannelRealization, ClusterMask, LargeScaleFading
from .errors import CombinatoricsError
from .model import LinkBudget

__all__ = [
    "OracleReport",
    "finite_diff",
    "second_diff",
    "mc_expectation",
    "jackknife",
    "grid_search_alpha",
    "exhaustive_schedule",
    "rel_err",
    "sample_error_channel",
    "mc_error_covariance",
    "mc_sum_rate",
    "mc_mse",
    "alpha_form_mse",
    "composed_power",
    "grid_extrema",
    "EXHAUSTIVE_LIMIT",
]

EXHAUSTIVE_LIMIT = 100_000


@dataclass
class OracleReport:
    name: str
    max_rel_err: float
    samples: int
    passed: bool
    tolerance: float

    @classmethod
    def make(cls, name: str, err: float, samples: int, tolerance: float) -> "OracleReport":
        err = float(err)
        return cls(name, err, int(samples), bool(err <= tolerance), float(tolerance))

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def rel_err(analytic, reference, floor: float = 0.0) -> float:
    """``||a - r||_inf / max(||a||_inf, floor)``; absolute error if both vanish."""
    a = np.atleast_1d(np.asarray(analytic))
    r = np.atleast_1d(np.asarray(reference))
    scale = max(float(np.max(np.abs(a))), floor)
    diff = float(np.max(np.abs(a - r)))
    return diff / scale if scale > 0 else diff


# ------------------------------------------------------------ derivatives

def finite_diff(f: Callable, x, h: float = 1e-6):
    """Central-difference gradient of a scalar function of a scalar or vector."""
    if np.isscalar(x):
        return (f(x + h) - f(x - h)) / (2.0 * h)
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e.flat[i] = h
        g.flat[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def second_diff(f: Callable, x: float, h: float = 1e-4) -> float:
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


# ------------------------------------------------------------ Monte Carlo

def mc_expectation(sampler: Callable, reduce: Callable, n_samples: int,
                   rng: np.random.Generator):
    """Elementwise sample mean and standard error of ``reduce(sampler(rng))``.

    For complex outputs the standard error is ``sqrt(E|X - mean|^2 / N)``.
    """
    if n_samples < 30:
        raise ValueError("n_samples must be >= 30")
    draws = np.array([reduce(sampler(rng)) for _ in range(n_samples)])
    mean = draws.mean(axis=0)
    var = np.mean(np.abs(draws - mean) ** 2, axis=0) * n_samples / (n_samples - 1)
    return mean, np.sqrt(var / n_samples)


def jackknife(stat: Callable, draws: np.ndarray, groups: int = 20):
    """Grouped jackknife estimate and standard error of ``stat(draws)``."""
    N = len(draws)
    groups = min(groups, N)
    idx = np.array_split(np.arange(N), groups)
    full = stat(draws)
    leave = np.array([stat(np.delete(draws, block, axis=0)) for block in idx])
    mean_leave = leave.mean(axis=0)
    se = np.sqrt((groups - 1) / groups * np.sum((leave - mean_leave) ** 2, axis=0))
    return full, se


def _cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def sample_error_channel(beta_a: np.ndarray, mask_a: np.ndarray, alpha: float,
                         rng: np.random.Generator) -> np.ndarray:
    """One draw of the masked error channel ``sqrt(alpha beta) h_err``."""
    return np.sqrt(alpha * beta_a) * mask_a * _cn(rng, beta_a.shape)


def mc_error_covariance(beta_a, mask_a, alpha, P, rho, n_samples, rng):
    """Sampled ``rho E[G_err^T P P^H G_err^*]`` (full n x n) and its std error."""
    PPh = P @ P.conj().T

    def reduce(Ge):
        return rho * (Ge.T @ PPh @ Ge.conj())

    return mc_expectation(lambda r: sample_error_channel(beta_a, mask_a, alpha, r),
                          reduce, n_samples, rng)


def mc_sum_rate(G_hat_a, beta_a, mask_a, alpha, P, link: LinkBudget, n_samples, rng,
                groups: int = 20):
    """Sum-rate from sampled received-signal covariances.

    The error channel is drawn ``n_samples`` times; the covariance of the
    received signal and of its interference-plus-noise part (everything
    except the estimate-side signal) are averaged over the draws, and the
    rate is ``log2 det(R_y) - log2 det(R_e)``. The standard error comes from
    a grouped jackknife because the statistic is nonlinear in the averages.
    """
    rho, s2 = link.rho_f, link.noise_var
    n = G_hat_a.shape[1]
    A = np.sqrt(rho) * (G_hat_a.T @ P)
    draws = []
    for _ in range(n_samples):
        B = np.sqrt(rho) * (sample_error_channel(beta_a, mask_a, alpha, rng).T @ P)
        Y = A + B
        draws.append(np.stack([Y @ Y.conj().T, B @ B.conj().T]))
    draws = np.array(draws)

    def stat(block):
        Ry, Re = block.mean(axis=0)
        Ry = Ry + s2 * np.eye(n)
        Re = Re + s2 * np.eye(n)
        return (np.linalg.slogdet(Ry)[1] - np.linalg.slogdet(Re)[1]) / math.log(2.0)

    return jackknife(stat, draws, groups)


def mc_mse(G_hat_a, beta_a, mask_a, alpha, P, link: LinkBudget, n_samples, rng,
           conditioned: bool = True, P_err=None):
    """Sampled ``||x - y||^2`` with ``y = sqrt(rho) (G_hat + G_err)^T P x + w``.

    With ``conditioned=False`` the estimate is multiplied by an independent
    uniform phase per draw, a zero-mean surrogate that keeps all its second
    moments. ``P_err`` (default ``P``) is the precoder applied to the error
    channel, so a frozen error term can be certified.
    """
    rho, s2 = link.rho_f, link.noise_var
    n = P.shape[1]
    P_err = P if P_err is None else P_err

    def sampler(r):
        x = _cn(r, n)
        w = math.sqrt(s2) * _cn(r, n)
        Ge = sample_error_channel(beta_a, mask_a, alpha, r)
        G = G_hat_a
        if not conditioned:
            G = G * np.exp(2j * np.pi * r.random())
        y = math.sqrt(rho) * ((G.T @ P) @ x + (Ge.T @ P_err) @ x) + w
        return np.sum(np.abs(x - y) ** 2)

    return mc_expectation(sampler, lambda v: v, n_samples, rng)


# ------------------------------------------------------- alpha objectives

def alpha_form_mse(d, W, V_a, V_err_a, alpha, link: LinkBudget) -> float:
    """Alpha-form unconditioned MSE via the pseudo-inverse of ``G(alpha)``."""
    n = W.shape[1]
    D = np.diag(d)
    sig = math.sqrt(1.0 - alpha) * V_a.T @ W @ D
    G = math.sqrt(1.0 - alpha) * V_a + math.sqrt(alpha) * V_err_a
    X = np.linalg.pinv(G) @ V_err_a
    return float(n + n * link.noise_var + link.rho_f * np.trace(sig @ sig.conj().T).real
                 + link.rho_f * alpha * np.trace(X @ X.conj().T).real)


def composed_power(v, v_err, alpha) -> float:
    """``||sqrt(1 - alpha) v + sqrt(alpha) v_err||^2`` for masked columns."""
    g = math.sqrt(1.0 - alpha) * v + math.sqrt(alpha) * v_err
    return float(np.vdot(g, g).real)


def grid_search_alpha(f: Callable, lo: float, hi: float, points: int = 10_000):
    """``(argmax, argmin)`` of ``f`` over a uniform grid including endpoints."""
    if points < 2:
        raise ValueError("points must be >= 2")
    grid = np.linspace(lo, hi, points)
    vals = np.array([f(a) for a in grid])
    return float(grid[int(np.argmax(vals))]), float(grid[int(np.argmin(vals))])


def grid_extrema(f: Callable, lo: float, hi: float, points: int = 10_000):
    grid = np.linspace(lo, hi, points)
    vals = np.array([f(a) for a in grid])
    return float(vals.max()), float(vals.min())


# ------------------------------------------------------------ enumeration

def exhaustive_schedule(channel: ChannelRealization, lsf: LargeScaleFading,
                        mask: ClusterMask, link: LinkBudget, n: int,
                        precoder: str = "mmse"):
    """Best n-subset by equal-power sum-rate over all ``C(K, n)`` subsets."""
    from .scheduling import schedule_sum_rate

    K = channel.shape[1]
    count = math.comb(K, n)
    if count > EXHAUSTIVE_LIMIT:
        raise CombinatoricsError(f"C({K}, {n}) = {count} exceeds {EXHAUSTIVE_LIMIT}")
    best, best_rate = None, -np.inf
    for S in itertools.combinations(range(K), n):
        r = schedule_sum_rate(channel, lsf, mask, list(S), link, precoder)
        if r > best_rate:
            best, best_rate = S, r
    return best, float(best_rate)
