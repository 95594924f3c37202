"""Robust greedy user scheduling (RC-ESG) and its non-robust baseline (C-ESG).

The robust selection metric for UE k is the served channel power as a
function of the imperfection level,

    J_k(alpha) = (1 - alpha) A_k + alpha B_k + 2 sqrt(alpha (1 - alpha)) C_k,

with ``A = sum |v|^2``, ``B = sum |v_err|^2`` and ``C = sum Re(v conj(v_err))``
over the antennas serving k (``v = sqrt(beta) h``). J_k is exactly
``||g_k||^2`` of the composed channel. Its curvature has the sign of ``-C_k``
for every alpha in (0, 1), so one branch decision covers the whole interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .channel import ChannelRealization, ClusterMask, LargeScaleFading, mask_channel
from .errors import DomainError, RankError
from .metrics import error_stats, sum_rate
from .model import LinkBudget, RobustnessBounds, SolverParams
from .precoding import build_precoder

__all__ = [
    "Curvature",
    "ReopResult",
    "ScheduleOutcome",
    "j_objective",
    "j_grad_alpha",
    "j_second_alpha",
    "j_curvature_sign",
    "reop_worst_alpha_min",
    "reop_worst_alpha_max",
    "reop_all",
    "schedule_sum_rate",
    "rgus",
    "rc_esg",
    "c_esg",
]

EDGE_EPS = 1e-6
_MAX_HALVINGS = 20


class Curvature(Enum):
    CONVEX = "Convex"
    CONCAVE = "Concave"
    FLAT = "Flat"


@dataclass(frozen=True)
class ReopResult:
    ue_index: int
    worst_alpha: float
    objective: float


@dataclass
class ScheduleOutcome:
    """Selected set, every evaluated candidate and the greedy starting set."""

    selected: tuple[int, ...]
    candidates: list[tuple[tuple[int, ...], float]] = field(default_factory=list)
    rgus_set: tuple[int, ...] = ()

    @property
    def selected_rate(self) -> float:
        return dict(self.candidates)[self.selected]


# ---------------------------------------------------------------- objective

def _coefficients(v: np.ndarray, v_err: np.ndarray):
    """(A, B, C) along axis 0; works for single columns and M x K blocks."""
    A = np.sum(np.abs(v) ** 2, axis=0)
    B = np.sum(np.abs(v_err) ** 2, axis=0)
    C = np.sum((v * v_err.conj()).real, axis=0)
    return A, B, C


def _j(A, B, C, alpha):
    return (1.0 - alpha) * A + alpha * B + 2.0 * np.sqrt(alpha * (1.0 - alpha)) * C


def _dj(A, B, C, alpha):
    return B - A + C * (1.0 - 2.0 * alpha) / np.sqrt(alpha * (1.0 - alpha))


def _d2j(C, alpha):
    return -C / (2.0 * (alpha * (1.0 - alpha)) ** 1.5)


def _column_coefficients(beta_col, h_col, h_err_col):
    root = np.sqrt(np.asarray(beta_col, dtype=float))
    return _coefficients(root * np.asarray(h_col), root * np.asarray(h_err_col))


def j_objective(beta_col, h_col, h_err_col, alpha: float) -> float:
    """``J(alpha) = sum_m beta_m |sqrt(1-alpha) h_m + sqrt(alpha) h_err_m|^2``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return float(_j(*_column_coefficients(beta_col, h_col, h_err_col), alpha))


def _check_interior(alpha):
    if not EDGE_EPS < alpha < 1.0 - EDGE_EPS:
        raise DomainError(f"alpha must lie in ({EDGE_EPS}, {1 - EDGE_EPS}), got {alpha}")


def j_grad_alpha(beta_col, h_col, h_err_col, alpha: float) -> float:
    _check_interior(alpha)
    return float(_dj(*_column_coefficients(beta_col, h_col, h_err_col), alpha))


def j_second_alpha(beta_col, h_col, h_err_col, alpha: float) -> float:
    _check_interior(alpha)
    _, _, C = _column_coefficients(beta_col, h_col, h_err_col)
    return float(_d2j(C, alpha))


def _classify(r, scale, tol):
    """Vectorized curvature labels: +1 convex, -1 concave, 0 flat."""
    lim = tol * np.abs(scale)
    return np.where(r > lim, 1, np.where(r < -lim, -1, 0))


def j_curvature_sign(beta_col, h_col, h_err_col, alpha: float,
                     hessian_tol: float = 1e-8) -> Curvature:
    """Sign of ``d2J/dalpha2`` against a tolerance relative to ``|J(alpha)|``."""
    _check_interior(alpha)
    A, B, C = _column_coefficients(beta_col, h_col, h_err_col)
    label = int(_classify(_d2j(C, alpha), _j(A, B, C, alpha), hessian_tol))
    return {1: Curvature.CONVEX, -1: Curvature.CONCAVE, 0: Curvature.FLAT}[label]


# --------------------------------------------------------------------- REOP

def _projected_descent(A, B, C, lo, hi, params: SolverParams, sign: float):
    """Projected gradient on ``sign * J`` over [lo, hi], one lane per UE.

    Starts at the midpoint; the initial step moves ``mu * width`` so the
    iteration is insensitive to the channel scale. Steps that fail to
    decrease ``sign * J`` are halved.
    """
    alpha = np.full(A.shape, 0.5 * (lo + hi))
    f = sign * _j(A, B, C, alpha)
    g0 = np.abs(_dj(A, B, C, alpha))
    base = np.where(g0 > 0, params.step_alpha_sched * (hi - lo) / np.where(g0 > 0, g0, 1.0), 0.0)
    step = base.copy()
    for _ in range(params.iters_reop):
        g = sign * _dj(A, B, C, alpha)
        trial = np.clip(alpha - step * g, lo, hi)
        ft = sign * _j(A, B, C, trial)
        worse = ft > f
        for _ in range(_MAX_HALVINGS):
            if not worse.any():
                break
            step = np.where(worse, 0.5 * step, step)
            trial = np.where(worse, np.clip(alpha - step * g, lo, hi), trial)
            ft = np.where(worse, sign * _j(A, B, C, trial), ft)
            worse = ft > f
        accept = ~worse
        alpha = np.where(accept, trial, alpha)
        f = np.where(accept, ft, f)
    return alpha


def _reop(A, B, C, lo: float, hi: float, params: SolverParams, mode: str):
    """Worst-case alpha per UE. ``mode`` is "min" (inner min) or "max"."""
    A, B, C = np.atleast_1d(A), np.atleast_1d(B), np.atleast_1d(C)
    if hi <= lo:
        alpha = np.full(A.shape, float(lo))
        return alpha, _j(A, B, C, alpha)
    mid = 0.5 * (lo + hi)
    curv = _classify(_d2j(C, mid), _j(A, B, C, mid), params.hessian_tol)
    j_lo, j_hi = _j(A, B, C, lo), _j(A, B, C, hi)
    if mode == "min":
        endpoint = np.where(j_hi < j_lo, hi, lo)
        iterate = curv > 0
        sign = 1.0
    else:
        endpoint = np.where(j_hi > j_lo, hi, lo)
        iterate = curv < 0
        sign = -1.0
    alpha = endpoint.astype(float)
    if iterate.any():
        idx = np.flatnonzero(iterate)
        alpha[idx] = _projected_descent(A[idx], B[idx], C[idx], lo, hi, params, sign)
    return alpha, _j(A, B, C, alpha)


def _channel_coefficients(channel: ChannelRealization, mask: ClusterMask | None):
    V, Ve = channel.V, channel.V_err
    if mask is not None:
        V = np.where(mask.mask, V, 0.0)
        Ve = np.where(mask.mask, Ve, 0.0)
    return _coefficients(V, Ve)


def reop_all(channel: ChannelRealization, bounds: RobustnessBounds,
             params: SolverParams, mode: str, mask: ClusterMask | None = None):
    """Worst-case alpha and J for every UE column, as two length-K arrays."""
    return _reop(*_channel_coefficients(channel, mask), bounds.alpha_lo,
                 bounds.alpha_hi, params, mode)


def _reop_one(ue, channel, bounds, params, mask, mode) -> ReopResult:
    K = channel.shape[1]
    if not 0 <= ue < K:
        raise IndexError(f"UE index {ue} out of range for K={K}")
    sl = slice(ue, ue + 1)
    V, Ve = channel.V[:, sl], channel.V_err[:, sl]
    if mask is not None:
        V = np.where(mask.mask[:, sl], V, 0.0)
        Ve = np.where(mask.mask[:, sl], Ve, 0.0)
    alpha, J = _reop(*_coefficients(V, Ve), bounds.alpha_lo, bounds.alpha_hi, params, mode)
    return ReopResult(int(ue), float(alpha[0]), float(J[0]))


def reop_worst_alpha_min(ue: int, channel: ChannelRealization, bounds: RobustnessBounds,
                         params: SolverParams, mask: ClusterMask | None = None) -> ReopResult:
    """Least channel power of UE ``ue`` over the admissible alpha interval.

    Convex J is minimized by projected gradient descent from the midpoint;
    concave or affine J attains its minimum at an endpoint (ties go to
    ``alpha_lo``).
    """
    return _reop_one(ue, channel, bounds, params, mask, "min")


def reop_worst_alpha_max(ue: int, channel: ChannelRealization, bounds: RobustnessBounds,
                         params: SolverParams, mask: ClusterMask | None = None) -> ReopResult:
    """Largest channel power of UE ``ue`` over the admissible alpha interval."""
    return _reop_one(ue, channel, bounds, params, mask, "max")


# --------------------------------------------------------------- scheduling

def schedule_sum_rate(channel: ChannelRealization, lsf: LargeScaleFading, mask: ClusterMask,
                      S, link: LinkBudget, precoder: str = "mmse") -> float:
    """Sum-rate of set ``S`` with equal power loading on the configured precoder.

    A rank-deficient set (ZF) scores ``-inf`` so it is never preferred.
    """
    uc = mask_channel(channel, mask, S)
    G_hat = uc.G_hat
    try:
        base = build_precoder(precoder, G_hat, link)
    except RankError:
        return -np.inf
    P = base.W * np.sqrt(link.power_budget / len(S))
    return sum_rate(G_hat, P, error_stats(lsf, mask, S, channel.alpha), link)


def _greedy(order_scores: np.ndarray, channel, lsf, mask, link, n, precoder):
    """Add UEs by descending score while the sum-rate strictly improves."""
    remaining = list(range(channel.shape[1]))
    S: list[int] = []
    rate = -np.inf
    while len(S) < n and remaining:
        best = remaining[int(np.argmax(order_scores[remaining]))]
        trial_rate = schedule_sum_rate(channel, lsf, mask, S + [best], link, precoder)
        if not trial_rate > rate:
            break
        S.append(best)
        remaining.remove(best)
        rate = trial_rate
    return S, rate


AdjustBounds = Callable[[RobustnessBounds, int, ScheduleOutcome], RobustnessBounds]


def _esg(channel, lsf, mask, link, n, precoder, scores) -> ScheduleOutcome:
    """Shared greedy-build plus substitution skeleton.

    ``scores`` is ``(add_score, remove_score, update)``: two length-K arrays
    and a callback ``update(j, outcome, add, remove) -> (add, remove)`` run
    after each substitution.
    """
    add_score, remove_score, update = scores
    S, rate = _greedy(add_score, channel, lsf, mask, link, n, precoder)
    out = ScheduleOutcome(selected=tuple(S), candidates=[(tuple(S), rate)],
                          rgus_set=tuple(S))
    K = channel.shape[1]
    pool = [k for k in range(K) if k not in S]
    current = list(S)
    for j in range(1, K - n + 2):
        if not pool or not current:
            break
        k_r = current[int(np.argmin(remove_score[current]))]
        k_su = pool[int(np.argmax(add_score[pool]))]
        current = [k_su if k == k_r else k for k in current]
        pool.remove(k_su)
        r = schedule_sum_rate(channel, lsf, mask, current, link, precoder)
        out.candidates.append((tuple(current), r))
        add_score, remove_score = update(j, out, add_score, remove_score)

    rates = [r for _, r in out.candidates]
    out.selected = out.candidates[int(np.argmax(rates))][0]
    return out


def rgus(channel: ChannelRealization, lsf: LargeScaleFading, mask: ClusterMask,
         bounds: RobustnessBounds, link: LinkBudget, params: SolverParams, n: int,
         precoder: str = "mmse") -> tuple[int, ...]:
    """Robust greedy build: repeatedly add the UE with the largest worst-case power."""
    _, jmin = reop_all(channel, bounds, params, "min", mask)
    S, _ = _greedy(jmin, channel, lsf, mask, link, n, precoder)
    return tuple(S)


def rc_esg(channel: ChannelRealization, lsf: LargeScaleFading, mask: ClusterMask,
           bounds: RobustnessBounds, link: LinkBudget, params: SolverParams, n: int,
           precoder: str = "mmse",
           adjust_bounds: Optional[AdjustBounds] = None) -> ScheduleOutcome:
    """Robust scheduler: greedy build, then weakest-UE substitution.

    Each substitution removes the scheduled UE whose best-case power
    (max over alpha) is smallest and inserts the unscheduled UE whose
    worst-case power (min over alpha) is largest; removed UEs are not
    reconsidered. The candidate with the highest sum-rate is selected.

    ``adjust_bounds(bounds, j, outcome)`` may return new bounds after
    substitution ``j``; the default keeps them fixed.
    """
    state = {"bounds": bounds}

    def scores_for(b):
        return (reop_all(channel, b, params, "min", mask)[1],
                reop_all(channel, b, params, "max", mask)[1])

    add0, rem0 = scores_for(bounds)

    def update(j, out, add, rem):
        if adjust_bounds is None:
            return add, rem
        new = adjust_bounds(state["bounds"], j, out)
        if new == state["bounds"]:
            return add, rem
        state["bounds"] = new
        return scores_for(new)

    return _esg(channel, lsf, mask, link, n, precoder, (add0, rem0, update))


def c_esg(channel: ChannelRealization, lsf: LargeScaleFading, mask: ClusterMask,
          link: LinkBudget, params: SolverParams, n: int,
          precoder: str = "mmse") -> ScheduleOutcome:
    """Non-robust scheduler: same skeleton ranked by ``||g_k||^2`` at nominal alpha."""
    A, B, C = _channel_coefficients(channel, mask)
    alpha = np.full(A.shape, channel.alpha)
    power = _j(A, B, C, alpha)
    return _esg(channel, lsf, mask, link, n, precoder,
                (power, power, lambda j, out, a, r: (a, r)))
