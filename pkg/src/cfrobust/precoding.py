"""Linear precoders for the transpose receive model ``y = sqrt(rho) G^T P x + w``.

Both precoders are built in the *right* form, so that ``G^T P`` is the
effective n x n channel seen by the scheduled UEs:

* ZF:   ``P ~ G^* (G^T G^*)^{-1}``, hence ``G^T P = I_n`` before scaling.
* MMSE: ``P ~ G^* (G^T G^* + (n sigma^2 / P) I_n)^{-1}``.

The textbook left forms ``(G^H G)^{-1} G^H`` are n x M and belong to the
Hermitian model ``y = G^H P x``; conjugating and transposing them gives the
matrices above. See docs/conventions.md.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateColumnError, DegenerateError, RankError
from .model import LinkBudget

__all__ = [
    "Precoder",
    "COND_LIMIT",
    "zf_direction",
    "zf_precoder",
    "mmse_direction",
    "mmse_precoder",
    "split_precoder",
    "power_scale",
    "epl_precoder",
    "build_precoder",
]

COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class Precoder:
    """``P = W diag(d)`` with unit-norm columns in ``W``."""

    P: np.ndarray
    W: np.ndarray
    d: np.ndarray

    @classmethod
    def from_matrix(cls, P) -> "Precoder":
        P = np.asarray(P, dtype=complex)
        W, d = split_precoder(P)
        return cls(P, W, d)

    @classmethod
    def from_factors(cls, W, d) -> "Precoder":
        W = np.asarray(W, dtype=complex)
        d = np.asarray(d, dtype=float)
        return cls(W * d, W, d)

    @property
    def power(self) -> float:
        return float(np.vdot(self.P, self.P).real)


def _as_matrix(G) -> np.ndarray:
    G = np.asarray(G, dtype=complex)
    if G.ndim != 2:
        raise ValueError("channel must be a 2-D (antennas x UEs) matrix")
    return G


def _scale_to(P: np.ndarray, budget: float) -> np.ndarray:
    power = np.vdot(P, P).real
    if not power > 0:
        raise DegenerateError("precoder is identically zero")
    return P * np.sqrt(budget / power)


def zf_direction(G_a) -> np.ndarray:
    """Unscaled ZF precoder with ``G_a^T P = I_n``."""
    G = _as_matrix(G_a)
    M, n = G.shape
    if n > M:
        raise RankError(f"ZF needs n <= M, got n={n}, M={M}")
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise RankError(f"channel is rank deficient (condition number {cond:.3g})")
    Gc = G.conj()
    return Gc @ np.linalg.inv(G.T @ Gc)


def zf_precoder(G_a, power_budget: float = 1.0) -> Precoder:
    """ZF precoder on ``G_a`` scaled to ``||P||_F^2 = power_budget``.

    Raises
    ------
    RankError
        If ``n > M`` or the condition number of ``G_a`` exceeds 1e12.
    """
    return Precoder.from_matrix(_scale_to(zf_direction(G_a), power_budget))


def mmse_direction(G_a, link: LinkBudget) -> np.ndarray:
    """Unnormalized MMSE precoder (regularized right inverse)."""
    G = _as_matrix(G_a)
    n = G.shape[1]
    Gc = G.conj()
    reg = n * link.noise_var / link.power_budget
    return Gc @ np.linalg.inv(G.T @ Gc + reg * np.eye(n))


def mmse_precoder(G_a, link: LinkBudget) -> Precoder:
    """MMSE precoder with ``eta`` chosen so that ``Tr(P P^H) = power_budget``."""
    return Precoder.from_matrix(_scale_to(mmse_direction(G_a, link), link.power_budget))


def split_precoder(P) -> tuple[np.ndarray, np.ndarray]:
    """Factor ``P = W diag(d)`` with ``d_j = ||P[:, j]||``."""
    P = np.asarray(P, dtype=complex)
    d = np.linalg.norm(P, axis=0)
    zero = np.flatnonzero(d == 0)
    if zero.size:
        raise DegenerateColumnError(f"precoder column(s) {zero.tolist()} are zero")
    return P / d, d


def power_scale(W, d, target: float) -> np.ndarray:
    """Rescale ``d`` so that ``||W diag(d)||_F^2 = target``."""
    d = np.asarray(d, dtype=float)
    peak = float(np.max(np.abs(d))) if d.size else 0.0
    if not peak > 0:
        raise DegenerateError("cannot scale an all-zero power vector")
    # normalize first so tiny iterates do not underflow when squared
    u = d / peak
    current = np.linalg.norm(np.asarray(W) * u) ** 2
    if not current > 0:
        raise DegenerateError("cannot scale an all-zero power vector")
    return np.sqrt(target / current) * u


def epl_precoder(W, power_budget: float) -> Precoder:
    """Equal power loading over the columns of ``W``."""
    W = np.asarray(W, dtype=complex)
    d = power_scale(W, np.ones(W.shape[1]), power_budget)
    return Precoder.from_factors(W, d)


def build_precoder(kind: str, G_a, link: LinkBudget) -> Precoder:
    if kind == "zf":
        return zf_precoder(G_a, link.power_budget)
    if kind == "mmse":
        return mmse_precoder(G_a, link)
    raise ValueError(f"unknown precoder {kind!r}")
