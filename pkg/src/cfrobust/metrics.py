"""Closed-form sum-rate and MSE objectives.

Expectations over the error channel use entrywise independence: the error
entries are zero mean with ``E|G_err[m, k]|^2 = alpha * beta_mk`` on served
antennas and zero elsewhere. Two consequences used throughout:

    E[G_err^T A G_err^*]       = diag_k( sum_m A_mm Omega_mk )
    E[Tr(P^H G_err^* G_err^T P)] = sum_m (P P^H)_mm omega_m

with ``Omega = alpha * beta[:, S] * mask[:, S]`` and ``omega = Omega.sum(1)``.
Derivations are in docs/expectations.md.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ClusterMask, LargeScaleFading, _check_alpha, _check_subset
from .errors import DimensionError
from .model import LinkBudget
from .precoding import Precoder

__all__ = [
    "ErrorStats",
    "error_stats",
    "error_covariance_diag",
    "sum_rate",
    "mse_conditioned",
    "mse_unconditioned",
    "mse_unconditioned_alpha",
    "gram_diag",
]


@dataclass(frozen=True, eq=False)
class ErrorStats:
    """Second moments of the masked error channel for a scheduled set.

    Attributes
    ----------
    per_ue : ndarray, shape (M, n)
        ``E|G_err[m, k]|^2`` for each scheduled UE column.
    alpha : float
    """

    per_ue: np.ndarray
    alpha: float

    @property
    def antenna_weights(self) -> np.ndarray:
        return self.per_ue.sum(axis=1)

    @classmethod
    def zero(cls, M: int, n: int) -> "ErrorStats":
        return cls(np.zeros((M, n)), 0.0)


def error_stats(lsf: LargeScaleFading, mask: ClusterMask, S, alpha: float) -> ErrorStats:
    alpha = _check_alpha(alpha)
    S = _check_subset(S, lsf.shape[1])
    per_ue = alpha * lsf.beta[:, S] * mask.mask[:, S]
    return ErrorStats(per_ue, alpha)


def _matrix(P) -> np.ndarray:
    return P.P if isinstance(P, Precoder) else np.asarray(P, dtype=complex)


def _row_power(P: np.ndarray) -> np.ndarray:
    # (P P^H)_mm
    return np.einsum("mj,mj->m", P, P.conj()).real


def _check_dims(G_hat_a: np.ndarray, P: np.ndarray, stats: ErrorStats | None):
    if G_hat_a.ndim != 2 or P.ndim != 2:
        raise DimensionError("channel and precoder must be 2-D")
    if G_hat_a.shape != P.shape:
        raise DimensionError(f"channel {G_hat_a.shape} and precoder {P.shape} differ")
    if stats is not None and stats.per_ue.shape != G_hat_a.shape:
        raise DimensionError(f"error statistics {stats.per_ue.shape} do not match "
                             f"channel {G_hat_a.shape}")


def error_covariance_diag(P, stats: ErrorStats, link: LinkBudget) -> np.ndarray:
    """Diagonal of ``rho E[G_err^T P P^H G_err^*]``, one entry per UE."""
    P = _matrix(P)
    return link.rho_f * (_row_power(P) @ stats.per_ue)


def sum_rate(G_hat_a, P, stats: ErrorStats, link: LinkBudget) -> float:
    """Sum-rate in bits/s/Hz with the residual CSI error treated as noise.

    ``SR = log2 det(I_n + R^{-1/2} S R^{-1/2})`` where
    ``S = rho G_hat^T P P^H G_hat^*`` and ``R`` is the diagonal error-plus-noise
    covariance. ``P`` may be a :class:`Precoder` or a raw matrix (including 0).
    """
    G = np.asarray(G_hat_a, dtype=complex)
    P = _matrix(P)
    _check_dims(G, P, stats)
    n = G.shape[1]
    R = error_covariance_diag(P, stats, link) + link.noise_var
    F = (G.T @ P) / np.sqrt(R)[:, None]
    T = np.eye(n) + link.rho_f * (F @ F.conj().T)
    L = np.linalg.cholesky(T)
    logdet = 2.0 * np.sum(np.log(np.diag(L).real))
    return max(float(logdet / np.log(2.0)), 0.0)


def gram_diag(W, G_hat_a) -> np.ndarray:
    """``C_jj`` of ``C = W^H G_hat^* G_hat^T W``, i.e. ``|G_hat^T W|^2`` column sums."""
    E = np.asarray(G_hat_a).T @ np.asarray(W)
    return np.einsum("ij,ij->j", E, E.conj()).real


def _check_mse_args(d, W, G_hat_a, stats, n):
    d = np.asarray(d, dtype=float)
    W = np.asarray(W, dtype=complex)
    G = np.asarray(G_hat_a, dtype=complex)
    _check_dims(G, W, stats)
    if d.shape != (W.shape[1],):
        raise DimensionError(f"d has shape {d.shape}, expected ({W.shape[1]},)")
    if n is not None and n != W.shape[1]:
        raise DimensionError(f"n={n} does not match {W.shape[1]} precoder columns")
    return d, W, G


def _error_term(P_err, stats, link) -> float:
    if stats is None:
        return 0.0
    return link.rho_f * float(_row_power(P_err) @ stats.antenna_weights)


def mse_conditioned(d, W, G_hat_a, stats: ErrorStats | None, link: LinkBudget,
                    n: int | None = None, P_err=None) -> float:
    """``E[||x - y||^2 | G_hat]`` for ``P = W diag(d)``.

    ``P_err`` is the precoder inside the error-expectation term. It defaults
    to ``W diag(d)``; power allocation passes a frozen precoder so the error
    term does not depend on the optimization variable.
    """
    d, W, G = _check_mse_args(d, W, G_hat_a, stats, n)
    n = W.shape[1]
    rho = link.rho_f
    E = G.T @ W
    C = np.einsum("ij,ij->j", E, E.conj()).real
    lin = np.diagonal(E).real
    P_err = W * d if P_err is None else _matrix(P_err)
    return float(n + n * link.noise_var + rho * np.dot(C, d * d)
                 + _error_term(P_err, stats, link)
                 - 2.0 * np.sqrt(rho) * np.dot(d, lin))


def mse_unconditioned(d, W, G_hat_a, stats: ErrorStats | None, link: LinkBudget,
                      n: int | None = None, P_err=None) -> float:
    """MSE with both estimate and error treated as zero mean (no cross term)."""
    d, W, G = _check_mse_args(d, W, G_hat_a, stats, n)
    n = W.shape[1]
    P_err = W * d if P_err is None else _matrix(P_err)
    return float(n + n * link.noise_var + link.rho_f * np.dot(gram_diag(W, G), d * d)
                 + _error_term(P_err, stats, link))


def mse_unconditioned_alpha(d, W, V_a, V_err_a, alpha: float, link: LinkBudget) -> float:
    """Unconditioned MSE as a function of alpha, with the error term plugged in.

    The estimate is ``sqrt(1 - alpha) V_a``; the error term is evaluated at
    the given realization ``sqrt(alpha) V_err_a`` with the unscaled ZF
    precoder of ``G(alpha) = sqrt(1 - alpha) V_a + sqrt(alpha) V_err_a``::

        E(alpha) = n + n sigma^2 + rho (1 - alpha) ||V^T W D||_F^2
                   + rho alpha ||G^+(alpha) V_err||_F^2
    """
    alpha = _check_alpha(alpha)
    d = np.asarray(d, dtype=float)
    W = np.asarray(W, dtype=complex)
    V = np.asarray(V_a, dtype=complex)
    Ve = np.asarray(V_err_a, dtype=complex)
    if V.shape != W.shape or Ve.shape != W.shape or d.shape != (W.shape[1],):
        raise DimensionError("V_a, V_err_a, W and d have inconsistent shapes")
    n = W.shape[1]
    rho = link.rho_f
    T1 = float(np.dot(gram_diag(W, V), d * d))
    T2 = 0.0
    if alpha > 0:
        G = np.sqrt(1.0 - alpha) * V + np.sqrt(alpha) * Ve
        X = np.linalg.solve(G.conj().T @ G, G.conj().T @ Ve)
        T2 = float(np.vdot(X, X).real)
    return n + n * link.noise_var + rho * (1.0 - alpha) * T1 + rho * alpha * T2
