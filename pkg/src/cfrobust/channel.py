"""Large-scale fading, small-scale channels and user-centric clustering.

Channels are stored as antenna-by-UE matrices (M x K, M = L*N). The
imperfect-CSI channel at imperfection level alpha is

    G = sqrt(1 - alpha) * V + sqrt(alpha) * V_err,

with ``V = sqrt(beta) * H`` and ``V_err = sqrt(beta) * H_err`` elementwise.
The receive model that consumes these matrices is ``y = sqrt(rho) G^T P x + w``
(transpose, not Hermitian).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, InvalidMaskError
from .model import NetworkConfig

__all__ = [
    "LargeScaleFading",
    "ChannelRealization",
    "ClusterMask",
    "UserCentricChannel",
    "substream",
    "generate_lsf",
    "generate_small_scale",
    "compose_channel",
    "cluster_aps",
    "mask_channel",
    "dump_channel",
]

# one independent RNG substream per purpose, so e.g. changing mc_samples
# never perturbs the channel draws
_PURPOSES = {
    "placement": 0,
    "shadowing": 1,
    "small_scale": 2,
    "error": 3,
    "trial": 4,
    "oracle": 5,
}


def substream(seed: int, purpose: str, *key: int) -> np.random.Generator:
    """Independent generator for ``purpose`` derived from a master seed."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(_PURPOSES[purpose], *key))
    return np.random.default_rng(ss)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LargeScaleFading:
    """Linear large-scale gains (M x K) and the clustering threshold."""

    beta: np.ndarray
    lambda_lsf: float

    @classmethod
    def from_beta(cls, beta) -> "LargeScaleFading":
        beta = np.asarray(beta, dtype=float)
        if beta.ndim != 2:
            raise ValueError("beta must be a 2-D (antennas x UEs) matrix")
        if not np.all(beta > 0):
            raise ValueError("large-scale gains must be strictly positive")
        return cls(_frozen(beta), float(beta.mean()))

    @property
    def shape(self) -> tuple[int, int]:
        return self.beta.shape


def generate_lsf(cfg: NetworkConfig, seed: int | None = None) -> LargeScaleFading:
    """Draw AP/UE positions and shadowing, return per-antenna gains.

    APs and UEs are uniform in a square of side ``area_side``. Gains follow
    log-distance path loss plus log-normal shadowing per AP-UE pair; the N
    antennas of one AP share the AP's gain (rows ``l*N ... l*N + N - 1``).
    """
    seed = cfg.seed if seed is None else seed
    place = substream(seed, "placement")
    ap = place.uniform(0.0, cfg.area_side, size=(cfg.num_aps, 2))
    ue = place.uniform(0.0, cfg.area_side, size=(cfg.num_ues, 2))
    dist = np.linalg.norm(ap[:, None, :] - ue[None, :, :], axis=-1)
    dist = np.maximum(dist, max(cfg.min_distance, 1e-9))

    shadow = substream(seed, "shadowing").standard_normal((cfg.num_aps, cfg.num_ues))
    gain_db = (-cfg.pathloss_ref_db
               - 10.0 * cfg.pathloss_exponent * np.log10(dist)
               + cfg.shadowing_sigma_db * shadow)
    beta_ap = 10.0 ** (gain_db / 10.0)
    return LargeScaleFading.from_beta(np.repeat(beta_ap, cfg.antennas_per_ap, axis=0))


def _cn01(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def generate_small_scale(M: int, K: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Independent CN(0, 1) matrices ``(H, H_err)``, each M x K."""
    if M < 1 or K < 1:
        raise ValueError("M and K must be >= 1")
    H = _cn01(substream(seed, "small_scale"), (M, K))
    H_err = _cn01(substream(seed, "error"), (M, K))
    return H, H_err


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Estimate-side and error-side channels at one imperfection level."""

    V: np.ndarray
    V_err: np.ndarray
    alpha: float

    @property
    def G_hat(self) -> np.ndarray:
        return np.sqrt(1.0 - self.alpha) * self.V

    @property
    def G_err(self) -> np.ndarray:
        return np.sqrt(self.alpha) * self.V_err

    @property
    def G(self) -> np.ndarray:
        return self.G_hat + self.G_err

    @property
    def shape(self) -> tuple[int, int]:
        return self.V.shape


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


def compose_channel(lsf: LargeScaleFading, H: np.ndarray, H_err: np.ndarray,
                    alpha: float) -> ChannelRealization:
    alpha = _check_alpha(alpha)
    if H.shape != lsf.shape or H_err.shape != lsf.shape:
        raise ValueError(f"small-scale shapes {H.shape}, {H_err.shape} "
                         f"do not match beta {lsf.shape}")
    root = np.sqrt(lsf.beta)
    return ChannelRealization(_frozen(root * H), _frozen(root * H_err), alpha)


@dataclass(frozen=True, eq=False)
class ClusterMask:
    """Boolean antenna-by-UE serving mask; column k is diag(A_k)."""

    mask: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mask)
        if m.ndim != 2 or m.dtype != bool:
            raise InvalidMaskError("mask must be a 2-D boolean array")
        empty = np.flatnonzero(~m.any(axis=0))
        if empty.size:
            raise InvalidMaskError(f"UE(s) {empty.tolist()} have no serving antenna")
        object.__setattr__(self, "mask", _frozen(m))

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape


def cluster_aps(lsf: LargeScaleFading) -> ClusterMask:
    """Serve UE k from every antenna with ``beta_mk >= lambda_lsf``.

    The strongest antenna of each UE is always included (lowest index on
    ties), which covers UEs whose gains all fall below the threshold.
    """
    beta = lsf.beta
    mask = beta >= lsf.lambda_lsf
    best = np.argmax(beta, axis=0)
    mask[best, np.arange(beta.shape[1])] = True
    return ClusterMask(mask)


@dataclass(frozen=True, eq=False)
class UserCentricChannel:
    """Mask-zeroed channel columns for a UE subset (each M x |S|)."""

    V: np.ndarray
    V_err: np.ndarray
    alpha: float
    ues: tuple[int, ...]

    @property
    def G_hat(self) -> np.ndarray:
        return np.sqrt(1.0 - self.alpha) * self.V

    @property
    def G_err(self) -> np.ndarray:
        return np.sqrt(self.alpha) * self.V_err

    @property
    def G(self) -> np.ndarray:
        return self.G_hat + self.G_err


def _check_subset(S, K: int) -> list[int]:
    S = [int(k) for k in S]
    if not S:
        raise IndexError("UE subset must be nonempty")
    if len(set(S)) != len(S):
        raise IndexError(f"UE subset has duplicates: {S}")
    bad = [k for k in S if not 0 <= k < K]
    if bad:
        raise IndexError(f"UE indices {bad} out of range for K={K}")
    return S


def mask_channel(chan: ChannelRealization, mask: ClusterMask | np.ndarray,
                 S) -> UserCentricChannel:
    """Column subset of ``chan`` with each UE's non-serving antennas zeroed."""
    if not isinstance(mask, ClusterMask):
        mask = ClusterMask(np.asarray(mask))
    if mask.shape != chan.shape:
        raise ValueError(f"mask shape {mask.shape} != channel shape {chan.shape}")
    S = _check_subset(S, chan.shape[1])
    a = mask.mask[:, S]
    return UserCentricChannel(np.where(a, chan.V[:, S], 0.0),
                              np.where(a, chan.V_err[:, S], 0.0),
                              chan.alpha, tuple(S))


def dump_channel(path: str | Path, lsf: LargeScaleFading, chan: ChannelRealization,
                 mask: ClusterMask) -> None:
    """Write a snapshot as ``.npz`` with keys beta, V, V_err, mask, alpha."""
    np.savez(path, beta=lsf.beta, lambda_lsf=lsf.lambda_lsf, V=chan.V,
             V_err=chan.V_err, mask=mask.mask, alpha=chan.alpha)
