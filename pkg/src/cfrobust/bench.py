"""Wall-time scaling study of the scheduler and the power allocators."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .channel import cluster_aps, compose_channel, generate_lsf, generate_small_scale, mask_channel
from .metrics import error_stats
from .model import LinkBudget, NetworkConfig, RobustnessBounds, SolverParams
from .power import gdpa, rgdpa, wrgdpa
from .precoding import zf_precoder
from .scheduling import c_esg, rc_esg

__all__ = ["Timing", "Fit", "best_time", "interleaved_best", "power_law_fit", "linear_fit",
           "bench_scheduler_antennas", "bench_iterations", "bench_wrgdpa", "bench_scaling"]


@dataclass(frozen=True)
class Timing:
    algorithm: str
    variable: str
    value: float
    seconds: float


@dataclass(frozen=True)
class Fit:
    algorithm: str
    variable: str
    kind: str  # "power" (exponent) or "linear" (slope)
    coefficient: float
    r2: float


def best_time(fn: Callable[[], object], repeats: int = 5) -> float:
    """Minimum wall time over ``repeats`` calls (least affected by noise)."""
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def interleaved_best(fns: Sequence[Callable[[], object]], repeats: int = 5) -> list[float]:
    """Minimum wall time of each callable, timing them round-robin.

    Interleaving spreads slow periods of a shared machine over all points
    instead of concentrating them on consecutive sizes, which would bend
    the fitted growth law.
    """
    best = [np.inf] * len(fns)
    for _ in range(repeats):
        for i, fn in enumerate(fns):
            t0 = time.perf_counter()
            fn()
            best[i] = min(best[i], time.perf_counter() - t0)
    return best


def _r2(y, yhat) -> float:
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0


def power_law_fit(x, t):
    """Exponent and R^2 of ``log t = a log x + b``."""
    lx, lt = np.log(np.asarray(x, float)), np.log(np.asarray(t, float))
    a, b = np.polyfit(lx, lt, 1)
    return float(a), _r2(lt, a * lx + b)


def linear_fit(x, t):
    x, t = np.asarray(x, float), np.asarray(t, float)
    a, b = np.polyfit(x, t, 1)
    return float(a), _r2(t, a * x + b)


def _instance(net: NetworkConfig, seed: int, alpha: float):
    lsf = generate_lsf(net, seed)
    H, He = generate_small_scale(net.num_antennas, net.num_ues, seed)
    return lsf, compose_channel(lsf, H, He, alpha), cluster_aps(lsf)


def bench_scheduler_antennas(num_aps: Sequence[int] = (4, 8, 16, 32, 64), antennas_per_ap: int = 4,
                             num_ues: int = 32, num_scheduled: int = 8, snr_db: float = 10.0,
                             alpha: float = 0.15, precoder: str = "mmse", repeats: int = 5,
                             seed: int = 0, robust: bool = False) -> list[Timing]:
    """Scheduler wall time as the number of antennas NL grows with n fixed."""
    link = LinkBudget.from_snr_db(snr_db)
    params, bounds = SolverParams(), RobustnessBounds()
    name = "rc_esg" if robust else "c_esg"
    fns = []
    for L in num_aps:
        net = NetworkConfig(num_aps=L, antennas_per_ap=antennas_per_ap, num_ues=num_ues,
                            num_scheduled=num_scheduled)
        lsf, chan, mask = _instance(net, seed, alpha)
        if robust:
            fns.append(lambda c=chan, f=lsf, m=mask: rc_esg(c, f, m, bounds, link, params,
                                                            num_scheduled, precoder))
        else:
            fns.append(lambda c=chan, f=lsf, m=mask: c_esg(c, f, m, link, params,
                                                           num_scheduled, precoder))
    times = interleaved_best(fns, repeats)
    return [Timing(name, "NL", L * antennas_per_ap, t) for L, t in zip(num_aps, times)]


def _power_instance(net: NetworkConfig, seed: int, alpha: float):
    lsf, chan, mask = _instance(net, seed, alpha)
    link = LinkBudget.from_snr_db(10.0)
    # a schedulable set, so ZF is well defined on it
    S = list(c_esg(chan, lsf, mask, link, SolverParams(), net.num_scheduled, "zf").selected)
    uc = mask_channel(chan, mask, S)
    base = zf_precoder(uc.G_hat)
    return uc, base, error_stats(lsf, mask, S, alpha)


def bench_iterations(iters: Sequence[int] = (50, 100, 200, 400, 800), algorithm: str = "rgdpa",
                     net: NetworkConfig | None = None, snr_db: float = 10.0, alpha: float = 0.15,
                     repeats: int = 5, seed: int = 0, which: str = "iters_d") -> list[Timing]:
    """Allocator wall time against ``iters_d`` (or ``iters_alpha`` for wrgdpa)."""
    net = net or NetworkConfig(num_aps=16, antennas_per_ap=4, num_ues=32, num_scheduled=16)
    link = LinkBudget.from_snr_db(snr_db)
    bounds = RobustnessBounds()
    uc, base, stats = _power_instance(net, seed, alpha)
    fns = []
    for it in iters:
        # fixed steps so the loop never exits early and cost tracks the count
        params = replace(SolverParams(backtracking=False, step_d=0.5), **{which: int(it)})
        if algorithm == "gdpa":
            fns.append(lambda p=params: gdpa(base.W, uc.G_hat, link, p, d0=base.d, stats=stats))
        elif algorithm == "rgdpa":
            fns.append(lambda p=params: rgdpa(base.W, uc.G_hat, stats, link, p, d0=base.d))
        else:
            fns.append(lambda p=params: wrgdpa(uc.V, uc.V_err, base.W, link, bounds, p,
                                               d0=base.d, alpha0=alpha))
    times = interleaved_best(fns, repeats)
    return [Timing(algorithm, which, it, t) for it, t in zip(iters, times)]


def bench_wrgdpa(iters: Sequence[int] = (50, 100, 200, 400), repeats: int = 3,
                 seed: int = 0) -> list[Timing]:
    """WRGDPA wall time against iters_d and, on a concave instance, iters_alpha."""
    return (bench_iterations(iters, "wrgdpa", repeats=repeats, seed=seed, which="iters_d")
            + bench_iterations(iters, "wrgdpa", repeats=repeats, seed=seed, which="iters_alpha"))


def bench_scaling(quick: bool = False) -> tuple[list[Timing], list[Fit]]:
    """Full timing table plus fitted growth laws."""
    reps = 3 if quick else 5
    timings: list[Timing] = []
    fits: list[Fit] = []

    sched = bench_scheduler_antennas(repeats=reps)
    timings += sched
    a, r2 = power_law_fit([t.value for t in sched], [t.seconds for t in sched])
    fits.append(Fit("c_esg", "NL", "power", a, r2))

    for alg in ("gdpa", "rgdpa"):
        rows = bench_iterations(algorithm=alg, repeats=reps)
        timings += rows
        a, r2 = linear_fit([t.value for t in rows], [t.seconds for t in rows])
        fits.append(Fit(alg, "iters_d", "linear", a, r2))

    rows = bench_wrgdpa(repeats=reps)
    timings += rows
    for var in ("iters_d", "iters_alpha"):
        sub = [t for t in rows if t.variable == var]
        a, r2 = linear_fit([t.value for t in sub], [t.seconds for t in sub])
        fits.append(Fit("wrgdpa", var, "linear", a, r2))
    return timings, fits
