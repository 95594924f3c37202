"""Experiment orchestration: SNR sweeps over seeded channel trials.

Every trial draws one deployment and one pair of small-scale matrices from
a seed derived from the master seed and the trial index. All SNR points and
pairings of a trial reuse that draw (common random numbers), so differences
between pairings are not masked by channel variation.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .channel import (cluster_aps, compose_channel, generate_lsf, generate_small_scale,
                      mask_channel)
from .errors import CFRobustError, EmptyResultError, ValidationError
from .metrics import error_stats, sum_rate
from .model import ConfigBundle, LinkBudget
from .power import epl, gdpa, rgdpa, wrgdpa
from .precoding import Precoder, build_precoder
from .scheduling import c_esg, rc_esg

__all__ = [
    "Pairing",
    "ExperimentSpec",
    "ResultRow",
    "CSV_COLUMNS",
    "trial_seed",
    "run_trial",
    "run_experiment",
    "emit_results",
    "read_results",
    "parse_pairing",
    "DEFAULT_SNR_GRID",
]

SCHEDULERS = ("c_esg", "rc_esg")
ALLOCATORS = ("epl", "gdpa", "rgdpa", "wrgdpa")
PRECODERS = ("zf", "mmse")
CSV_COLUMNS = ("pairing", "snr_db", "mean_sum_rate", "std_error", "trials", "wall_time_ms")
DEFAULT_SNR_GRID = (0.0, 5.0, 10.0, 15.0, 20.0)


@dataclass(frozen=True)
class Pairing:
    """One algorithm combination; ``alpha`` is ignored (forced to 0) for perfect CSI."""

    scheduler: str = "rc_esg"
    allocator: str = "epl"
    precoder: str = "mmse"
    csi: str = "imperfect"
    alpha: float = 0.15

    def __post_init__(self):
        if self.scheduler not in SCHEDULERS:
            raise ValidationError(f"unknown scheduler {self.scheduler!r}")
        if self.allocator not in ALLOCATORS:
            raise ValidationError(f"unknown allocator {self.allocator!r}")
        if self.precoder not in PRECODERS:
            raise ValidationError(f"unknown precoder {self.precoder!r}")
        if self.csi not in ("perfect", "imperfect"):
            raise ValidationError(f"csi must be 'perfect' or 'imperfect', got {self.csi!r}")
        if self.allocator == "wrgdpa" and self.precoder != "zf":
            raise ValidationError("wrgdpa is only defined for the zf precoder")
        if self.csi == "perfect":
            object.__setattr__(self, "alpha", 0.0)
        elif not 0.0 <= self.alpha < 1.0:
            raise ValidationError(f"alpha must lie in [0, 1), got {self.alpha}")

    @property
    def id(self) -> str:
        csi = "pcsi" if self.csi == "perfect" else f"icsi{self.alpha:g}"
        return f"{self.scheduler}/{self.precoder}/{self.allocator}/{csi}"


def parse_pairing(text: str, alpha: float = 0.15) -> Pairing:
    """Parse ``scheduler:precoder:allocator:csi`` where csi is ``perfect``,
    ``imperfect`` or ``imperfect=<alpha>``."""
    parts = text.split(":")
    if len(parts) != 4:
        raise ValidationError(f"pairing {text!r} must be scheduler:precoder:allocator:csi")
    sched, prec, alloc, csi = (p.strip() for p in parts)
    if csi.startswith("imperfect="):
        alpha = float(csi.partition("=")[2])
        csi = "imperfect"
    return Pairing(sched, alloc, prec, csi, alpha)


@dataclass(frozen=True)
class ExperimentSpec:
    bundle: ConfigBundle
    pairings: tuple[Pairing, ...]
    snr_grid_db: tuple[float, ...] = DEFAULT_SNR_GRID
    trials: int = 200
    workers: int = 1

    def __post_init__(self):
        if not self.pairings:
            raise ValidationError("at least one pairing is required")
        if not self.snr_grid_db:
            raise ValidationError("SNR grid must be nonempty")
        if not (isinstance(self.trials, int) and self.trials >= 1):
            raise ValidationError("trials must be a positive integer")
        object.__setattr__(self, "pairings", tuple(self.pairings))
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))


@dataclass(frozen=True)
class ResultRow:
    pairing: str
    snr_db: float
    mean_sum_rate: float
    std_error: float
    trials: int
    wall_time_ms: float


def trial_seed(master: int, trial: int) -> int:
    """64-bit seed for ``trial``, independent across trials."""
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=(1_000, int(trial)))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def _link_at(bundle: ConfigBundle, snr_db: float) -> LinkBudget:
    return LinkBudget.from_snr_db(snr_db, bundle.link.noise_var, bundle.link.power_budget)


def _allocate(p: Pairing, base: Precoder, uc, stats, link, bundle) -> np.ndarray:
    _, _, bounds, params = bundle
    W = base.W
    if p.allocator == "epl":
        return epl(W, link).d
    if p.allocator == "gdpa":
        return gdpa(W, uc.G_hat, link, params, d0=base.d, stats=stats, alpha=p.alpha).d
    if p.allocator == "rgdpa":
        return rgdpa(W, uc.G_hat, stats, link, params, d0=base.d).d
    return wrgdpa(uc.V, uc.V_err, W, link, bounds, params, d0=base.d, alpha0=p.alpha).d


def run_trial(bundle: ConfigBundle, pairings: Sequence[Pairing], snr_grid: Sequence[float],
              trial: int, seed: int | None = None):
    """Sum-rate and elapsed seconds for every (pairing, SNR) of one trial.

    Returns a list aligned with ``[(p, s) for s in snr_grid for p in pairings]``.
    """
    net, _, bounds, params = bundle
    ts = trial_seed(net.seed if seed is None else seed, trial)
    lsf = generate_lsf(net, ts)
    H, H_err = generate_small_scale(net.num_antennas, net.num_ues, ts)
    mask = cluster_aps(lsf)
    n = net.num_scheduled

    out = []
    for snr in snr_grid:
        link = _link_at(bundle, snr)
        schedules = {}
        for p in pairings:
            t0 = time.perf_counter()
            try:
                chan = compose_channel(lsf, H, H_err, p.alpha)
                key = (p.scheduler, p.precoder, p.alpha)
                if key not in schedules:
                    if p.scheduler == "rc_esg":
                        o = rc_esg(chan, lsf, mask, bounds, link, params, n, p.precoder)
                    else:
                        o = c_esg(chan, lsf, mask, link, params, n, p.precoder)
                    schedules[key] = o.selected
                S = list(schedules[key])
                uc = mask_channel(chan, mask, S)
                stats = error_stats(lsf, mask, S, p.alpha)
                base = build_precoder(p.precoder, uc.G_hat, link)
                d = _allocate(p, base, uc, stats, link, bundle)
                rate = sum_rate(uc.G_hat, base.W * d, stats, link)
            except CFRobustError as exc:
                exc.args = (f"[trial {trial}, {snr:g} dB, {p.id}] {exc}",) + exc.args[1:]
                raise
            out.append((rate, time.perf_counter() - t0))
    return out


def _trial_job(args):
    return run_trial(*args)


def run_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """Run every trial and aggregate mean sum-rate and its standard error.

    Results are identical for any ``workers`` value: trials are seeded
    independently and aggregated in trial order with compensated sums.
    """
    jobs = [(spec.bundle, spec.pairings, spec.snr_grid_db, t) for t in range(spec.trials)]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_trial_job, jobs))
    else:
        results = [_trial_job(j) for j in jobs]

    keys = [(p, s) for s in spec.snr_grid_db for p in spec.pairings]
    rows = []
    T = spec.trials
    for i, (p, s) in enumerate(keys):
        rates = [r[i][0] for r in results]
        mean = math.fsum(rates) / T
        se = 0.0
        if T > 1:
            var = math.fsum((r - mean) ** 2 for r in rates) / (T - 1)
            se = math.sqrt(var / T)
        wall = 1e3 * math.fsum(r[i][1] for r in results)
        rows.append(ResultRow(p.id, s, mean, se, T, wall))
    return rows


def emit_results(rows: Iterable[ResultRow], fmt: str, path: str | Path) -> None:
    rows = list(rows)
    if not rows:
        raise EmptyResultError("no result rows to write")
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for r in rows:
                writer.writerow([r.pairing, repr(r.snr_db), repr(r.mean_sum_rate),
                                 repr(r.std_error), r.trials, repr(r.wall_time_ms)])
    elif fmt == "json":
        path.write_text(json.dumps([asdict(r) for r in rows], indent=2) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def read_results(path: str | Path, fmt: str | None = None) -> list[ResultRow]:
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".")
    if fmt == "json":
        return [ResultRow(**r) for r in json.loads(path.read_text())]
    with path.open(newline="") as fh:
        return [ResultRow(r["pairing"], float(r["snr_db"]), float(r["mean_sum_rate"]),
                          float(r["std_error"]), int(r["trials"]), float(r["wall_time_ms"]))
                for r in csv.DictReader(fh)]


def with_seed(bundle: ConfigBundle, seed: int) -> ConfigBundle:
    return replace(bundle, network=replace(bundle.network, seed=int(seed)))
