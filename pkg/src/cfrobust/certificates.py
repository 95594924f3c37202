"""Acceptance certificates: each check compares production code with an oracle.

Every ``criterion_*`` function is deterministic (fixed seeds chosen before
any result was seen) and returns a :class:`CriterionResult`. They back both
``cfrobust verify`` and the acceptance tests.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import oracles as orc
from .bench import bench_iterations, bench_scheduler_antennas, linear_fit, power_law_fit
from .channel import (ChannelRealization, cluster_aps, compose_channel, generate_lsf,
                      generate_small_scale, mask_channel, substream)
from .metrics import (ErrorStats, error_covariance_diag, mse_conditioned, mse_unconditioned,
                      sum_rate)
from .model import ConfigBundle, LinkBudget, NetworkConfig, RobustnessBounds, SolverParams
from .power import mse_grad_d, mse_grad_d_conditioned, wrgdpa_alpha_derivatives
from .precoding import (mmse_precoder, power_scale, split_precoder, zf_direction,
                        zf_precoder)
from .scheduling import (_coefficients, c_esg, rc_esg, reop_worst_alpha_max,
                         reop_worst_alpha_min)
from .harness import ExperimentSpec, Pairing, run_experiment

__all__ = ["CriterionResult", "CRITERIA", "run_criteria"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    reports: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        worst = ", ".join(f"{r.name}={r.max_rel_err:.3g}/{r.tolerance:.3g}"
                          for r in self.reports if not r.passed) or "all checks within tolerance"
        return f"[{status}] criterion {self.number:2d}: {self.title} ({worst}; {self.seconds:.1f}s)"


def _finish(number, title, reports, t0, details=None, passed=None):
    ok = all(r.passed for r in reports) if passed is None else passed
    return CriterionResult(number, title, ok, reports, details or {}, time.perf_counter() - t0)


def _rng(*key):
    return substream(20240101, "oracle", *key)


def _cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _random_instance(rng, M=None, n=None):
    """Synthetic masked instance with moderate dynamic range."""
    n = n or int(rng.integers(2, 6))
    M = M or int(rng.integers(n + 2, n + 8))
    beta = 10.0 ** rng.uniform(-1.0, 1.0, size=(M, n))
    mask = rng.random((M, n)) < 0.7
    mask[rng.integers(0, M, size=n), np.arange(n)] = True
    return beta, mask


def _unit_columns(rng, M, n):
    W = _cn(rng, (M, n))
    return W / np.linalg.norm(W, axis=0)


# -------------------------------------------------------------- criterion 1

def criterion_1(instances: int = 100) -> CriterionResult:
    """Analytic gradients against central finite differences."""
    t0 = time.perf_counter()
    worst = {"grad_conditioned": 0.0, "grad_unconditioned": 0.0,
             "dE_dalpha": 0.0, "d2E_dalpha2": 0.0}
    for i in range(instances):
        rng = _rng(1, i)
        beta, mask = _random_instance(rng)
        M, n = beta.shape
        alpha = float(rng.uniform(0.05, 0.3))
        link = LinkBudget.from_snr_db(float(rng.uniform(0, 20)))
        G_hat = np.sqrt((1 - alpha) * beta) * mask * _cn(rng, (M, n))
        W = _unit_columns(rng, M, n)
        d = rng.uniform(0.1, 1.0, size=n)
        stats = ErrorStats(alpha * beta * mask, alpha)
        P_err = W * rng.uniform(0.1, 1.0, size=n)

        fc = lambda x: mse_conditioned(x, W, G_hat, stats, link, P_err=P_err)  # noqa: E731
        fu = lambda x: mse_unconditioned(x, W, G_hat, stats, link, P_err=P_err)  # noqa: E731
        worst["grad_conditioned"] = max(worst["grad_conditioned"], orc.rel_err(
            mse_grad_d_conditioned(d, W, G_hat, link), orc.finite_diff(fc, d, 1e-5)))
        worst["grad_unconditioned"] = max(worst["grad_unconditioned"], orc.rel_err(
            mse_grad_d(d, W, G_hat, link), orc.finite_diff(fu, d, 1e-5)))

        V = _cn(rng, (M, n))
        Ve = _cn(rng, (M, n))
        a = float(rng.uniform(0.05, 0.95))
        dE, d2E, _ = wrgdpa_alpha_derivatives(V, Ve, a, d, W, link)
        fa = lambda x: orc.alpha_form_mse(d, W, V, Ve, x, link)  # noqa: E731
        worst["dE_dalpha"] = max(worst["dE_dalpha"], orc.rel_err(dE, orc.finite_diff(fa, a, 1e-6)))
        worst["d2E_dalpha2"] = max(worst["d2E_dalpha2"],
                                   orc.rel_err(d2E, orc.second_diff(fa, a, 1e-4)))
    tol = {"grad_conditioned": 1e-5, "grad_unconditioned": 1e-5,
           "dE_dalpha": 1e-5, "d2E_dalpha2": 1e-3}
    reports = [orc.OracleReport.make(k, v, instances, tol[k]) for k, v in worst.items()]
    return _finish(1, "gradient certificates vs finite differences", reports, t0)


# -------------------------------------------------------------- criterion 2

def criterion_2(instances: int = 20, samples: int = 2000) -> CriterionResult:
    """Closed-form error moments against sampled error channels.

    The reported value is the largest ``|mc - closed| / se`` over all
    entries; the tolerance is 3 standard errors.
    """
    t0 = time.perf_counter()
    worst_cov, worst_tr = 0.0, 0.0
    for i in range(instances):
        rng = _rng(2, i)
        beta, mask = _random_instance(rng, M=8, n=4)
        alpha = float(rng.uniform(0.05, 0.3))
        link = LinkBudget.from_snr_db(10.0)
        G_hat = np.sqrt((1 - alpha) * beta) * mask * _cn(rng, beta.shape)
        P = mmse_precoder(G_hat, link).P
        stats = ErrorStats(alpha * beta * mask, alpha)

        mean, se = orc.mc_error_covariance(beta, mask, alpha, P, link.rho_f, samples, rng)
        closed = np.diag(error_covariance_diag(P, stats, link))
        worst_cov = max(worst_cov, float(np.max(np.abs(mean - closed) / se)))

        tr_mean, tr_se = orc.mc_expectation(
            lambda r: orc.sample_error_channel(beta, mask, alpha, r),
            lambda Ge: link.rho_f * np.trace(P.conj().T @ Ge.conj() @ Ge.T @ P).real,
            samples, rng)
        closed_tr = (mse_unconditioned(np.zeros(4), P, G_hat, stats, link, P_err=P)
                     - mse_unconditioned(np.zeros(4), P, G_hat, None, link))
        worst_tr = max(worst_tr, abs(float(tr_mean) - closed_tr) / float(tr_se))
    reports = [orc.OracleReport.make("error_covariance_sigma", worst_cov, instances * samples, 3.0),
               orc.OracleReport.make("error_trace_sigma", worst_tr, instances * samples, 3.0)]
    return _finish(2, "error-moment closed forms vs Monte Carlo", reports, t0)


# -------------------------------------------------------------- criterion 3

def criterion_3(instances: int = 20, samples: int = 2000) -> CriterionResult:
    """Closed-form sum-rate against sampled received-signal covariances."""
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(instances):
        rng = _rng(3, i)
        beta, mask = _random_instance(rng, M=8, n=4)
        alpha = float(rng.uniform(0.05, 0.3))
        link = LinkBudget.from_snr_db(float(rng.uniform(0, 20)))
        G_hat = np.sqrt((1 - alpha) * beta) * mask * _cn(rng, beta.shape)
        P = mmse_precoder(G_hat, link).P
        stats = ErrorStats(alpha * beta * mask, alpha)
        closed = sum_rate(G_hat, P, stats, link)
        mc, se = orc.mc_sum_rate(G_hat, beta, mask, alpha, P, link, samples, rng)
        worst = max(worst, abs(mc - closed) / se)
    reports = [orc.OracleReport.make("sum_rate_sigma", worst, instances * samples, 3.0)]
    return _finish(3, "sum-rate closed form vs sampled covariances", reports, t0)


# -------------------------------------------------------------- criterion 4

def criterion_4(instances: int = 20, samples: int = 2000) -> CriterionResult:
    """Sampled ``||x - y||^2`` against the closed-form MSE expressions."""
    t0 = time.perf_counter()
    worst_u, worst_c = 0.0, 0.0
    for i in range(instances):
        rng = _rng(4, i)
        beta, mask = _random_instance(rng, M=8, n=4)
        alpha = float(rng.uniform(0.05, 0.3))
        link = LinkBudget.from_snr_db(float(rng.uniform(0, 20)))
        G_hat = np.sqrt((1 - alpha) * beta) * mask * _cn(rng, beta.shape)
        W, d0 = split_precoder(zf_precoder(G_hat).P)
        d = d0 * rng.uniform(0.5, 1.5, size=d0.shape)
        stats = ErrorStats(alpha * beta * mask, alpha)
        P = W * d
        m, se = orc.mc_mse(G_hat, beta, mask, alpha, P, link, samples, rng, conditioned=False)
        worst_u = max(worst_u, abs(m - mse_unconditioned(d, W, G_hat, stats, link)) / se)
        m, se = orc.mc_mse(G_hat, beta, mask, alpha, P, link, samples, rng, conditioned=True)
        worst_c = max(worst_c, abs(m - mse_conditioned(d, W, G_hat, stats, link)) / se)
    reports = [orc.OracleReport.make("mse_unconditioned_sigma", worst_u, instances * samples, 3.0),
               orc.OracleReport.make("mse_conditioned_sigma", worst_c, instances * samples, 3.0)]
    return _finish(4, "MSE closed forms vs simulated error", reports, t0)


# -------------------------------------------------------------- criterion 5

def _reop_instance(rng, kind: str, M: int = 6):
    v = _cn(rng, (M, 1)) * np.sqrt(10.0 ** rng.uniform(-1, 1, size=(M, 1)))
    noise = _cn(rng, (M, 1)) * np.sqrt(10.0 ** rng.uniform(-1, 1, size=(M, 1)))
    if kind == "convex":
        ve = -rng.uniform(0.2, 2.0) * v + 0.3 * noise
    elif kind == "concave":
        ve = rng.uniform(0.2, 2.0) * v + 0.3 * noise
    else:
        # purely quadrature error: Re(v conj(v_err)) = 0 entrywise
        ve = 1j * v * rng.uniform(0.2, 2.0, size=(M, 1))
    return v, ve


def criterion_5(per_branch: int = 30, points: int = 10_000) -> CriterionResult:
    """REOP solutions against a dense grid of the composed channel power."""
    t0 = time.perf_counter()
    params = SolverParams()
    worst = {"min": 0.0, "max": 0.0}
    branches = {"convex": 0, "concave": 0, "flat": 0}
    bound_sets = [RobustnessBounds(), RobustnessBounds(0.01, 0.9), RobustnessBounds(0.2, 0.6)]
    for kind in branches:
        for i in range(per_branch):
            rng = _rng(5, list(branches).index(kind), i)
            v, ve = _reop_instance(rng, kind)
            A, B, C = _coefficients(v, ve)
            flat = abs(C[0]) <= params.hessian_tol * (A[0] + B[0])
            if (kind == "convex" and C[0] < 0 and not flat
                    or kind == "concave" and C[0] > 0 and not flat
                    or kind == "flat" and flat):
                branches[kind] += 1
            chan = ChannelRealization(v, ve, 0.15)
            b = bound_sets[i % len(bound_sets)]
            J = lambda a: orc.composed_power(v[:, 0], ve[:, 0], a)  # noqa: E731
            jmax, jmin = orc.grid_extrema(J, b.alpha_lo, b.alpha_hi, points)
            rmin = reop_worst_alpha_min(0, chan, b, params)
            rmax = reop_worst_alpha_max(0, chan, b, params)
            worst["min"] = max(worst["min"], (rmin.objective - jmin) / abs(jmin))
            worst["max"] = max(worst["max"], (jmax - rmax.objective) / abs(jmax))
    reports = [orc.OracleReport.make(f"reop_{k}_rel_gap", v, 3 * per_branch, 1e-4)
               for k, v in worst.items()]
    exercised = all(c == per_branch for c in branches.values())
    reports.append(orc.OracleReport.make("branches_not_exercised",
                                         0.0 if exercised else 1.0, 3 * per_branch, 0.0))
    return _finish(5, "REOP extrema vs 1e4-point grid", reports, t0, details=branches)


# -------------------------------------------------------------- criterion 6

TOY_NETWORK = NetworkConfig(num_aps=2, antennas_per_ap=4, num_ues=6, num_scheduled=3)


def criterion_6(seeds: int = 200, ratio: float = 0.90, fraction: float = 0.95,
                snr_db: float = 10.0, alpha: float = 0.15) -> CriterionResult:
    """RC-ESG against exhaustive search on a K=6, n=3, M=8 toy network."""
    t0 = time.perf_counter()
    link = LinkBudget.from_snr_db(snr_db)
    bounds, params = RobustnessBounds(), SolverParams()
    ratios = []
    for s in range(seeds):
        lsf = generate_lsf(TOY_NETWORK, s)
        H, He = generate_small_scale(8, 6, s)
        chan = compose_channel(lsf, H, He, alpha)
        mask = cluster_aps(lsf)
        out = rc_esg(chan, lsf, mask, bounds, link, params, 3)
        _, best = orc.exhaustive_schedule(chan, lsf, mask, link, 3)
        ratios.append(out.selected_rate / best)
    ratios = np.array(ratios)
    hit = float(np.mean(ratios >= ratio))
    details = {"fraction_within": hit, "min_ratio": float(ratios.min()),
               "median_ratio": float(np.median(ratios))}
    reports = [orc.OracleReport.make("fraction_below_90pct", 1.0 - hit, seeds, 1.0 - fraction)]
    return _finish(6, "RC-ESG optimality gap vs exhaustive search", reports, t0, details)


# -------------------------------------------------------------- criterion 7

def criterion_7(instances: int = 100) -> CriterionResult:
    """Midpoint convexity of the conditioned MSE and quadratic J along error directions."""
    t0 = time.perf_counter()
    worst_convex = 0.0
    worst_affine = 0.0
    for i in range(instances):
        rng = _rng(7, i)
        beta, mask = _random_instance(rng)
        M, n = beta.shape
        alpha = float(rng.uniform(0.05, 0.3))
        link = LinkBudget.from_snr_db(float(rng.uniform(0, 20)))
        G_hat = np.sqrt((1 - alpha) * beta) * mask * _cn(rng, (M, n))
        W = _unit_columns(rng, M, n)
        stats = ErrorStats(alpha * beta * mask, alpha)
        d1, d2 = rng.uniform(-1, 2, size=n), rng.uniform(-1, 2, size=n)
        f = lambda x: mse_conditioned(x, W, G_hat, stats, link)  # noqa: E731
        excess = f(0.5 * (d1 + d2)) - 0.5 * (f(d1) + f(d2))
        worst_convex = max(worst_convex, excess)

        # J along h_err + t u: its second difference must not depend on t
        b = beta[:, 0]
        h, he, u = _cn(rng, M), _cn(rng, M), _cn(rng, M)
        g = lambda t: orc.composed_power(np.sqrt(b) * h, np.sqrt(b) * (he + t * u), alpha)  # noqa: E731
        step = 0.5
        secs = [g(t + step) - 2 * g(t) + g(t - step) for t in np.linspace(-2, 2, 9)]
        worst_affine = max(worst_affine, orc.rel_err(np.array(secs), secs[0]))
    reports = [orc.OracleReport.make("midpoint_convexity_excess", worst_convex, instances, 1e-10),
               orc.OracleReport.make("second_difference_variation", worst_affine, instances, 1e-9)]
    return _finish(7, "convexity in d and affine-in-error structure", reports, t0)


# -------------------------------------------------------------- criterion 8

def criterion_8(instances: int = 50) -> CriterionResult:
    """ZF nulling, MMSE power exactness and split/scale round trips."""
    t0 = time.perf_counter()
    worst = {"zf_offdiag": 0.0, "mmse_power": 0.0, "split_roundtrip": 0.0,
             "scale_roundtrip": 0.0}
    net = NetworkConfig()
    params = SolverParams()
    for i in range(instances):
        rng = _rng(8, i)
        if i % 2 == 0:
            beta, mask = _random_instance(rng)
            G = np.sqrt(beta) * mask * _cn(rng, beta.shape)
        else:
            # scheduled subset of a full deployment under perfect CSI
            lsf = generate_lsf(net, i)
            H, He = generate_small_scale(net.num_antennas, net.num_ues, i)
            chan = compose_channel(lsf, H, He, 0.0)
            m = cluster_aps(lsf)
            S = c_esg(chan, lsf, m, LinkBudget.from_snr_db(10), params,
                      net.num_scheduled, "zf").selected
            G = mask_channel(chan, m, S).G
        link = LinkBudget.from_snr_db(float(rng.uniform(0, 20)),
                                      power_budget=float(rng.uniform(0.5, 4)))
        E = G.T @ zf_direction(G)
        off = E - np.diag(np.diag(E))
        worst["zf_offdiag"] = max(worst["zf_offdiag"],
                                  float(np.max(np.abs(off)) / np.max(np.abs(np.diag(E)))))
        P = mmse_precoder(G, link)
        worst["mmse_power"] = max(worst["mmse_power"],
                                  abs(P.power - link.power_budget) / link.power_budget)
        W, d = split_precoder(P.P)
        worst["split_roundtrip"] = max(worst["split_roundtrip"],
                                       float(np.max(np.abs(W * d - P.P)) / np.max(np.abs(P.P))))
        target = float(np.linalg.norm(P.P) ** 2)
        ds = power_scale(W, rng.uniform(0.1, 3.0) * d, target)
        worst["scale_roundtrip"] = max(worst["scale_roundtrip"],
                                       abs(np.linalg.norm(W * ds) ** 2 - target) / target,
                                       float(np.max(np.abs(ds - d)) / np.max(d)))
    tol = {"zf_offdiag": 1e-9, "mmse_power": 1e-9, "split_roundtrip": 1e-12,
           "scale_roundtrip": 1e-12}
    reports = [orc.OracleReport.make(k, v, instances, tol[k]) for k, v in worst.items()]
    return _finish(8, "ZF / MMSE / split-scale contracts", reports, t0)


# ----------------------------------------------------------- criteria 9-10

REFERENCE_NETWORK = NetworkConfig(num_aps=16, antennas_per_ap=4, num_ues=32, num_scheduled=16)
SNR_GRID = (0.0, 5.0, 10.0, 15.0, 20.0)


def _rows_by(rows):
    out = {}
    for r in rows:
        out.setdefault(r.pairing, {})[r.snr_db] = r
    return out


def criterion_9(trials: int = 200, alpha: float = 0.15, workers: int = 1) -> CriterionResult:
    """Scheduler ordering under imperfect CSI with MMSE and equal power."""
    t0 = time.perf_counter()
    rc = Pairing("rc_esg", "epl", "mmse", "imperfect", alpha)
    ce = Pairing("c_esg", "epl", "mmse", "imperfect", alpha)
    pc = Pairing("c_esg", "epl", "mmse", "perfect")
    spec = ExperimentSpec(ConfigBundle(network=REFERENCE_NETWORK), (rc, ce, pc), SNR_GRID,
                          trials, workers)
    rows = _rows_by(run_experiment(spec))
    gains, separated, ordered, pcsi_top = {}, True, True, True
    for s in SNR_GRID:
        a, b, c = rows[rc.id][s], rows[ce.id][s], rows[pc.id][s]
        gains[s] = 100.0 * (a.mean_sum_rate - b.mean_sum_rate) / b.mean_sum_rate
        ordered &= a.mean_sum_rate > b.mean_sum_rate
        separated &= a.mean_sum_rate - 3 * a.std_error > b.mean_sum_rate + 3 * b.std_error
        pcsi_top &= c.mean_sum_rate > max(a.mean_sum_rate, b.mean_sum_rate)
    details = {"gain_percent": gains,
               "rows": {p: {s: (r.mean_sum_rate, r.std_error) for s, r in v.items()}
                        for p, v in rows.items()},
               "ordered": ordered, "separated_3sigma": separated, "pcsi_above": pcsi_top}
    reports = [orc.OracleReport.make("rc_not_above_c", 0.0 if ordered else 1.0, trials, 0.0),
               orc.OracleReport.make("bands_overlap", 0.0 if separated else 1.0, trials, 0.0),
               orc.OracleReport.make("pcsi_not_on_top", 0.0 if pcsi_top else 1.0, trials, 0.0)]
    return _finish(9, "RC-ESG > C-ESG under imperfect CSI (MMSE, EPL)", reports, t0, details)


def criterion_10(trials: int = 200, alpha: float = 0.15, workers: int = 1) -> CriterionResult:
    """Robust allocators against GDPA with the ZF precoder."""
    t0 = time.perf_counter()
    pairs = {name: Pairing("rc_esg", name, "zf", "imperfect", alpha)
             for name in ("gdpa", "rgdpa", "wrgdpa")}
    spec = ExperimentSpec(ConfigBundle(network=REFERENCE_NETWORK), tuple(pairs.values()),
                          SNR_GRID, trials, workers)
    rows = _rows_by(run_experiment(spec))
    mean = {k: {s: rows[p.id][s].mean_sum_rate for s in SNR_GRID} for k, p in pairs.items()}
    ok_r = all(mean["rgdpa"][s] > mean["gdpa"][s] for s in SNR_GRID)
    ok_w = all(mean["wrgdpa"][s] > mean["gdpa"][s] for s in SNR_GRID)
    better = {s: ("wrgdpa" if mean["wrgdpa"][s] > mean["rgdpa"][s] else "rgdpa")
              for s in SNR_GRID}
    details = {"mean_sum_rate": mean,
               "std_error": {k: {s: rows[p.id][s].std_error for s in SNR_GRID}
                             for k, p in pairs.items()},
               "better_robust_allocator": better}
    reports = [orc.OracleReport.make("rgdpa_not_above_gdpa", 0.0 if ok_r else 1.0, trials, 0.0),
               orc.OracleReport.make("wrgdpa_not_above_gdpa", 0.0 if ok_w else 1.0, trials, 0.0)]
    return _finish(10, "WRGDPA and RGDPA > GDPA under imperfect CSI (ZF)", reports, t0, details)


# ------------------------------------------------------------- criterion 11

def criterion_11(seeds: int = 20, alpha: float = 0.15) -> CriterionResult:
    """Degenerate alpha interval and alpha = 0 equivalences."""
    t0 = time.perf_counter()
    params = SolverParams()
    net = REFERENCE_NETWORK
    mismatches = 0
    for s in range(seeds):
        lsf = generate_lsf(net, s)
        H, He = generate_small_scale(net.num_antennas, net.num_ues, s)
        chan = compose_channel(lsf, H, He, alpha)
        mask = cluster_aps(lsf)
        link = LinkBudget.from_snr_db(5.0 * (s % 5))
        for prec in ("mmse", "zf"):
            a = rc_esg(chan, lsf, mask, RobustnessBounds(alpha, alpha), link, params,
                       net.num_scheduled, prec)
            b = c_esg(chan, lsf, mask, link, params, net.num_scheduled, prec)
            mismatches += int(a.candidates != b.candidates or a.selected != b.selected)

    pairings = []
    for sched in ("c_esg", "rc_esg"):
        for alloc, prec in (("epl", "mmse"), ("gdpa", "zf"), ("rgdpa", "zf"), ("wrgdpa", "zf")):
            pairings += [Pairing(sched, alloc, prec, "perfect"),
                         Pairing(sched, alloc, prec, "imperfect", 0.0)]
    rows = run_experiment(ExperimentSpec(ConfigBundle(network=net), tuple(pairings),
                                         (0.0, 10.0, 20.0), 3))
    by = _rows_by(rows)
    unequal = 0
    for i in range(0, len(pairings), 2):
        p, q = by[pairings[i].id], by[pairings[i + 1].id]
        unequal += sum(p[s].mean_sum_rate != q[s].mean_sum_rate for s in p)
    reports = [orc.OracleReport.make("candidate_sequence_mismatches", mismatches, seeds * 2, 0.0),
               orc.OracleReport.make("alpha0_rate_mismatches", unequal, len(rows), 0.0)]
    return _finish(11, "degenerate-alpha equivalences", reports, t0)


# ------------------------------------------------------------- criterion 12

def criterion_12(repeats: int = 5) -> CriterionResult:
    """Growth of scheduler time in NL and allocator time in iters_d."""
    t0 = time.perf_counter()
    sched = bench_scheduler_antennas(num_aps=(4, 8, 16, 32, 64, 128), repeats=repeats)
    exponent, r2_sched = power_law_fit([t.value for t in sched], [t.seconds for t in sched])
    details = {"c_esg_times": {t.value: t.seconds for t in sched},
               "c_esg_exponent": exponent, "c_esg_fit_r2": r2_sched}
    dev = 0.0 if 2.5 <= exponent <= 3.5 else min(abs(exponent - 2.5), abs(exponent - 3.5))
    reports = [orc.OracleReport.make("c_esg_exponent_outside_2.5_3.5", dev, len(sched), 0.0)]
    for alg in ("gdpa", "rgdpa"):
        rows = bench_iterations(algorithm=alg, repeats=repeats)
        slope, r2 = linear_fit([t.value for t in rows], [t.seconds for t in rows])
        details[f"{alg}_r2"] = r2
        details[f"{alg}_seconds_per_iter"] = slope
        reports.append(orc.OracleReport.make(f"{alg}_one_minus_r2", 1.0 - r2, len(rows), 0.02))
    return _finish(12, "complexity scaling", reports, t0, details)


CRITERIA = {i: fn for i, fn in enumerate(
    [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
     criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12], start=1)}


def run_criteria(numbers=None):
    numbers = sorted(CRITERIA) if numbers is None else numbers
    return [CRITERIA[i]() for i in numbers]
