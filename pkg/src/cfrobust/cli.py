"""Command-line entry point: ``cfrobust run | verify | bench``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, replace

from .channel import cluster_aps, compose_channel, dump_channel, generate_lsf, generate_small_scale
from .errors import CFRobustError, ParseError, ValidationError
from .harness import (DEFAULT_SNR_GRID, ExperimentSpec, emit_results, parse_pairing,
                      run_experiment, trial_seed, with_seed)
from .model import apply_overrides, load_config_dict, read_raw, serialize

log = logging.getLogger("cfrobust")

DEFAULT_PAIRINGS = (
    "rc_esg:mmse:epl:imperfect",
    "c_esg:mmse:epl:imperfect",
    "c_esg:mmse:epl:perfect",
)
_EXPERIMENT_KEYS = {"snr_grid_db", "trials", "alpha", "pairings", "workers"}


def _experiment_section(raw: dict) -> dict:
    exp = raw.get("experiment", {})
    if not isinstance(exp, dict):
        raise ParseError("section 'experiment' must be a JSON object")
    unknown = set(exp) - _EXPERIMENT_KEYS
    if unknown:
        raise ValidationError(f"unknown key(s) in 'experiment': {sorted(unknown)}")
    return exp


def _build_spec(args) -> tuple[ExperimentSpec, float]:
    raw = read_raw(args.config) if args.config else {}
    if args.set:
        raw = apply_overrides(raw, args.set)
    exp = _experiment_section(raw)
    bundle = load_config_dict(raw)
    if args.seed is not None:
        bundle = with_seed(bundle, args.seed)
    if args.fixed_step:
        bundle = replace(bundle, solver=replace(bundle.solver, backtracking=False))

    alpha = float(exp.get("alpha", 0.15))
    texts = args.pairing or exp.get("pairings") or DEFAULT_PAIRINGS
    pairings = tuple(parse_pairing(t, alpha) for t in texts)
    snr = args.snr or exp.get("snr_grid_db") or DEFAULT_SNR_GRID
    trials = args.trials if args.trials is not None else int(exp.get("trials", 200))
    workers = args.workers if args.workers is not None else int(exp.get("workers", 1))
    return ExperimentSpec(bundle, pairings, tuple(snr), trials, workers), alpha


def _cmd_run(args) -> int:
    spec, alpha = _build_spec(args)
    if args.dump_channel:
        net = spec.bundle.network
        ts = trial_seed(net.seed, 0)
        lsf = generate_lsf(net, ts)
        H, He = generate_small_scale(net.num_antennas, net.num_ues, ts)
        dump_channel(args.dump_channel, lsf, compose_channel(lsf, H, He, alpha), cluster_aps(lsf))
    rows = run_experiment(spec)
    if args.out:
        emit_results(rows, args.format, args.out)
    else:
        if args.format == "json":
            print(json.dumps([asdict(r) for r in rows], indent=2))
        else:
            print("pairing,snr_db,mean_sum_rate,std_error,trials,wall_time_ms")
            for r in rows:
                print(f"{r.pairing},{r.snr_db:g},{r.mean_sum_rate:.6f},{r.std_error:.6f},"
                      f"{r.trials},{r.wall_time_ms:.1f}")
    return 0


def _cmd_verify(args) -> int:
    from .certificates import CRITERIA

    numbers = sorted(CRITERIA)
    if args.only:
        numbers = [int(x) for x in args.only.split(",")]
    results = []
    for i in numbers:
        res = CRITERIA[i]()
        print(res.line(), flush=True)
        results.append(res)
    if args.json:
        payload = [{"criterion": r.number, "title": r.title, "passed": r.passed,
                    "seconds": r.seconds, "reports": [asdict(x) for x in r.reports],
                    "details": r.details} for r in results]
        with open(args.json, "w") as fh:
            json.dump(payload, fh, indent=2, default=str)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


def _cmd_bench(args) -> int:
    from .bench import bench_scaling

    timings, fits = bench_scaling(quick=args.quick)
    print("algorithm,variable,value,seconds")
    for t in timings:
        print(f"{t.algorithm},{t.variable},{t.value:g},{t.seconds:.6g}")
    print()
    print("algorithm,variable,fit,coefficient,r2")
    for f in fits:
        print(f"{f.algorithm},{f.variable},{f.kind},{f.coefficient:.4g},{f.r2:.4f}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"timings": [asdict(t) for t in timings],
                       "fits": [asdict(f) for f in fits]}, fh, indent=2)
    return 0


def _cmd_config(args) -> int:
    raw = read_raw(args.config) if args.config else {}
    if args.set:
        raw = apply_overrides(raw, args.set)
    print(json.dumps(serialize(load_config_dict(raw)), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfrobust", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an SNR sweep and export mean sum-rates")
    run.add_argument("--config", help="JSON config file (see docs/config.md)")
    run.add_argument("--out", help="output file; stdout if omitted")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int, help="master seed (overrides network.seed)")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override a config key, e.g. network.num_ues=40")
    run.add_argument("--pairing", action="append", metavar="SCHED:PREC:ALLOC:CSI",
                     help="e.g. rc_esg:zf:wrgdpa:imperfect=0.1 (repeatable)")
    run.add_argument("--snr", type=float, nargs="+", help="SNR grid in dB")
    run.add_argument("--workers", type=int, help="worker processes for trials")
    run.add_argument("--fixed-step", action="store_true",
                     help="disable step backtracking in the power allocators")
    run.add_argument("--dump-channel", metavar="PATH",
                     help="write the first trial's channel snapshot as .npz")
    run.set_defaults(func=_cmd_run)

    ver = sub.add_parser("verify", help="run the acceptance certificates")
    ver.add_argument("--only", help="comma-separated criterion numbers")
    ver.add_argument("--json", help="write the oracle reports to this file")
    ver.set_defaults(func=_cmd_verify)

    ben = sub.add_parser("bench", help="wall-time scaling study")
    ben.add_argument("--quick", action="store_true", help="fewer timing repeats")
    ben.add_argument("--out", help="write timings and fits as JSON")
    ben.set_defaults(func=_cmd_bench)

    cfg = sub.add_parser("config", help="print the fully resolved config")
    cfg.add_argument("--config")
    cfg.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    cfg.set_defaults(func=_cmd_config)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"cfrobust: config error: {exc}", file=sys.stderr)
        return 2
    except CFRobustError as exc:
        print(f"cfrobust: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
