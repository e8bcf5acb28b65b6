"""Command-line entry point: ``hawkes-exact <subcommand> [options]``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import DEFAULT_SEED, ExperimentConfig, config_from_dict, load_config
from .errors import HawkesExactError
from .experiments import (HAWKES_COLUMNS, MIXING_COLUMNS, QUEUE_COLUMNS, cost_table,
                          run_mixing, run_sample_hawkes, run_sample_queue)
from .io import write_rows
from .validate import run_validation

log = logging.getLogger("hawkes_exact")

DEFAULT_MODEL = {"lambda0": 1.0, "h1": 0.5, "birth": {"kind": "exponential", "rate": 2.0},
                "service": {"kind": "exponential", "rate": 3.0}, "eta": 0.2}


def _summary_path(out: Path) -> Path:
    return out.with_name(out.stem + ".summary.json")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _emit(result, columns, cfg: ExperimentConfig, out: Optional[str]) -> None:
    summary = dict(result.summary, model=cfg.model_dict(), seed=cfg.seed,
                   replications=cfg.replications)
    if out:
        path = write_rows(out, result.rows, columns, cfg.format)
        with open(_summary_path(path), "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")
        log.info("wrote %s and %s", path, _summary_path(path))
    print(json.dumps(summary, indent=2, sort_keys=True, default=_json_default))


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else config_from_dict(dict(DEFAULT_MODEL))
    return cfg.with_overrides(seed=args.seed, replications=args.reps, output=args.out,
                              format=args.format, jobs=args.jobs,
                              eta=_parse_eta(args.eta) if args.eta is not None else None)


def _parse_eta(text: str):
    return text if text == "auto" else float(text)


def cmd_sample_hawkes(args) -> int:
    cfg = _load(args)
    _emit(run_sample_hawkes(cfg), HAWKES_COLUMNS, cfg, cfg.output)
    return 0


def cmd_sample_queue(args) -> int:
    cfg = _load(args)
    _emit(run_sample_queue(cfg), QUEUE_COLUMNS, cfg, cfg.output)
    return 0


def cmd_mixing(args) -> int:
    cfg = _load(args)
    _emit(run_mixing(cfg), MIXING_COLUMNS, cfg, cfg.output)
    return 0


def cmd_cost(args) -> int:
    cfg = _load(args)
    etas = [float(x) for x in args.grid.split(",")] if args.grid else None
    rows = cost_table(cfg.hawkes, etas, n=args.points)
    if cfg.output:
        write_rows(cfg.output, rows, ["eta", "cost"], cfg.format)
    for r in rows:
        print(f"{r['eta']:.6g}\t{r['cost']:.6g}")
    return 0


def cmd_validate(args) -> int:
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    results = run_validation(seed, scale=args.scale, perturb_eta=args.perturb_eta,
                             only=args.suite or None)
    report = {"seed": seed, "scale": args.scale, "perturb_eta": args.perturb_eta,
              "passed": all(r.passed for r in results),
              "suites": [r.to_dict() for r in results]}
    text = json.dumps(report, indent=2, default=_json_default)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name} n={r.n} p={r.p_value} stat={r.statistic}", file=sys.stderr)
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hawkes-exact",
                                     description="Exact sampling for Hawkes processes and Hawkes/GI/1 queues")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, reps=True):
        p.add_argument("--config", help="JSON model/experiment config")
        p.add_argument("--seed", type=int)
        if reps:
            p.add_argument("--reps", type=int, help="number of replications")
        p.add_argument("--out", help="output file")
        p.add_argument("--format", choices=["csv", "jsonl"])
        p.add_argument("--jobs", type=int, help="worker processes")
        p.add_argument("--eta", help="birth-time tilt for the N0 sampler, or 'auto'")

    p = sub.add_parser("sample-hawkes", help="stationary Hawkes windows and N0 sampler cost")
    common(p)
    p.set_defaults(func=cmd_sample_hawkes)

    p = sub.add_parser("sample-queue", help="exact stationary waiting-time draws")
    common(p)
    p.set_defaults(func=cmd_sample_queue)

    p = sub.add_parser("mixing", help="E[W(T)] from empty start vs exact draws and T_ps")
    common(p)
    p.set_defaults(func=cmd_mixing)

    p = sub.add_parser("cost", help="expected N0 sampler cost over a tilt grid")
    common(p, reps=False)
    p.set_defaults(reps=None)
    p.add_argument("--grid", help="comma-separated tilts (default: evenly spaced feasible grid)")
    p.add_argument("--points", type=int, default=20)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("validate", help="run the cross-oracle validation suites")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--scale", type=float, default=1.0, help="multiply suite sample sizes")
    p.add_argument("--perturb-eta", type=float, default=0.0,
                   help="negative control: draw N0 candidate ages at eta*(1+x)")
    p.add_argument("--suite", action="append", help="run only the named suite (repeatable)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except HawkesExactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
