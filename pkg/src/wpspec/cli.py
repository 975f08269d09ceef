"""Command-line interface: ``wpspec {generate,estimate,run,sweep,compare}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__, io
from .experiment import (
    SWEEP_PARAMETERS,
    ExperimentConfig,
    ExperimentError,
    run_experiment,
    sweep,
)
from .metrics import compare
from .signals import save_signal_csv

log = logging.getLogger("wpspec")


def _add_config_flags(p: argparse.ArgumentParser, with_estimators: bool = True) -> None:
    p.add_argument("--config", help="JSON config file or a previous manifest.json; flags override it")
    p.add_argument("--scenario", help="SingleTone, PartialBand or Custom")
    p.add_argument("--length", type=int, help="number of samples (>= 64)")
    p.add_argument("--seed", type=int, help="unsigned RNG seed")
    p.add_argument(
        "--band",
        action="append",
        help="[source|pass|stop:]lo,hi in normalized frequency; repeatable",
    )
    p.add_argument("--tone", type=float, help="tone frequency nu0 for SingleTone (default 0.5)")
    p.add_argument("--noise-power", type=float, help="additive white-noise power (default 0)")
    p.add_argument("--input", help="signal CSV for the Custom scenario")
    if with_estimators:
        p.add_argument(
            "--estimator",
            action="append",
            help="method:key=val,... with method in periodogram, welch, bt, mtse, wp; repeatable",
        )
        p.add_argument("--baseline", help="estimator label used as the comparison baseline")


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    base = {}
    if getattr(args, "config", None):
        base = ExperimentConfig.from_dict(io.read_json(args.config)).to_dict()
    overrides = {
        "scenario": args.scenario,
        "length": args.length,
        "seed": args.seed,
        "bands": tuple(args.band) if args.band else None,
        "tone": args.tone,
        "noise_power": args.noise_power,
        "input": args.input,
        "estimators": tuple(getattr(args, "estimator", None) or ()) or None,
        "baseline": getattr(args, "baseline", None),
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    if args.input and not args.scenario:
        base.setdefault("scenario", "custom")
    return ExperimentConfig.from_dict(base)


def _cmd_generate(args) -> int:
    config = build_config(args)
    signal = config.build_signal()
    out = Path(args.out or "signal.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    save_signal_csv(signal, out)
    print(f"wrote {signal.length} samples ({signal.source_desc}) to {out}")
    return 0


def _cmd_estimate(args) -> int:
    config = build_config(args)
    if not config.estimators:
        raise ExperimentError("need at least one --estimator")
    signal = config.build_signal()
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    estimates = {}
    for spec in config.estimators:
        try:
            estimates[spec.label] = spec.run(signal)
        except ValueError as exc:
            raise ExperimentError(f"estimator {spec.label} ({spec.to_text()}): {exc}") from exc
    for label, est in estimates.items():
        io.write_estimate_csv(est, out / f"psd_{label}.csv")
        io.write_estimate_json(est, out / f"psd_{label}.json")
        print(f"{label}: integral={est.integral():.6g} -> {out / f'psd_{label}.csv'}")
    return 0


def _cmd_run(args) -> int:
    config = build_config(args)
    result = run_experiment(config, args.out or "wpspec-out")
    print(result.comparison.to_text(), end="")
    print(f"wrote {len(result.files)} files to {args.out or 'wpspec-out'}")
    return 0


def _parse_values(text: str) -> list:
    out = []
    for v in text.split(","):
        v = v.strip()
        if v:
            out.append(int(v) if v.lstrip("-").isdigit() else float(v))
    return out


def _cmd_sweep(args) -> int:
    config = build_config(args)
    values = _parse_values(args.values)
    if not values:
        raise ExperimentError("--values needs at least one value")
    out = args.out or "wpspec-sweep"
    sweep(config, args.parameter, values, out)
    print(f"swept {args.parameter} over {values}; summary in {Path(out) / 'sweep_summary.csv'}")
    return 0


def _cmd_compare(args) -> int:
    reports = [io.read_report(p) for p in args.metrics]
    baseline = args.baseline
    if baseline is None:
        baseline = reports[0].estimator_desc
    else:
        # accept either an estimator_desc or a file given on the command line
        for path, r in zip(args.metrics, reports):
            if baseline in (str(path), Path(path).name):
                baseline = r.estimator_desc
    try:
        table = compare(reports, baseline)
    except ValueError as exc:
        raise ExperimentError(str(exc)) from exc
    print(table.to_text(), end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        io.write_comparison(table, out / "comparison.txt", out / "comparison.json")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wpspec", description=__doc__)
    parser.add_argument("--version", action="version", version=f"wpspec {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a source signal to CSV")
    _add_config_flags(p, with_estimators=False)
    p.add_argument("--out", help="output CSV path (default signal.csv)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("estimate", help="run estimators on a signal and write PSD files")
    _add_config_flags(p)
    p.add_argument("--out", help="output directory (default .)")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("run", help="full experiment: estimates, metrics, comparison, manifest")
    _add_config_flags(p)
    p.add_argument("--out", help="bundle directory; must not exist or be empty")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="repeat an experiment over one parameter")
    _add_config_flags(p)
    p.add_argument("--parameter", required=True, choices=sorted(SWEEP_PARAMETERS))
    p.add_argument("--values", required=True, help="comma-separated values, e.g. 4,5,6")
    p.add_argument("--out", help="sweep directory; must not exist or be empty")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("compare", help="grade metrics JSON files against a baseline")
    p.add_argument("metrics", nargs="+", help="metrics_*.json files")
    p.add_argument("--baseline", help="estimator_desc or file of the baseline (default: first file)")
    p.add_argument("--out", help="directory for comparison.txt/json")
    p.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ExperimentError, ValueError, OSError) as exc:
        print(f"wpspec {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
