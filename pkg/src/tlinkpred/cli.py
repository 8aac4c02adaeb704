"""Command-line driver: ``eval``, ``sweep`` and ``stats``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys

from .graph_stream import load_dataset, split_stats
from .harness import ConfigError, RunConfig, SweepGrid, emit_report, format_reports, load_grid_file, run_eval, run_sweep


def _ratios(text: str) -> tuple[float, float, float]:
    parts = tuple(float(x) for x in text.split(","))
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated ratios, got {text!r}")
    return parts


def _weights(text: str) -> tuple[float, float, float]:
    parts = tuple(float(x) for x in text.split(","))
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected alpha,beta,delta, got {text!r}")
    return parts


def _metrics(text: str) -> tuple[str, ...]:
    return tuple(m.strip() for m in text.split(",") if m.strip())


# (flag, RunConfig field, type)
_RUN_FLAGS = [
    ("--dataset", "dataset", str),
    ("--model", "model", str),
    ("--scheme", "scheme", str),
    ("--weights", "weights", _weights),
    ("--span", "span", float),
    ("--lambda", "lam", float),
    ("--tw", "tw", float),
    ("--tau-p", "tau_p", float),
    ("--k", "k", int),
    ("--batch", "batch_size", int),
    ("--neg", "neg", str),
    ("--n-neg", "n_neg", int),
    ("--seed", "seed", int),
    ("--split", "split", _ratios),
    ("--metrics", "metrics", _metrics),
    ("--ties", "ties", str),
    ("--workers", "workers", int),
]

_HELP = {
    "dataset": "edge-list CSV, or a directory with train.csv/val.csv/test.csv",
    "model": "edgebank | poptrack | tcomem | base3 | cn | pa",
    "scheme": "uniform | eb_conf | multi_conf (base3 only)",
    "weights": "manual alpha,beta,delta overriding --scheme (base3 only)",
    "span": "EdgeBank memory span as a fraction of train duration; 1.0 = unlimited",
    "lam": "t-CoMem co-occurrence weight",
    "tw": "t-CoMem time window, raw timestamp units",
    "tau_p": "PopTrack decay constant (default: --tw)",
    "k": "PopTrack top-K size",
    "batch_size": "update/scoring batch size",
    "neg": "random | historical | inductive | file:PATH[,PATH...]",
    "n_neg": "negatives per positive",
    "seed": "negative-sampling seed",
    "split": "train,val,test ratios for single-file datasets",
    "metrics": "comma-separated subset of mrr,auroc",
    "ties": "tie handling for reciprocal rank: mid | optimistic | pessimistic",
    "workers": "threads scoring the queries of one batch",
}


def _add_run_flags(parser: argparse.ArgumentParser, require_dataset: bool) -> None:
    defaults = RunConfig(dataset="")
    for flag, name, typ in _RUN_FLAGS:
        default = getattr(defaults, name)
        help_text = _HELP[name] if name == "dataset" else f"{_HELP[name]} (default: {default})"
        parser.add_argument(
            flag, dest=name, type=typ, default=None, help=help_text,
            required=require_dataset and name == "dataset",
        )


def _config_from(args: argparse.Namespace, base: dict | None = None) -> RunConfig:
    values = dict(base or {})
    for _, name, _ in _RUN_FLAGS:
        v = getattr(args, name)
        if v is not None:
            values[name] = v
    for key in ("weights", "split", "metrics"):
        if isinstance(values.get(key), list):
            values[key] = tuple(values[key])
    if not values.get("dataset"):
        raise ConfigError("no dataset given (use --dataset or a [base] dataset entry)")
    unknown = set(values) - {f.name for f in dataclasses.fields(RunConfig)}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**values).validate()


def _cmd_eval(args) -> int:
    config = _config_from(args)
    report = run_eval(config)
    if args.out:
        emit_report([report], args.out, args.format, args.timing)
    else:
        sys.stdout.write(format_reports([report], args.format, args.timing))
    return 0


def _cmd_sweep(args) -> int:
    if args.grid:
        grid, base = load_grid_file(args.grid)
    else:
        grid, base = SweepGrid.wiki_ablation(), {}
    config = _config_from(args, base)
    reports = run_sweep(grid, config)
    os.makedirs(args.out, exist_ok=True)
    emit_report(reports, os.path.join(args.out, "sweep.csv"), "csv", args.timing)
    emit_report(reports, os.path.join(args.out, "sweep.json"), "json", args.timing)
    failed = sum(r.error is not None for r in reports)
    print(f"{len(reports)} grid points written to {args.out} ({failed} failed)", file=sys.stderr)
    return 0


def _cmd_stats(args) -> int:
    split = load_dataset(args.dataset, args.split)
    stats = dataclasses.asdict(split_stats(split))
    stats["split_sizes"] = [len(split.train), len(split.val), len(split.test)]
    print(json.dumps(stats, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tlinkpred", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one model on one dataset")
    _add_run_flags(p_eval, require_dataset=True)
    p_eval.add_argument("--out", help="report path (stdout when omitted)")
    p_eval.add_argument("--format", choices=("json", "csv"), default="json")
    p_eval.add_argument("--timing", action="store_true", help="include wall-clock seconds (breaks byte-reproducibility)")
    p_eval.set_defaults(func=_cmd_eval)

    p_sweep = sub.add_parser("sweep", help="run a hyperparameter grid")
    p_sweep.add_argument("--grid", help="TOML file with [grid] lists and optional [base] settings "
                         "(default: the 24-point wiki ablation grid)")
    p_sweep.add_argument("--out", required=True, help="output directory for sweep.csv and sweep.json")
    p_sweep.add_argument("--timing", action="store_true")
    _add_run_flags(p_sweep, require_dataset=False)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_stats = sub.add_parser("stats", help="print dataset statistics including surprise")
    p_stats.add_argument("--dataset", required=True)
    p_stats.add_argument("--split", type=_ratios, default=(0.70, 0.15, 0.15))
    p_stats.set_defaults(func=_cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
