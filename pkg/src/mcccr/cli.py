"""Command-line front end: resample, evaluate, noise-sweep, report.

Long flags mirror the experiment-configuration keys one-to-one, so anything
expressible in a config file can be overridden on the command line. The
environment variable MCCCR_DATA_DIR supplies a default dataset directory.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import harness, report as report_mod
from .datasets import load_dataset, save_dataset
from .errors import McccrError
from .harness import (
    DEFAULT_NOISE_LEVELS, ExperimentConfig, Standardizer, apply_method,
    config_from_file,
)
from .noise import NoiseSpec


def _counts_line(dataset) -> str:
    counts = dataset.class_counts()
    return ", ".join(
        f"{dataset.label_name(c)}={counts[c]}" for c in range(dataset.n_classes)
    )


def _ratio_arg(value: str):
    if value == "balance":
        return "balance"
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"ratio must be a positive number or 'balance', got {value!r}"
        ) from None


def cmd_resample(args) -> int:
    dataset = load_dataset(args.input, args.format)
    print(f"class counts before: {_counts_line(dataset)}")
    params = {
        "energy": args.energy, "p": args.p, "ratio": args.ratio,
        "cleaning": args.cleaning, "selection": args.selection,
        "decomposition": args.decomposition, "k": args.k,
    }
    work = dataset
    scaler = None
    if args.standardize:
        scaler = Standardizer.fit(dataset.features)
        work = dataclasses.replace(dataset, features=scaler.transform(dataset.features))
    resampled = apply_method(args.method, params, work, args.seed)
    if scaler is not None:
        resampled = dataclasses.replace(
            resampled, features=scaler.inverse(resampled.features)
        )
    print(f"class counts after:  {_counts_line(resampled)}")
    out = Path(args.output)
    save_dataset(resampled, out, args.format or None)
    synthetic = resampled.synthetic if resampled.synthetic is not None \
        else np.zeros(resampled.n, bool)
    provenance = {
        "input": str(args.input),
        "method": args.method,
        "seed": args.seed,
        "synthetic_rows": [int(i) for i in np.flatnonzero(synthetic)],
        "counts_before": {dataset.label_name(c): int(n)
                          for c, n in enumerate(dataset.class_counts())},
        "counts_after": {resampled.label_name(c): int(n)
                         for c, n in enumerate(resampled.class_counts())},
    }
    sidecar = out.with_name(out.name + ".provenance.json")
    sidecar.write_text(json.dumps(provenance, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out} and {sidecar}")
    return 0


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    for key in ("seed", "outer_folds", "outer_repeats", "inner_folds",
                "selection_metric", "jobs", "output", "data_dir"):
        value = getattr(args, key, None)
        if value is not None:
            updates[key] = value
    if getattr(args, "standardize", None) is not None:
        updates["standardize"] = args.standardize
    return dataclasses.replace(config, **updates) if updates else config


def _write_reports(result, stem: str, timings: bool) -> list[Path]:
    written = []
    stem_path = Path(stem)
    stem_path.parent.mkdir(parents=True, exist_ok=True)
    for fmt in ("csv", "json"):
        path = stem_path.with_suffix(f".{fmt}")
        report_mod.emit_report(result, path, fmt, include_timings=False)
        written.append(path)
    if timings:
        path = stem_path.with_suffix(".timings.csv")
        report_mod.emit_report(result, path, "csv", include_timings=True)
        written.append(path)
    return written


def cmd_evaluate(args) -> int:
    config = _apply_overrides(config_from_file(args.config), args)
    if args.dry_run:
        print(json.dumps(harness.plan(config), indent=2))
        return 0
    result = harness.run_experiment(config)
    if not result.records:
        print("no cells completed; see skip records", file=sys.stderr)
        for skip in result.skips[:10]:
            print(f"  {skip.dataset}/{skip.method}: {skip.reason}", file=sys.stderr)
        return 1
    stem = config.output or "report"
    written = _write_reports(result, stem, args.timings)
    if result.skips:
        print(f"{len(result.skips)} cells skipped "
              f"(see {Path(stem).with_suffix('.skips.csv')})")
    print(report_mod.format_rank_table(result, config.selection_metric))
    print("wrote " + ", ".join(str(p) for p in written))
    return 0


def cmd_noise_sweep(args) -> int:
    config = _apply_overrides(config_from_file(args.config), args)
    levels = DEFAULT_NOISE_LEVELS if args.levels is None else tuple(
        float(x) for x in args.levels.split(",") if x.strip() != ""
    )
    config = dataclasses.replace(
        config, noise=[NoiseSpec(level) for level in levels]
    )
    if args.dry_run:
        print(json.dumps(harness.plan(config), indent=2))
        return 0
    result = harness.run_experiment(config)
    if not result.records:
        print("no cells completed; see skip records", file=sys.stderr)
        return 1
    stem = config.output or "noise_sweep"
    written = _write_reports(result, stem, args.timings)
    sweep_rows = report_mod.aggregate(result, by_noise=True)
    sweep_path = Path(stem).with_suffix(".sweep.csv")
    with open(sweep_path, "w") as fh:
        fh.write("dataset,method,noise_level,avacc,cba,mgm,cen,cells\n")
        for row in sweep_rows:
            fh.write(
                f"{row['dataset']},{row['method']},{row['noise_level']!r},"
                f"{row['avacc']!r},{row['cba']!r},{row['mgm']!r},{row['cen']!r},"
                f"{row['cells']}\n"
            )
    written.append(sweep_path)
    for method in sorted({r["method"] for r in sweep_rows}):
        per_level = [r for r in sweep_rows if r["method"] == method]
        means = {}
        for r in per_level:
            means.setdefault(r["noise_level"], []).append(r[config.selection_metric])
        line = "  ".join(
            f"{level:.2f}:{np.mean(vals):.4f}" for level, vals in sorted(means.items())
        )
        print(f"{config.selection_metric} vs noise [{method}]: {line}")
    print("wrote " + ", ".join(str(p) for p in written))
    return 0


def cmd_report(args) -> int:
    result = report_mod.load_report(args.report)
    if not result.records:
        print("report holds no records", file=sys.stderr)
        return 1
    print(report_mod.format_rank_table(result, args.metric))
    if args.output:
        rows = report_mod.aggregate(result)
        with open(args.output, "w") as fh:
            fh.write("dataset,method,avacc,cba,mgm,cen,cells\n")
            for row in rows:
                fh.write(
                    f"{row['dataset']},{row['method']},{row['avacc']!r},"
                    f"{row['cba']!r},{row['mgm']!r},{row['cen']!r},{row['cells']}\n"
                )
        print(f"wrote {args.output}")
    return 0


def _add_eval_flags(sub):
    sub.add_argument("config", help="experiment configuration file (YAML or JSON)")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--outer-folds", dest="outer_folds", type=int)
    sub.add_argument("--outer-repeats", dest="outer_repeats", type=int)
    sub.add_argument("--inner-folds", dest="inner_folds", type=int)
    sub.add_argument("--selection-metric", dest="selection_metric",
                     choices=harness.SELECTION_METRICS)
    sub.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=None)
    sub.add_argument("--jobs", type=int)
    sub.add_argument("--output", help="report path stem (.csv/.json appended)")
    sub.add_argument("--data-dir", dest="data_dir")
    sub.add_argument("--timings", action="store_true",
                     help="also write a .timings.csv with wall-clock columns")
    sub.add_argument("--dry-run", action="store_true",
                     help="print the cell plan without executing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcccr",
        description="Energy-based cleaning and resampling for multi-class "
        "imbalanced data, with an evaluation harness.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("resample", help="resample one dataset file")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("keel", "csv"))
    p.add_argument("--method", required=True, choices=harness.METHOD_NAMES)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--energy", type=float, default=0.5)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--ratio", type=_ratio_arg, default="balance")
    p.add_argument("--cleaning", default="translation",
                   choices=("translation", "removal", "ignoring"))
    p.add_argument("--selection", default="proportional",
                   choices=("proportional", "random"))
    p.add_argument("--decomposition", default="sampling",
                   choices=("sampling", "complete"))
    p.add_argument("--k", type=int, default=5, help="SMOTE neighbor count")
    p.add_argument("--standardize", action="store_true",
                   help="resample in standardized space, write back in input units")
    p.set_defaults(func=cmd_resample)

    p = subs.add_parser("evaluate", help="run a cross-validated experiment")
    _add_eval_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = subs.add_parser("noise-sweep", help="run the experiment across noise levels")
    _add_eval_flags(p)
    p.add_argument("--levels", help="comma-separated noise levels "
                   "(default 0,0.05,0.1,0.15,0.2,0.25)")
    p.set_defaults(func=cmd_noise_sweep)

    p = subs.add_parser("report", help="aggregate an existing report into a rank table")
    p.add_argument("report")
    p.add_argument("--metric", default="cba", choices=report_mod.METRIC_NAMES)
    p.add_argument("--output", help="write the aggregate table as CSV")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except McccrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
