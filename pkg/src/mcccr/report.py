"""Experiment records, their CSV/JSON serialization, and aggregation.

The CSV column order is fixed: dataset, method, noise_level, noise_classes,
repeat, fold, params, avacc, cba, mgm, cen, warnings, and, when timings are
included, resample_seconds, total_seconds. ``params``, ``noise_classes`` and
``warnings`` cells hold compact JSON so every value round-trips losslessly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import McccrError
from .metrics import mean_ranks

BASE_COLUMNS = [
    "dataset", "method", "noise_level", "noise_classes", "repeat", "fold",
    "params", "avacc", "cba", "mgm", "cen", "warnings",
]
TIMING_COLUMNS = ["resample_seconds", "total_seconds"]
METRIC_NAMES = ("avacc", "cba", "mgm", "cen")


@dataclass
class ExperimentRecord:
    dataset: str
    method: str
    noise_level: float
    noise_classes: tuple[int, ...] | None
    repeat: int
    fold: int
    params: dict
    avacc: float
    cba: float
    mgm: float
    cen: float
    warnings: list[str] = field(default_factory=list)
    resample_seconds: float | None = None
    total_seconds: float | None = None


@dataclass
class SkipRecord:
    dataset: str
    method: str
    noise_level: float
    noise_classes: tuple[int, ...] | None
    repeat: int
    fold: int
    reason: str


@dataclass
class ExperimentReport:
    records: list[ExperimentRecord] = field(default_factory=list)
    skips: list[SkipRecord] = field(default_factory=list)

    def sort(self):
        def key(r):
            return (r.dataset, r.noise_level, r.noise_classes or (), r.repeat, r.fold, r.method)
        self.records.sort(key=key)
        self.skips.sort(key=lambda s: (s.dataset, s.noise_level, s.noise_classes or (),
                                       s.repeat, s.fold, s.method))
        return self


def _record_to_row(r: ExperimentRecord, timings: bool) -> list[str]:
    row = [
        r.dataset,
        r.method,
        repr(float(r.noise_level)),
        json.dumps(list(r.noise_classes)) if r.noise_classes is not None else "",
        str(r.repeat),
        str(r.fold),
        json.dumps(r.params, sort_keys=True),
        repr(float(r.avacc)),
        repr(float(r.cba)),
        repr(float(r.mgm)),
        repr(float(r.cen)),
        json.dumps(r.warnings),
    ]
    if timings:
        row.append("" if r.resample_seconds is None else repr(float(r.resample_seconds)))
        row.append("" if r.total_seconds is None else repr(float(r.total_seconds)))
    return row


def _row_to_record(row: dict) -> ExperimentRecord:
    return ExperimentRecord(
        dataset=row["dataset"],
        method=row["method"],
        noise_level=float(row["noise_level"]),
        noise_classes=tuple(json.loads(row["noise_classes"])) if row["noise_classes"] else None,
        repeat=int(row["repeat"]),
        fold=int(row["fold"]),
        params=json.loads(row["params"]),
        avacc=float(row["avacc"]),
        cba=float(row["cba"]),
        mgm=float(row["mgm"]),
        cen=float(row["cen"]),
        warnings=json.loads(row["warnings"]),
        resample_seconds=float(row["resample_seconds"])
        if row.get("resample_seconds") else None,
        total_seconds=float(row["total_seconds"]) if row.get("total_seconds") else None,
    )


def emit_report(report: ExperimentReport, path, format: str | None = None,
                include_timings: bool = True) -> None:
    """Write a report to CSV or JSON (by extension when format is omitted)."""
    if not report.records and not report.skips:
        raise McccrError("refusing to emit an empty report")
    path = Path(path)
    fmt = format or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt == "json":
        payload = {
            "records": [_json_record(r, include_timings) for r in report.records],
            "skips": [asdict(s) for s in report.skips],
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return
    if fmt != "csv":
        raise McccrError(f"unknown report format {fmt!r}")
    columns = BASE_COLUMNS + (TIMING_COLUMNS if include_timings else [])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in report.records:
        writer.writerow(_record_to_row(r, include_timings))
    path.write_text(buf.getvalue())
    if report.skips:
        skip_path = path.with_suffix(".skips.csv")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dataset", "method", "noise_level", "noise_classes",
                         "repeat", "fold", "reason"])
        for s in report.skips:
            writer.writerow([
                s.dataset, s.method, repr(float(s.noise_level)),
                json.dumps(list(s.noise_classes)) if s.noise_classes is not None else "",
                str(s.repeat), str(s.fold), s.reason,
            ])
        skip_path.write_text(buf.getvalue())


def _json_record(r: ExperimentRecord, include_timings: bool) -> dict:
    d = asdict(r)
    d["noise_classes"] = list(r.noise_classes) if r.noise_classes is not None else None
    if not include_timings:
        d.pop("resample_seconds")
        d.pop("total_seconds")
    return d


def load_report(path, format: str | None = None) -> ExperimentReport:
    path = Path(path)
    fmt = format or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt == "json":
        payload = json.loads(path.read_text())
        records = []
        for d in payload["records"]:
            d = dict(d)
            if d.get("noise_classes") is not None:
                d["noise_classes"] = tuple(d["noise_classes"])
            d.setdefault("resample_seconds", None)
            d.setdefault("total_seconds", None)
            records.append(ExperimentRecord(**d))
        skips = []
        for d in payload.get("skips", []):
            d = dict(d)
            if d.get("noise_classes") is not None:
                d["noise_classes"] = tuple(d["noise_classes"])
            skips.append(SkipRecord(**d))
        return ExperimentReport(records, skips)
    records = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(_row_to_record(row))
    skips = []
    skip_path = path.with_suffix(".skips.csv")
    if skip_path.exists():
        with open(skip_path, newline="") as fh:
            for row in csv.DictReader(fh):
                skips.append(SkipRecord(
                    dataset=row["dataset"], method=row["method"],
                    noise_level=float(row["noise_level"]),
                    noise_classes=tuple(json.loads(row["noise_classes"]))
                    if row["noise_classes"] else None,
                    repeat=int(row["repeat"]), fold=int(row["fold"]),
                    reason=row["reason"],
                ))
    return ExperimentReport(records, skips)


def aggregate(report: ExperimentReport, by_noise: bool = False) -> list[dict]:
    """Mean metrics per dataset and method (optionally split by noise level)."""
    groups: dict[tuple, list[ExperimentRecord]] = {}
    for r in report.records:
        key = (r.dataset, r.method, r.noise_level) if by_noise else (r.dataset, r.method)
        groups.setdefault(key, []).append(r)
    rows = []
    for key in sorted(groups, key=lambda k: tuple(str(x) for x in k)):
        recs = groups[key]
        row = {"dataset": key[0], "method": key[1]}
        if by_noise:
            row["noise_level"] = key[2]
        for name in METRIC_NAMES:
            row[name] = float(np.mean([getattr(r, name) for r in recs]))
        row["cells"] = len(recs)
        rows.append(row)
    return rows


def rank_table(report: ExperimentReport, metric: str = "cba"):
    """Dataset-by-method score matrix for one metric plus average ranks.

    Returns (method names, dataset names, score matrix, rank vector); CEN
    ranks are computed lower-is-better.
    """
    if metric not in METRIC_NAMES:
        raise McccrError(f"unknown metric {metric!r}")
    rows = aggregate(report)
    methods = sorted({r["method"] for r in rows})
    datasets = sorted({r["dataset"] for r in rows})
    matrix = np.full((len(datasets), len(methods)), np.nan)
    for r in rows:
        matrix[datasets.index(r["dataset"]), methods.index(r["method"])] = r[metric]
    if np.isnan(matrix).any():
        raise McccrError("rank table needs every dataset x method cell filled")
    ranks = mean_ranks(matrix, higher_is_better=metric != "cen")
    return methods, datasets, matrix, ranks


def format_rank_table(report: ExperimentReport, metric: str = "cba") -> str:
    methods, datasets, matrix, ranks = rank_table(report, metric)
    name_w = max(len("dataset"), max(len(d) for d in datasets), len("Avg. rank"))
    col_w = max(10, max(len(m) for m in methods) + 2)
    lines = [f"{metric} per dataset and method"]
    header = "dataset".ljust(name_w) + "".join(m.rjust(col_w) for m in methods)
    lines.append(header)
    lines.append("-" * len(header))
    for i, d in enumerate(datasets):
        lines.append(d.ljust(name_w)
                     + "".join(f"{matrix[i, j]:.4f}".rjust(col_w) for j in range(len(methods))))
    lines.append("-" * len(header))
    lines.append("Avg. rank".ljust(name_w)
                 + "".join(f"{ranks[j]:.2f}".rjust(col_w) for j in range(len(methods))))
    return "\n".join(lines)
