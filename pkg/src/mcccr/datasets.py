"""Labeled datasets and the KEEL / CSV readers and writers.

A dataset is a dense float matrix plus integer labels 0..M-1. Label ids are
assigned by first appearance in the data file; the original label strings are
kept in ``class_names`` so files can be written back with their input labels.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DatasetFormatError, McccrError


@dataclass
class LabeledDataset:
    features: np.ndarray            # (n, m) float64
    labels: np.ndarray              # (n,) int64, values in 0..n_classes-1
    class_names: list[str] | None = None
    n_classes: int = 0              # fixed class-id space, may exceed observed labels
    synthetic: np.ndarray | None = None  # (n,) bool, rows added by a resampler

    def __post_init__(self):
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        if self.features.ndim != 2:
            raise McccrError(f"features must be 2-D, got shape {self.features.shape}")
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.ndim != 1 or len(self.labels) != len(self.features):
            raise McccrError(
                f"labels length {len(self.labels)} does not match {len(self.features)} rows"
            )
        if self.n_classes == 0:
            self.n_classes = int(self.labels.max()) + 1 if len(self.labels) else 0
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise McccrError(
                f"labels must lie in 0..{self.n_classes - 1}, "
                f"got range {self.labels.min()}..{self.labels.max()}"
            )
        if not np.isfinite(self.features).all():
            raise McccrError("features contain NaN or infinity")
        if self.synthetic is not None:
            self.synthetic = np.asarray(self.synthetic, dtype=bool)
            if self.synthetic.shape != self.labels.shape:
                raise McccrError("synthetic mask length does not match dataset")

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def subset(self, indices) -> "LabeledDataset":
        idx = np.asarray(indices)
        return LabeledDataset(
            self.features[idx],
            self.labels[idx],
            class_names=self.class_names,
            n_classes=self.n_classes,
            synthetic=None if self.synthetic is None else self.synthetic[idx],
        )

    def label_name(self, class_id: int) -> str:
        if self.class_names is not None and class_id < len(self.class_names):
            return self.class_names[class_id]
        return str(class_id)


def detect_format(path) -> str:
    return "csv" if Path(path).suffix.lower() == ".csv" else "keel"


def load_dataset(path, format: str | None = None) -> LabeledDataset:
    """Read a dataset from a KEEL-style @-header file or a CSV file.

    CSV: the final column is the label; a header row is auto-detected (any
    first row whose feature cells do not all parse as numbers). KEEL: the
    attribute named by ``@outputs`` (default: last declared) is the label;
    nominal feature attributes are encoded by their declaration order.
    """
    path = Path(path)
    fmt = format or detect_format(path)
    if fmt not in ("keel", "csv"):
        raise McccrError(f"unknown dataset format {fmt!r}")
    try:
        text = path.read_text()
    except OSError as exc:
        raise McccrError(f"cannot read dataset file {path}: {exc}") from exc
    if fmt == "csv":
        return _parse_csv(text, path)
    return _parse_keel(text, path)


def _encode_labels(raw_labels: list[str]) -> tuple[np.ndarray, list[str]]:
    names: list[str] = []
    index: dict[str, int] = {}
    out = np.empty(len(raw_labels), dtype=np.int64)
    for i, tok in enumerate(raw_labels):
        if tok not in index:
            index[tok] = len(names)
            names.append(tok)
        out[i] = index[tok]
    return out, names


def _parse_csv(text: str, path) -> LabeledDataset:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [(ln + 1, r) for ln, r in enumerate(rows) if any(cell.strip() for cell in r)]
    if not rows:
        raise DatasetFormatError(path, 1, "no data rows")
    first_ln, first = rows[0]
    width = len(first)
    if width < 2:
        raise DatasetFormatError(path, first_ln, "need at least one feature column and a label")

    def is_data_row(cells):
        try:
            for cell in cells[:-1]:
                float(cell)
        except ValueError:
            return False
        return True

    if not is_data_row(first):
        rows = rows[1:]
        if not rows:
            raise DatasetFormatError(path, first_ln, "header only, no data rows")

    features = []
    raw_labels = []
    for ln, cells in rows:
        if len(cells) != width:
            raise DatasetFormatError(path, ln, f"row has {len(cells)} fields, expected {width}")
        try:
            features.append([float(c) for c in cells[:-1]])
        except ValueError as exc:
            raise DatasetFormatError(path, ln, f"non-numeric feature value: {exc}") from exc
        raw_labels.append(cells[-1].strip())
    labels, names = _encode_labels(raw_labels)
    return LabeledDataset(np.array(features), labels, class_names=names)


_ATTR_RE = re.compile(r"@attribute\s+(\S+)\s+(.*)", re.IGNORECASE)


@dataclass
class _KeelAttribute:
    name: str
    kind: str                       # 'numeric' or 'nominal'
    values: list[str] = field(default_factory=list)

    def encode(self, token: str):
        if self.kind == "numeric":
            return float(token)
        return float(self.values.index(token))


def _parse_keel(text: str, path) -> LabeledDataset:
    attributes: list[_KeelAttribute] = []
    inputs: list[str] | None = None
    outputs: list[str] | None = None
    data_start = None
    lines = text.splitlines()
    for ln, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        low = line.lower()
        if low.startswith("@relation"):
            continue
        if low.startswith("@attribute"):
            m = _ATTR_RE.match(line)
            if not m:
                raise DatasetFormatError(path, ln, f"malformed @attribute line: {line!r}")
            name, rest = m.group(1), m.group(2).strip()
            if rest.startswith("{"):
                if not rest.endswith("}"):
                    raise DatasetFormatError(path, ln, "unterminated nominal value list")
                values = [v.strip() for v in rest[1:-1].split(",")]
                attributes.append(_KeelAttribute(name, "nominal", values))
            else:
                kind = rest.split("[")[0].split()[0].lower() if rest else ""
                if kind not in ("real", "integer", "numeric"):
                    raise DatasetFormatError(path, ln, f"unsupported attribute type {rest!r}")
                attributes.append(_KeelAttribute(name, "numeric"))
        elif low.startswith("@inputs"):
            inputs = [t.strip() for t in line[len("@inputs"):].strip().split(",") if t.strip()]
        elif low.startswith("@outputs") or low.startswith("@output "):
            outputs = [t.strip() for t in line.split(None, 1)[1].split(",") if t.strip()]
        elif low.startswith("@data"):
            data_start = ln
            break
        else:
            raise DatasetFormatError(path, ln, f"unrecognized header line: {line!r}")
    if data_start is None:
        raise DatasetFormatError(path, len(lines), "missing @data section")
    if not attributes:
        raise DatasetFormatError(path, data_start, "no @attribute declarations before @data")

    by_name = {a.name: a for a in attributes}
    if outputs:
        if len(outputs) != 1:
            raise DatasetFormatError(path, data_start, "exactly one output attribute is supported")
        if outputs[0] not in by_name:
            raise DatasetFormatError(path, data_start, f"@outputs names unknown attribute {outputs[0]!r}")
        label_attr = by_name[outputs[0]]
    else:
        label_attr = attributes[-1]
    if inputs is not None:
        unknown = [n for n in inputs if n not in by_name]
        if unknown:
            raise DatasetFormatError(path, data_start, f"@inputs names unknown attributes {unknown}")
        feature_attrs = [by_name[n] for n in inputs]
    else:
        feature_attrs = [a for a in attributes if a is not label_attr]
    columns = {a.name: i for i, a in enumerate(attributes)}

    features = []
    raw_labels = []
    for ln in range(data_start + 1, len(lines) + 1):
        line = lines[ln - 1].strip()
        if not line or line.startswith("%"):
            continue
        tokens = [t.strip() for t in line.split(",")]
        if len(tokens) != len(attributes):
            raise DatasetFormatError(
                path, ln, f"row has {len(tokens)} fields, expected {len(attributes)}"
            )
        row = []
        for attr in feature_attrs:
            tok = tokens[columns[attr.name]]
            try:
                row.append(attr.encode(tok))
            except ValueError:
                raise DatasetFormatError(
                    path, ln, f"non-numeric value {tok!r} for attribute {attr.name!r}"
                ) from None
        features.append(row)
        raw_labels.append(tokens[columns[label_attr.name]])
    if not features:
        raise DatasetFormatError(path, len(lines), "no data rows after @data")
    labels, names = _encode_labels(raw_labels)
    return LabeledDataset(np.array(features), labels, class_names=names)


def save_dataset(dataset: LabeledDataset, path, format: str | None = None,
                 relation: str = "dataset") -> None:
    """Write a dataset back to disk, bit-exactly round-trippable via load_dataset."""
    path = Path(path)
    fmt = format or detect_format(path)
    if fmt == "csv":
        _write_csv(dataset, path)
    elif fmt == "keel":
        _write_keel(dataset, path, relation)
    else:
        raise McccrError(f"unknown dataset format {fmt!r}")


def _write_csv(dataset: LabeledDataset, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{j}" for j in range(dataset.n_features)] + ["label"])
        for row, lab in zip(dataset.features, dataset.labels):
            writer.writerow([repr(float(v)) for v in row] + [dataset.label_name(int(lab))])


def _write_keel(dataset: LabeledDataset, path, relation: str) -> None:
    names = [dataset.label_name(c) for c in range(dataset.n_classes)]
    lines = [f"@relation {relation}"]
    for j in range(dataset.n_features):
        col = dataset.features[:, j]
        lo = repr(float(col.min())) if len(col) else "0.0"
        hi = repr(float(col.max())) if len(col) else "0.0"
        lines.append(f"@attribute f{j} real [{lo}, {hi}]")
    lines.append(f"@attribute label {{{', '.join(names)}}}")
    lines.append("@inputs " + ", ".join(f"f{j}" for j in range(dataset.n_features)))
    lines.append("@outputs label")
    lines.append("@data")
    for row, lab in zip(dataset.features, dataset.labels):
        lines.append(", ".join(repr(float(v)) for v in row) + f", {names[int(lab)]}")
    Path(path).write_text("\n".join(lines) + "\n")


def merged_with_synthetic(dataset: LabeledDataset, synth_features: np.ndarray,
                          synth_labels: np.ndarray) -> LabeledDataset:
    """Append synthetic rows, marking them in the synthetic mask."""
    base_mask = dataset.synthetic if dataset.synthetic is not None else np.zeros(dataset.n, bool)
    return replace(
        dataset,
        features=np.vstack([dataset.features, synth_features]) if len(synth_features)
        else dataset.features.copy(),
        labels=np.concatenate([dataset.labels, synth_labels]),
        synthetic=np.concatenate([base_mask, np.ones(len(synth_labels), bool)]),
    )
