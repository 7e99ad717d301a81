"""Cross-validated evaluation with inner-loop parameter selection.

Every cell of the sweep (dataset x noise spec x repeat x outer fold) injects
noise into its training split only, grid-searches resampler and classifier
parameters with an inner stratified CV, refits the winner, and scores the
untouched test split. Each cell derives its own generator seed from the
master seed and the cell coordinates, so any execution order or degree of
parallelism produces the identical report.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .baselines import smote_all
from .datasets import LabeledDataset, load_dataset
from .errors import ConfigError, McccrError
from .folds import stratified_folds
from .metrics import score
from .multiclass import McConfig, mc_ccr
from .neighbors import knn_classify
from .noise import NoiseSpec, inject_noise
from .report import ExperimentRecord, ExperimentReport, SkipRecord

METHOD_NAMES = ("mc-ccr", "smote-all", "none")
SELECTION_METRICS = ("avacc", "cba", "mgm", "cen")
DEFAULT_NOISE_LEVELS = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25)

# canonical full-protocol grids: energies follow the 1-2.5-5 decade pattern
# across five decades, ratios step by 50 percent, k-NN by odd neighbor counts
FULL_ENERGY_GRID = tuple(
    base * 10.0 ** exp for exp in range(-3, 2) for base in (1.0, 2.5, 5.0)
) + (100.0,)
FULL_RATIO_GRID = tuple(range(50, 501, 50))
FULL_KNN_GRID = (1, 3, 5, 7, 9, 11)


def derive_seed(master_seed: int, *parts) -> int:
    """Stable 64-bit child seed from the master seed and a coordinate tuple."""
    key = json.dumps([master_seed, *parts], sort_keys=True, default=str)
    return int.from_bytes(hashlib.blake2b(key.encode(), digest_size=8).digest(), "big")


def derive_rng(master_seed: int, *parts) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, *parts))


@dataclass
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> "Standardizer":
        mean = features.mean(axis=0)
        scale = features.std(axis=0)
        scale[scale == 0] = 1.0
        return cls(mean, scale)

    def transform(self, features: np.ndarray) -> np.ndarray:
        return (features - self.mean) / self.scale

    def inverse(self, features: np.ndarray) -> np.ndarray:
        return features * self.scale + self.mean


@dataclass
class DatasetSpec:
    path: str
    name: str | None = None
    format: str | None = None

    def resolved_name(self) -> str:
        return self.name or Path(self.path).stem


@dataclass
class MethodSpec:
    name: str
    grid: dict[str, list] = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in METHOD_NAMES:
            raise ConfigError("methods", f"unknown method {self.name!r}")
        self.grid = {k: (v if isinstance(v, list) else [v]) for k, v in self.grid.items()}
        for key, values in self.grid.items():
            if not values:
                raise ConfigError(f"methods[{self.name}].grid.{key}", "empty grid axis")


@dataclass
class ExperimentConfig:
    datasets: list[DatasetSpec]
    methods: list[MethodSpec]
    classifier: dict[str, list] = field(default_factory=lambda: {"k": [5], "p": [2]})
    outer_folds: int = 10
    outer_repeats: int = 10
    inner_folds: int = 3
    selection_metric: str = "cba"
    noise: list[NoiseSpec] = field(default_factory=lambda: [NoiseSpec(0.0)])
    standardize: bool = False
    seed: int = 0
    jobs: int = 1
    output: str | None = None
    data_dir: str | None = None

    def __post_init__(self):
        if self.outer_folds < 2:
            raise ConfigError("outer_folds", f"must be >= 2, got {self.outer_folds}")
        if self.inner_folds < 2:
            raise ConfigError("inner_folds", f"must be >= 2, got {self.inner_folds}")
        if self.outer_repeats < 1:
            raise ConfigError("outer_repeats", f"must be >= 1, got {self.outer_repeats}")
        if self.selection_metric not in SELECTION_METRICS:
            raise ConfigError(
                "selection_metric",
                f"must be one of {SELECTION_METRICS}, got {self.selection_metric!r}",
            )
        if not self.datasets:
            raise ConfigError("datasets", "at least one dataset is required")
        if not self.methods:
            raise ConfigError("methods", "at least one method is required")
        self.classifier = {
            k: (v if isinstance(v, list) else [v]) for k, v in self.classifier.items()
        }
        for key, values in self.classifier.items():
            if not values:
                raise ConfigError(f"classifier.{key}", "empty grid axis")
        if self.jobs < 1:
            raise ConfigError("jobs", f"must be >= 1, got {self.jobs}")

    def resolve_path(self, spec: DatasetSpec) -> Path:
        candidate = Path(spec.path)
        if candidate.exists():
            return candidate
        roots = [self.data_dir, os.environ.get("MCCCR_DATA_DIR")]
        for root in roots:
            if root and (Path(root) / spec.path).exists():
                return Path(root) / spec.path
        return candidate


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build a validated config from the declarative key-value tree."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", f"expected a mapping, got {type(raw).__name__}")
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    for key in raw:
        if key not in known:
            raise ConfigError(key, "unknown configuration key")

    def expect(key, value, types, type_name):
        if not isinstance(value, types) or isinstance(value, bool) and bool not in (
            types if isinstance(types, tuple) else (types,)
        ):
            raise ConfigError(key, f"expected {type_name}, got {value!r}")
        return value

    datasets = []
    raw_datasets = raw.get("datasets")
    if not isinstance(raw_datasets, list) or not raw_datasets:
        raise ConfigError("datasets", "expected a non-empty list")
    for i, d in enumerate(raw_datasets):
        if isinstance(d, str):
            datasets.append(DatasetSpec(path=d))
            continue
        if not isinstance(d, dict) or "path" not in d:
            raise ConfigError(f"datasets[{i}]", "expected a path string or a mapping with 'path'")
        extra = set(d) - {"path", "name", "format"}
        if extra:
            raise ConfigError(f"datasets[{i}].{sorted(extra)[0]}", "unknown dataset key")
        datasets.append(DatasetSpec(path=str(d["path"]), name=d.get("name"),
                                    format=d.get("format")))

    methods = []
    raw_methods = raw.get("methods")
    if not isinstance(raw_methods, list) or not raw_methods:
        raise ConfigError("methods", "expected a non-empty list")
    for i, m in enumerate(raw_methods):
        if isinstance(m, str):
            m = {"name": m}
        if not isinstance(m, dict) or "name" not in m:
            raise ConfigError(f"methods[{i}]", "expected a name string or a mapping with 'name'")
        extra = set(m) - {"name", "grid"}
        if extra:
            raise ConfigError(f"methods[{i}].{sorted(extra)[0]}", "unknown method key")
        grid = m.get("grid", {})
        if not isinstance(grid, dict):
            raise ConfigError(f"methods[{i}].grid", "expected a mapping of parameter lists")
        try:
            methods.append(MethodSpec(name=str(m["name"]), grid=grid))
        except ConfigError as exc:
            raise ConfigError(f"methods[{i}].{exc.key_path}", str(exc).split(": ", 1)[-1]) from None

    noise = []
    for i, nv in enumerate(raw.get("noise", [{"level": 0.0}])):
        if isinstance(nv, (int, float)) and not isinstance(nv, bool):
            noise.append(NoiseSpec(level=float(nv)))
            continue
        if not isinstance(nv, dict) or "level" not in nv:
            raise ConfigError(f"noise[{i}]", "expected a level number or a mapping with 'level'")
        extra = set(nv) - {"level", "classes"}
        if extra:
            raise ConfigError(f"noise[{i}].{sorted(extra)[0]}", "unknown noise key")
        classes = nv.get("classes")
        noise.append(NoiseSpec(level=float(nv["level"]),
                               affected_classes=tuple(classes) if classes else None))

    classifier = raw.get("classifier", {"k": [5], "p": [2]})
    if not isinstance(classifier, dict):
        raise ConfigError("classifier", "expected a mapping of parameter lists")

    kwargs = dict(
        datasets=datasets,
        methods=methods,
        classifier=classifier,
        noise=noise,
    )
    for key, types, type_name in (
        ("outer_folds", int, "an integer"), ("outer_repeats", int, "an integer"),
        ("inner_folds", int, "an integer"), ("selection_metric", str, "a string"),
        ("standardize", bool, "a boolean"), ("seed", int, "an integer"),
        ("jobs", int, "an integer"), ("output", str, "a string"),
        ("data_dir", str, "a string"),
    ):
        if key in raw and raw[key] is not None:
            kwargs[key] = expect(key, raw[key], types, type_name)
    return ExperimentConfig(**kwargs)


def config_from_file(path) -> ExperimentConfig:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise McccrError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError("<root>", f"config is not valid YAML/JSON: {exc}") from exc
    return config_from_dict(raw)


def _ratio_value(value):
    if value == "balance":
        return "balance"
    return float(value)


def apply_method(name: str, params: dict, train: LabeledDataset, seed: int) -> LabeledDataset:
    """Resample one training split with the named method and parameter set."""
    if name == "none":
        return train
    if name == "mc-ccr":
        cfg = McConfig(
            energy=float(params["energy"]),
            p=float(params.get("p", 2.0)),
            cleaning_strategy=str(params.get("cleaning", "translation")),
            selection_strategy=str(params.get("selection", "proportional")),
            oversampling_ratio=_ratio_value(params.get("ratio", "balance")),
            decomposition=str(params.get("decomposition", "sampling")),
            seed=seed,
        )
        return mc_ccr(train, cfg)
    if name == "smote-all":
        return smote_all(
            train, int(params.get("k", 5)), _ratio_value(params.get("ratio", "balance")),
            np.random.default_rng(seed),
        )
    raise McccrError(f"unknown method {name!r}")


def _grid_points(grid: dict[str, list]) -> list[dict]:
    if not grid:
        return [{}]
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def _metric_value(report, metric: str) -> float:
    return getattr(report, metric)


def _better(candidate: float, incumbent: float | None, metric: str) -> bool:
    if incumbent is None:
        return True
    if metric == "cen":
        return candidate < incumbent
    return candidate > incumbent


def _require_method_grid(method: MethodSpec):
    if method.name == "mc-ccr" and "energy" not in method.grid:
        raise ConfigError(f"methods[{method.name}].grid.energy",
                          "mc-ccr requires an energy grid")


@dataclass
class _CellTask:
    dataset_name: str
    dataset: LabeledDataset
    noise: NoiseSpec
    repeat: int
    fold: int
    train_idx: np.ndarray
    test_idx: np.ndarray
    methods: list[MethodSpec]
    classifier: dict[str, list]
    inner_folds: int
    selection_metric: str
    standardize: bool
    master_seed: int


def _run_cell(task: _CellTask):
    records: list[ExperimentRecord] = []
    skips: list[SkipRecord] = []
    ds = task.dataset
    train = ds.subset(task.train_idx)
    test = ds.subset(task.test_idx)
    cell_key = (task.dataset_name, repr(task.noise.level),
                task.noise.affected_classes, task.repeat, task.fold)

    noisy_train, _ = inject_noise(
        train,
        replace(task.noise, seed=derive_seed(task.master_seed, "noise", *cell_key)),
    )
    if task.standardize:
        scaler = Standardizer.fit(noisy_train.features)
        noisy_train = replace(noisy_train, features=scaler.transform(noisy_train.features))
        test = replace(test, features=scaler.transform(test.features))

    for method in task.methods:
        started = time.perf_counter()
        try:
            record = _evaluate_method(task, method, noisy_train, test, cell_key, started)
            records.append(record)
        except Exception as exc:  # noqa: BLE001 - cell failures must not abort the sweep
            skips.append(SkipRecord(
                dataset=task.dataset_name, method=method.name,
                noise_level=task.noise.level, noise_classes=task.noise.affected_classes,
                repeat=task.repeat, fold=task.fold,
                reason=f"{type(exc).__name__}: {exc}",
            ))
    return records, skips


def _evaluate_method(task: _CellTask, method: MethodSpec, noisy_train, test,
                     cell_key, started) -> ExperimentRecord:
    candidates = [
        (mp, cp)
        for mp in _grid_points(method.grid)
        for cp in _grid_points(task.classifier)
    ]
    best_params = candidates[0]
    if len(candidates) > 1:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            inner = stratified_folds(
                noisy_train, task.inner_folds,
                derive_rng(task.master_seed, "inner-folds", method.name, *cell_key),
            )
            best_score = None
            for mp, cp in candidates:
                param_key = json.dumps({"m": mp, "c": cp}, sort_keys=True, default=str)
                values = []
                for i, (itr, ite) in enumerate(inner):
                    try:
                        resampled = apply_method(
                            method.name, mp, noisy_train.subset(itr),
                            derive_seed(task.master_seed, "inner", method.name, param_key,
                                        i, *cell_key),
                        )
                        pred = knn_classify(resampled, noisy_train.features[ite],
                                            int(cp.get("k", 5)), float(cp.get("p", 2.0)))
                        rep = score(noisy_train.labels[ite], pred, noisy_train.n_classes)
                        values.append(_metric_value(rep, task.selection_metric))
                    except McccrError:
                        continue
                if not values:
                    continue
                mean_value = float(np.mean(values))
                if _better(mean_value, best_score, task.selection_metric):
                    best_score = mean_value
                    best_params = (mp, cp)

    mp, cp = best_params
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        resample_start = time.perf_counter()
        resampled = apply_method(
            method.name, mp, noisy_train,
            derive_seed(task.master_seed, "final", method.name,
                        json.dumps({"m": mp, "c": cp}, sort_keys=True, default=str),
                        *cell_key),
        )
        resample_seconds = time.perf_counter() - resample_start
        pred = knn_classify(resampled, test.features,
                            int(cp.get("k", 5)), float(cp.get("p", 2.0)))
    rep = score(test.labels, pred, test.n_classes)
    notes = rep.warnings + [str(w.message) for w in caught]
    return ExperimentRecord(
        dataset=task.dataset_name, method=method.name,
        noise_level=task.noise.level, noise_classes=task.noise.affected_classes,
        repeat=task.repeat, fold=task.fold,
        params={**mp, **{f"knn_{k}": v for k, v in cp.items()}},
        avacc=rep.avacc, cba=rep.cba, mgm=rep.mgm, cen=rep.cen,
        warnings=notes,
        resample_seconds=resample_seconds,
        total_seconds=time.perf_counter() - started,
    )


def plan(config: ExperimentConfig) -> dict:
    """Cell counts per dataset/method/noise, for --dry-run output."""
    cells_per_combo = config.outer_repeats * config.outer_folds
    return {
        "datasets": [d.resolved_name() for d in config.datasets],
        "methods": [m.name for m in config.methods],
        "noise_levels": [n.level for n in config.noise],
        "cells_per_dataset_method_noise": cells_per_combo,
        "total_records": len(config.datasets) * len(config.methods)
        * len(config.noise) * cells_per_combo,
    }


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Execute the full sweep; per-cell failures become skip records."""
    for method in config.methods:
        _require_method_grid(method)
    report = ExperimentReport()
    tasks: list[_CellTask] = []
    for spec in config.datasets:
        name = spec.resolved_name()
        try:
            dataset = load_dataset(config.resolve_path(spec), spec.format)
        except McccrError as exc:
            for noise in config.noise:
                for method in config.methods:
                    for repeat in range(config.outer_repeats):
                        for fold in range(config.outer_folds):
                            report.skips.append(SkipRecord(
                                dataset=name, method=method.name,
                                noise_level=noise.level,
                                noise_classes=noise.affected_classes,
                                repeat=repeat, fold=fold,
                                reason=f"dataset load failed: {exc}",
                            ))
            continue
        for repeat in range(config.outer_repeats):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                folds = stratified_folds(
                    dataset, config.outer_folds,
                    derive_rng(config.seed, "outer-folds", name, repeat),
                )
            for noise in config.noise:
                for fold, (train_idx, test_idx) in enumerate(folds):
                    tasks.append(_CellTask(
                        dataset_name=name, dataset=dataset, noise=noise,
                        repeat=repeat, fold=fold,
                        train_idx=train_idx, test_idx=test_idx,
                        methods=config.methods, classifier=config.classifier,
                        inner_folds=config.inner_folds,
                        selection_metric=config.selection_metric,
                        standardize=config.standardize,
                        master_seed=config.seed,
                    ))

    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = list(pool.map(_run_cell, tasks, chunksize=1))
    else:
        outcomes = [_run_cell(t) for t in tasks]
    for records, skips in outcomes:
        report.records.extend(records)
        report.skips.extend(skips)
    return report.sort()
