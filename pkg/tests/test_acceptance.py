"""Acceptance gate: one test per shipped guarantee.

Each test prints a PASS line on success (visible with -s or in the verbose
log), and the benchmark-driven tests read the committed datasets under
data/ through the bundled configs, so this module exercises the same
artifacts a user receives.
"""

import dataclasses
import os
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from mcccr.cli import main
from mcccr.core import BinarySplit, CleaningConfig, binary_ccr, expand_sphere
from mcccr.datasets import LabeledDataset, load_dataset
from mcccr.folds import stratified_folds
from mcccr.harness import (
    Standardizer, apply_method, config_from_file, derive_rng, derive_seed,
    run_experiment,
)
from mcccr.metrics import avacc, cba, cen, mean_ranks, mgm
from mcccr.multiclass import McConfig, mc_ccr
from mcccr.neighbors import knn_classify
from mcccr.noise import NoiseSpec, inject_noise
from mcccr.metrics import score
from mcccr.simdata import make_imbalanced_blobs

import reference_scores
from oracles import avacc_oracle, cba_oracle, cen_oracle, mgm_oracle, simulate_expansion

REPO = Path(__file__).parent.parent
JOBS = min(8, os.cpu_count() or 1)


def report_line(n, text):
    print(f"ACCEPTANCE {n}: PASS - {text}")


def test_criterion_1_sphere_expansion_oracle():
    started = time.perf_counter()
    rng = np.random.default_rng(101)
    for _ in range(50):
        n = int(rng.integers(1, 40))
        distances = rng.uniform(0.05, 8.0, size=n)
        energy = float(rng.uniform(0.05, 20.0))
        radius, _ = expand_sphere([0.0], distances[:, None], energy=energy, p=2)
        assert radius == pytest.approx(simulate_expansion(distances, energy), abs=1e-2)
    # hand-traced fixtures hold exactly
    assert expand_sphere([0.0], [[2.0], [5.0], [20.0]], 10)[0] == pytest.approx(
        5 + 2 / 3, abs=1e-12)
    assert expand_sphere([0.0, 0.0], np.zeros((0, 2)), 10)[0] == 10.0
    assert expand_sphere([0.0], [[2.0], [5.0]], 100)[0] == 5.0
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    report_line(1, f"50 step-simulator fixtures within 1e-2 in {elapsed:.2f}s")


def test_criterion_2_geometry_invariants():
    started = time.perf_counter()
    rng = np.random.default_rng(202)
    for trial in range(100):
        m = 2 if trial % 2 == 0 else 5
        n_maj = int(rng.integers(20, 260))
        n_min = int(rng.integers(2, max(3, 300 - n_maj) // 4))
        majority = rng.normal(0, 2, size=(n_maj, m))
        minority = rng.normal(0.5, 1.5, size=(n_min, m))
        split = BinarySplit(majority, minority)
        energy = float(rng.uniform(0.5, 4.0))

        res_t = binary_ccr(split, CleaningConfig(energy=energy, seed=trial))
        d_before = np.linalg.norm(
            majority[None, :, :] - minority[:, None, :], axis=2)
        inside = d_before < res_t.radii[:, None]
        single = inside.sum(axis=0) == 1
        for j in np.flatnonzero(single):
            i = int(np.flatnonzero(inside[:, j])[0])
            d_after = np.linalg.norm(res_t.cleaned_majority[j] - minority[i])
            assert d_after == pytest.approx(res_t.radii[i], abs=1e-9)
        start = 0
        for i, g in enumerate(res_t.counts):
            chunk = res_t.synthetic_minority[start:start + g]
            start += g
            if g:
                dist = np.linalg.norm(chunk - minority[i], axis=1)
                assert (dist <= res_t.radii[i] + 1e-9).all()

        res_r = binary_ccr(split, CleaningConfig(
            energy=energy, cleaning_strategy="removal", seed=trial))
        if len(res_r.cleaned_majority):
            d = np.linalg.norm(
                res_r.cleaned_majority[None, :, :] - minority[:, None, :], axis=2)
            assert (d >= res_r.radii[:, None] - 1e-9).all()
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    report_line(2, f"100 random geometries clean in {elapsed:.2f}s")


def test_criterion_3_count_accounting():
    started = time.perf_counter()
    rng = np.random.default_rng(303)
    for trial in range(100):
        n_classes = int(rng.integers(3, 7))
        counts = rng.integers(4, 50, size=n_classes)
        rows, labels = [], []
        for cls in range(n_classes):
            center = rng.normal(0, 2, size=3)
            rows.append(center + rng.normal(0, 1, size=(int(counts[cls]), 3)))
            labels.extend([cls] * int(counts[cls]))
        ds = LabeledDataset(np.vstack(rows), np.array(labels))
        out = mc_ccr(ds, McConfig(energy=1.0, seed=trial))
        majority = counts.max()
        final = out.class_counts()
        for cls in range(n_classes):
            assert majority - counts[cls] <= final[cls] <= majority

    # degenerate two-class input reproduces the binary pipeline bit-exactly
    rng = np.random.default_rng(42)
    rows = np.vstack([rng.normal(0, 1, (30, 4)), rng.normal(2, 1, (9, 4))])
    ds = LabeledDataset(rows, np.array([0] * 30 + [1] * 9))
    cfg = McConfig(energy=1.5, seed=99)
    out = mc_ccr(ds, cfg)
    ref = binary_ccr(BinarySplit(rows[:30], rows[30:]), cfg)
    assert np.array_equal(out.features[out.synthetic], ref.synthetic_minority)
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    report_line(3, f"100 multi-class count checks in {elapsed:.2f}s")


def test_criterion_4_metric_oracles():
    rng = np.random.default_rng(404)
    for _ in range(1000):
        m = int(rng.integers(2, 9))
        mat = rng.integers(0, 25, size=(m, m))
        if rng.random() < 0.2:
            mat[int(rng.integers(m))] = 0
        a, c, g, e = avacc(mat), cba(mat), mgm(mat), cen(mat)
        assert a == pytest.approx(avacc_oracle(mat), abs=1e-12)
        assert c == pytest.approx(cba_oracle(mat), abs=1e-12)
        assert g == pytest.approx(mgm_oracle(mat), abs=1e-12)
        assert e == pytest.approx(cen_oracle(mat), abs=1e-12)
        assert c <= a + 1e-12
        assert g <= a + 1e-12
        diag = np.diag(np.diag(mat))
        if np.array_equal(mat, diag):
            assert e == 0.0
    assert cen(np.diag([3, 7, 2])) == 0.0
    report_line(4, "1000 random matrices match rational oracles at 1e-12")


@pytest.mark.xfail(
    strict=True,
    reason="the published average rank (1.95) is not reproducible from the "
    "published per-dataset scores: ranking the 19 reported rows gives "
    "40/19 = 2.105 under any tie convention; see notes/decisions.md",
)
def test_criterion_4_reference_rank_reproduction():
    ranks = mean_ranks(np.array(reference_scores.AVACC), higher_is_better=True)
    assert ranks[0] == pytest.approx(reference_scores.PUBLISHED_AVACC_RANK, abs=0.01)


def test_criterion_5_noise_injector():
    n, m = 100_000, 6
    ds = LabeledDataset(np.zeros((n, 1)), np.arange(n) % m, n_classes=m)
    noisy, flipped = inject_noise(ds, NoiseSpec(0.5, seed=505))
    assert len(flipped) == n // 2
    assert (noisy.labels[flipped] != ds.labels[flipped]).all()
    old, new = ds.labels[flipped], noisy.labels[flipped]
    rank = np.where(new > old, new - 1, new)
    observed = np.bincount(rank, minlength=m - 1)
    expected = len(flipped) / (m - 1)
    stat = float(((observed - expected) ** 2 / expected).sum())
    from scipy.stats import chi2
    assert stat < chi2.ppf(0.999, df=m - 2)

    same, flips = inject_noise(ds, NoiseSpec(0.0, seed=1))
    assert np.array_equal(same.labels, ds.labels) and len(flips) == 0
    report_line(5, f"flip exactness and chi-square uniformity (stat {stat:.1f})")


@pytest.fixture(scope="module")
def benchmark_report():
    config = config_from_file(REPO / "configs" / "benchmark.yaml")
    config = dataclasses.replace(config, jobs=JOBS, data_dir=str(REPO / "data"),
                                 output=None)
    started = time.perf_counter()
    report = run_experiment(config)
    elapsed = time.perf_counter() - started
    assert elapsed < 900, f"benchmark run took {elapsed:.0f}s, budget is 15 min"
    assert not report.skips
    return report


def _mean_cba(report, dataset, method, level):
    values = [r.cba for r in report.records
              if r.dataset == dataset and r.method == method and r.noise_level == level]
    assert values
    return float(np.mean(values))


def test_criterion_6_directional_benchmark(benchmark_report):
    datasets = sorted({r.dataset for r in benchmark_report.records})
    assert len(datasets) == 5
    clean_wins = sum(
        _mean_cba(benchmark_report, d, "mc-ccr", 0.0)
        >= _mean_cba(benchmark_report, d, "none", 0.0)
        for d in datasets
    )
    noisy_wins = sum(
        _mean_cba(benchmark_report, d, "mc-ccr", 0.25)
        >= _mean_cba(benchmark_report, d, "smote-all", 0.25)
        for d in datasets
    )
    assert clean_wins >= 4, f"mc-ccr >= none at 0% noise on only {clean_wins}/5"
    assert noisy_wins >= 4, f"mc-ccr >= smote-all at 25% noise on only {noisy_wins}/5"
    report_line(6, f"0% noise wins {clean_wins}/5 vs none; "
                f"25% noise wins {noisy_wins}/5 vs smote-all")


def test_criterion_7_ablation_direction():
    names = ["wine_like", "newthyroid_like", "hayesroth_like",
             "glass_like", "balance_like"]

    def run_config(ds, name, cleaning, selection, decomposition):
        folds = stratified_folds(ds, 10, derive_rng(77, "folds", name))
        values = []
        for fi, (tr, te) in enumerate(folds):
            train, test = ds.subset(tr), ds.subset(te)
            scaler = Standardizer.fit(train.features)
            train = dataclasses.replace(train, features=scaler.transform(train.features))
            test = dataclasses.replace(test, features=scaler.transform(test.features))
            params = {"energy": 1.0, "ratio": "balance", "cleaning": cleaning,
                      "selection": selection, "decomposition": decomposition}
            res = apply_method("mc-ccr", params, train,
                               derive_seed(77, name, fi, cleaning))
            pred = knn_classify(res, test.features, k=5)
            values.append(score(test.labels, pred, ds.n_classes).cba)
        return float(np.mean(values))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        proposed, stripped = [], []
        for name in names:
            ds = load_dataset(REPO / "data" / f"{name}.dat")
            proposed.append(run_config(ds, name, "translation", "proportional", "sampling"))
            stripped.append(run_config(ds, name, "ignoring", "random", "complete"))
    margin = float(np.mean(proposed) - np.mean(stripped))
    assert margin > 0.0
    report_line(7, f"T/P/S beats I/R/C by {margin:+.4f} mean CBA over the suite")


def test_criterion_8_complexity_scaling():
    started = time.perf_counter()
    sizes = [250, 500, 1000, 2000, 4000]
    proportions = (0.55, 0.25, 0.12, 0.08)
    times = []
    for n in sizes:
        counts = [max(2, int(n * p)) for p in proportions]
        ds = make_imbalanced_blobs(counts, 10, seed=8, contamination=0.0)
        cfg = McConfig(energy=1.0, seed=8)
        best = min(
            (lambda t0: (mc_ccr(ds, cfg), time.perf_counter() - t0)[1])(time.perf_counter())
            for _ in range(2)
        )
        times.append(best)
    slope = float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
    elapsed = time.perf_counter() - started
    assert slope <= 2.3, f"log-log runtime slope {slope:.2f} exceeds 2.3"
    assert elapsed < 300
    report_line(8, f"runtime slope {slope:.2f} over n in {sizes} ({elapsed:.0f}s)")


def test_criterion_9_cli_determinism(tmp_path):
    config = REPO / "configs" / "quickstart.yaml"

    def run(tag, jobs):
        out = tmp_path / tag / "report"
        code = main(["evaluate", str(config), "--output", str(out),
                     "--jobs", str(jobs), "--data-dir", str(REPO / "data")])
        assert code == 0
        return (out.with_suffix(".csv").read_bytes(),
                out.with_suffix(".json").read_bytes())

    first = run("a", 1)
    second = run("b", 1)
    parallel = run("c", 8)
    assert first == second, "same-seed reruns must be byte-identical"
    assert first == parallel, "--jobs must not change report bytes"
    report_line(9, "quickstart reports byte-identical across reruns and --jobs 1/8")


def test_bundled_data_matches_generator():
    # the committed benchmark files must be exactly what the generator and
    # writer produce, so the directional results are reproducible from source
    from mcccr.datasets import save_dataset
    from mcccr.simdata import make_benchmark
    for name in ["wine_like", "newthyroid_like", "hayesroth_like",
                 "glass_like", "balance_like", "ecoli_like"]:
        committed = (REPO / "data" / f"{name}.dat").read_text()
        regenerated_path = REPO / "data" / f".tmp_{name}.dat"
        save_dataset(make_benchmark(name), regenerated_path, relation=name)
        regenerated = regenerated_path.read_text()
        regenerated_path.unlink()
        assert committed == regenerated, f"{name}.dat drifted from its generator"
