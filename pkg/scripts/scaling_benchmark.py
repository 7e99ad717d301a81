#!/usr/bin/env python3
"""Measure how resampling wall time grows with the number of instances.

Times the multi-class resampler on synthetic data at a fixed feature count
and class ratio, doubling n, and reports the fitted log-log slope.
"""

import argparse
import time

import numpy as np

from mcccr.multiclass import McConfig, mc_ccr
from mcccr.simdata import make_imbalanced_blobs


def time_mc_ccr(n, m=10, seed=0, energy=1.0, repeats=2):
    proportions = (0.55, 0.25, 0.12, 0.08)
    counts = [max(2, int(n * p)) for p in proportions]
    dataset = make_imbalanced_blobs(counts, m, seed=seed, contamination=0.0)
    config = McConfig(energy=energy, seed=seed)
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        mc_ccr(dataset, config)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", nargs="*", type=int,
                        default=[250, 500, 1000, 2000, 4000])
    parser.add_argument("--features", type=int, default=10)
    parser.add_argument("--energy", type=float, default=1.0)
    args = parser.parse_args()
    times = []
    for n in args.sizes:
        seconds = time_mc_ccr(n, m=args.features, energy=args.energy)
        times.append(seconds)
        print(f"n={n:6d}  {seconds * 1e3:9.2f} ms")
    slope = np.polyfit(np.log(args.sizes), np.log(times), 1)[0]
    print(f"log-log slope: {slope:.3f}")


if __name__ == "__main__":
    main()
