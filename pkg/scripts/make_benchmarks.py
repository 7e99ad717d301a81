#!/usr/bin/env python3
"""Regenerate the bundled synthetic benchmark datasets under data/.

The files are committed; rerunning this script reproduces them bit-exactly.
"""

import argparse
from pathlib import Path

from mcccr.datasets import save_dataset
from mcccr.simdata import SHAPES, make_benchmark


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default=Path(__file__).parent.parent / "data")
    parser.add_argument("--shapes", nargs="*", default=sorted(SHAPES))
    args = parser.parse_args()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in args.shapes:
        dataset = make_benchmark(name)
        path = out_dir / f"{name}.dat"
        save_dataset(dataset, path, relation=name)
        counts = "/".join(str(c) for c in dataset.class_counts())
        print(f"{path}  n={dataset.n} m={dataset.n_features} "
              f"M={dataset.n_classes} counts={counts}")


if __name__ == "__main__":
    main()
