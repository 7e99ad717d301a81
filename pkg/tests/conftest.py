import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mcccr.datasets import LabeledDataset


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_binary_geometry(rng, n_maj=40, n_min=8, m=2, scale=3.0):
    majority = rng.normal(0, scale, size=(n_maj, m))
    minority = rng.normal(0.5, scale * 0.8, size=(n_min, m))
    return majority, minority


def random_multiclass_dataset(rng, n_classes=None, n_per_class=None, m=3):
    if n_classes is None:
        n_classes = int(rng.integers(3, 7))
    if n_per_class is None:
        n_per_class = rng.integers(5, 40, size=n_classes)
    rows, labels = [], []
    for cls in range(n_classes):
        center = rng.normal(0, 2.0, size=m)
        rows.append(center + rng.normal(0, 1.0, size=(int(n_per_class[cls]), m)))
        labels.extend([cls] * int(n_per_class[cls]))
    return LabeledDataset(np.vstack(rows), np.array(labels))
