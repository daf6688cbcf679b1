"""Seeded synthetic binary-classification datasets.

All randomness comes from ``numpy.random.Generator`` over the PCG64 bit
generator (128-bit LCG state, XSL-RR output permutation), seeded with the
integer ``seed``. PCG64 streams are identical across platforms.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    seed: int = 0

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("features and labels differ in length")

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    def subset(self, index) -> "Dataset":
        return Dataset(self.features[index], self.labels[index], self.seed)


def make_classification(n_samples: int = 400, n_features: int = 4, n_informative: int = 2,
                        class_sep: float = 1.0, seed: int = 0) -> Dataset:
    """Two unit-variance Gaussian clusters on opposite hypercube vertices.

    Class 0 sits at a random vertex of {-class_sep, +class_sep}^n_informative
    and class 1 at the antipodal vertex, so the class means differ by
    2 * class_sep in every informative dimension. The remaining features are
    random linear combinations (Uniform(-1, 1) weights) of the informative
    ones.
    """
    if not 1 <= n_informative <= n_features:
        raise ConfigurationError("need 1 <= n_informative <= n_features")
    if n_samples < 2 or n_samples % 2:
        raise ConfigurationError("n_samples must be even and >= 2")
    if class_sep < 0:
        raise ConfigurationError("class_sep must be >= 0")
    rng = rng_for(seed)
    half = n_samples // 2
    vertex = class_sep * rng.choice([-1.0, 1.0], size=n_informative)
    labels = np.repeat([0, 1], half)
    centers = np.where(labels[:, None] == 0, vertex, -vertex)
    informative = centers + rng.standard_normal((n_samples, n_informative))
    mixing = rng.uniform(-1.0, 1.0, size=(n_informative, n_features - n_informative))
    features = np.hstack([informative, informative @ mixing])
    order = rng.permutation(n_samples)
    return Dataset(features[order], labels[order], seed)


def make_moons(n_samples: int = 400, noise_std: float = 0.15, seed: int = 0) -> Dataset:
    """Two interleaving half circles.

    Class 0: (cos t, sin t); class 1: (1 - cos t, 0.5 - sin t), with t evenly
    spaced over [0, pi] and Gaussian noise of ``noise_std`` per coordinate.
    """
    if n_samples < 2 or n_samples % 2:
        raise ConfigurationError("n_samples must be even and >= 2")
    if noise_std < 0:
        raise ConfigurationError("noise_std must be >= 0")
    rng = rng_for(seed)
    half = n_samples // 2
    t = np.linspace(0.0, np.pi, half)
    outer = np.column_stack([np.cos(t), np.sin(t)])
    inner = np.column_stack([1.0 - np.cos(t), 0.5 - np.sin(t)])
    features = np.vstack([outer, inner])
    labels = np.repeat([0, 1], half)
    if noise_std > 0:
        features = features + rng.normal(0.0, noise_std, size=features.shape)
    order = rng.permutation(n_samples)
    return Dataset(features[order], labels[order], seed)


def train_test_split(d: Dataset, test_fraction: float = 0.25, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Stratified seeded split.

    The test set gets ``round(test_fraction * len(d))`` rows, apportioned to
    classes by largest remainder so each class is within one row of its
    exact share.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ConfigurationError("test_fraction must be in (0, 1)")
    rng = rng_for(seed)
    classes = np.unique(d.labels)
    counts = np.array([np.sum(d.labels == c) for c in classes])
    exact = test_fraction * counts
    quota = np.floor(exact).astype(int)
    extra = int(round(test_fraction * len(d))) - quota.sum()
    for i in np.argsort(-(exact - quota), kind="stable")[:max(extra, 0)]:
        quota[i] += 1
    test_idx, train_idx = [], []
    for cls, k in zip(classes, quota):
        idx = np.flatnonzero(d.labels == cls)
        idx = idx[rng.permutation(idx.size)]
        test_idx.append(idx[:k])
        train_idx.append(idx[k:])
    train_idx = np.concatenate(train_idx)
    test_idx = np.concatenate(test_idx)
    train_idx = train_idx[rng.permutation(train_idx.size)]
    test_idx = test_idx[rng.permutation(test_idx.size)]
    return d.subset(train_idx), d.subset(test_idx)


def write_csv(d: Dataset, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i}" for i in range(d.n_features)] + ["label"])
        for row, label in zip(d.features, d.labels):
            writer.writerow([f"{v:.9g}" for v in row] + [int(label)])


def read_csv(path, seed: int = 0) -> Dataset:
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[-1] != "label":
            raise ValueError("dataset CSV must end with a 'label' column")
        rows = [r for r in reader if r]
    data = np.array([[float(v) for v in r] for r in rows])
    if data.size == 0:
        raise ValueError("dataset CSV has no rows")
    return Dataset(data[:, :-1], data[:, -1].astype(np.int64), seed)
