import numpy as np
import pytest
from scipy.stats import norm

from qarch.baselines import logreg_accuracy, logreg_train
from qarch.datasets import (Dataset, make_classification, make_moons, read_csv,
                            train_test_split, write_csv)
from qarch.errors import ConfigurationError


def test_classification_shapes_and_balance():
    d = make_classification(400, 4, 2, 1.0, seed=3)
    assert d.features.shape == (400, 4)
    assert np.bincount(d.labels).tolist() == [200, 200]


def test_classification_deterministic():
    a = make_classification(100, 4, 2, 1.0, seed=9)
    b = make_classification(100, 4, 2, 1.0, seed=9)
    assert a.features.tobytes() == b.features.tobytes()
    assert a.labels.tobytes() == b.labels.tobytes()
    c = make_classification(100, 4, 2, 1.0, seed=10)
    assert not np.array_equal(a.features, c.features)


def test_redundant_features_are_linear_in_informative():
    d = make_classification(200, 5, 2, 1.0, seed=1)
    informative = d.features[:, :2]
    coef, *_ = np.linalg.lstsq(informative, d.features[:, 2:], rcond=None)
    assert np.allclose(informative @ coef, d.features[:, 2:], atol=1e-10)
    assert np.all(np.abs(coef) <= 1.0)


def test_class_means_differ_by_twice_class_sep():
    sep = 1.5
    d = make_classification(20000, 3, 3, sep, seed=4)
    for j in range(3):
        m0 = d.features[d.labels == 0, j].mean()
        m1 = d.features[d.labels == 1, j].mean()
        stderr = np.sqrt(2 / 10000)
        assert abs(abs(m1 - m0) - 2 * sep) < 3 * stderr


def test_large_separation_is_easy():
    d = make_classification(200, 1, 1, 10.0, seed=0)
    model = logreg_train(d)
    assert logreg_accuracy(model, d) >= 0.99
    # Bayes error for means 20 sigma apart
    assert norm.cdf(-10.0) < 1e-20


def test_zero_separation_is_chance():
    accs = []
    for seed in range(10):
        train, test = train_test_split(make_classification(400, 2, 2, 0.0, seed=seed), 0.25, seed)
        accs.append(logreg_accuracy(logreg_train(train), test))
    assert 0.4 <= np.mean(accs) <= 0.6


@pytest.mark.parametrize("kwargs", [dict(n_informative=0), dict(n_informative=5),
                                    dict(n_samples=401), dict(class_sep=-1.0)])
def test_classification_preconditions(kwargs):
    args = dict(n_samples=100, n_features=4, n_informative=2, class_sep=1.0)
    args.update(kwargs)
    with pytest.raises(ConfigurationError):
        make_classification(**args)


def test_moons_noise_free_geometry():
    d = make_moons(200, 0.0, seed=0)
    c0 = d.features[d.labels == 0]
    c1 = d.features[d.labels == 1]
    assert np.allclose(np.hypot(c0[:, 0], c0[:, 1]), 1.0, atol=1e-9)
    assert np.allclose(np.hypot(1 - c1[:, 0], 0.5 - c1[:, 1]), 1.0, atol=1e-9)
    assert np.all(c0[:, 1] >= -1e-12) and np.all(c1[:, 1] <= 0.5 + 1e-12)
    # t = 0 endpoints
    assert np.any(np.all(np.isclose(c0, [1.0, 0.0]), axis=1))
    assert np.any(np.all(np.isclose(c1, [0.0, 0.5]), axis=1))


def test_moons_deterministic_and_noisy():
    a = make_moons(100, 0.15, seed=2)
    b = make_moons(100, 0.15, seed=2)
    assert a.features.tobytes() == b.features.tobytes()
    clean = make_moons(100, 0.0, seed=2)
    assert not np.allclose(np.sort(a.features, axis=0), np.sort(clean.features, axis=0))


@pytest.mark.parametrize("kwargs", [dict(n_samples=101), dict(noise_std=-0.1)])
def test_moons_preconditions(kwargs):
    args = dict(n_samples=100, noise_std=0.1)
    args.update(kwargs)
    with pytest.raises(ConfigurationError):
        make_moons(**args)


def test_split_sizes_and_stratification():
    d = make_moons(100, 0.1, seed=0)
    train, test = train_test_split(d, 0.25, seed=5)
    assert (len(train), len(test)) == (75, 25)
    for part, size in ((train, 75), (test, 25)):
        counts = np.bincount(part.labels, minlength=2)
        assert abs(counts[0] - size / 2) <= 1 and abs(counts[1] - size / 2) <= 1
    rows = {tuple(r) for r in np.vstack([train.features, test.features])}
    assert len(rows) == 100


def test_split_deterministic():
    d = make_classification(100, 4, 2, 1.0, seed=0)
    a = train_test_split(d, 0.3, seed=1)
    b = train_test_split(d, 0.3, seed=1)
    assert all(np.array_equal(x.features, y.features) for x, y in zip(a, b))


@pytest.mark.parametrize("fraction", [0.0, 1.0, -0.2, 1.5])
def test_split_fraction_range(fraction):
    with pytest.raises(ConfigurationError):
        train_test_split(make_moons(20, 0.1), fraction)


def test_csv_round_trip(tmp_path):
    d = make_classification(20, 3, 2, 1.0, seed=0)
    path = tmp_path / "d.csv"
    write_csv(d, path)
    assert path.read_text().splitlines()[0] == "f0,f1,f2,label"
    back = read_csv(path)
    assert np.allclose(back.features, d.features, rtol=1e-8)
    assert np.array_equal(back.labels, d.labels)


def test_dataset_length_mismatch():
    with pytest.raises(ValueError):
        Dataset(np.zeros((3, 2)), np.zeros(2))
