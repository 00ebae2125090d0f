import numpy as np
import pytest

from clustermatch.data import OUTLIER
from clustermatch.matchers import METHODS, MatchOptions, run_method
from clustermatch.metrics import accuracy
from clustermatch.synthgen import SyntheticSpec, generate


def test_shapes_and_labels():
    data = generate(SyntheticSpec(4, 6, 3, dim=5, epsilon=0.1, seed=1))
    assert data.n_sets == 4 and data.dim == 5
    for s, lab in zip(data.sets, data.labels):
        assert s.n == 9
        assert sorted(lab[lab != OUTLIER].tolist()) == list(range(6))
        assert np.count_nonzero(lab == OUTLIER) == 3


def test_default_dimension():
    assert SyntheticSpec(2, 3).dim == 5


def test_deterministic():
    a = generate(SyntheticSpec(5, 7, 2, epsilon=0.1, seed=3))
    b = generate(SyntheticSpec(5, 7, 2, epsilon=0.1, seed=3))
    assert a == b


def test_different_seeds_differ():
    a = generate(SyntheticSpec(3, 5, epsilon=0.1, seed=0))
    b = generate(SyntheticSpec(3, 5, epsilon=0.1, seed=1))
    assert not np.array_equal(a.sets[0].features, b.sets[0].features)


def test_zero_noise_copies_of_template():
    data = generate(SyntheticSpec(4, 8, 0, epsilon=0.0, seed=2))
    by_entity = []
    for s, lab in zip(data.sets, data.labels):
        by_entity.append(s.features[:, np.argsort(lab)])
    for f in by_entity[1:]:
        assert np.array_equal(f, by_entity[0])
    assert np.all((by_entity[0] >= 0) & (by_entity[0] <= 1))


@pytest.mark.parametrize("method", METHODS)
def test_zero_noise_matchable_by_anything(method):
    data = generate(SyntheticSpec(4, 8, 0, epsilon=0.0, seed=5))
    res = run_method(method, data.sets, MatchOptions(seed=5))
    assert accuracy(res.config, data.labels) == 1.0


def test_noise_statistics():
    eps = 0.07
    spec = SyntheticSpec(200, 100, 0, dim=5, epsilon=eps, seed=9)
    data = generate(spec)
    # The template is the generator's first draw.
    template = np.random.default_rng(9).uniform(0.0, 1.0, size=(5, 100))
    noise = np.stack([s.features[:, np.argsort(lab)] - template for s, lab in zip(data.sets, data.labels)])
    assert noise.size == 100_000
    assert abs(noise.mean()) < 0.01 * eps
    assert noise.std(ddof=1) == pytest.approx(eps, rel=0.01)


def test_per_set_epsilon():
    data = generate(SyntheticSpec(3, 50, 0, epsilon=(0.0, 0.0, 0.5), seed=4))
    a, b, c = (s.features[:, np.argsort(lab)] for s, lab in zip(data.sets, data.labels))
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_sets=1, n_inliers=3),
        dict(n_sets=2, n_inliers=0),
        dict(n_sets=2, n_inliers=3, n_outliers=-1),
        dict(n_sets=2, n_inliers=3, dim=0),
        dict(n_sets=2, n_inliers=3, epsilon=-0.1),
        dict(n_sets=2, n_inliers=3, epsilon=(0.1, 0.2, 0.3)),
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        SyntheticSpec(**kwargs)
