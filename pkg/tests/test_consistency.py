import numpy as np
import pytest

from clustermatch.assignment import perm_to_matrix
from clustermatch.consistency import (
    ConfigurationError,
    MatchConfiguration,
    StarConfiguration,
    expand_star,
    pairwise_consistency,
    unary_consistencies,
    unary_consistency,
)
from tests.oracles import naive_pairwise, naive_unary, random_configuration

I2 = np.array([0, 1])
SWAP = np.array([1, 0])


@pytest.fixture
def swap_config():
    # X_01 = I, X_12 = I, X_02 = swap: only the (1, 2) or (0, 2) path disagrees.
    return MatchConfiguration(3, 2, {(0, 1): I2, (1, 2): I2, (0, 2): SWAP})


def identity_config(n_sets, n):
    ident = np.arange(n)
    return MatchConfiguration(n_sets, n, {(i, j): ident for i in range(n_sets) for j in range(i + 1, n_sets)})


class TestConfiguration:
    def test_accessors(self, swap_config):
        assert swap_config.perm(1, 1).tolist() == [0, 1]
        assert swap_config.perm(2, 0).tolist() == [1, 0]
        assert np.array_equal(swap_config.matrix(2, 0), swap_config.matrix(0, 2).T)

    def test_missing_pair(self):
        with pytest.raises(ConfigurationError):
            MatchConfiguration(3, 2, {(0, 1): I2, (1, 2): I2})

    def test_rejects_non_permutation(self):
        with pytest.raises(ConfigurationError):
            MatchConfiguration(2, 2, {(0, 1): np.array([0, 0])})

    def test_index_out_of_range(self, swap_config):
        with pytest.raises(IndexError):
            unary_consistency(3, swap_config)
        with pytest.raises(IndexError):
            pairwise_consistency(0, 5, swap_config)


class TestUnary:
    def test_identity_configuration(self):
        assert np.all(unary_consistencies(identity_config(4, 5)) == 1.0)

    def test_swap_example(self, swap_config):
        for k in range(3):
            assert unary_consistency(k, swap_config) == 5 / 6

    @pytest.mark.parametrize("seed", range(40))
    def test_matches_naive_definition(self, seed):
        config = random_configuration(np.random.default_rng(seed))
        for k in range(config.n_sets):
            assert unary_consistency(k, config) == naive_unary(k, config)

    @pytest.mark.parametrize("seed", range(40))
    def test_range(self, seed):
        config = random_configuration(np.random.default_rng(100 + seed))
        cu = unary_consistencies(config)
        assert np.all((cu > 0) & (cu <= 1))


class TestPairwise:
    def test_identity_configuration(self):
        config = identity_config(4, 3)
        assert all(pairwise_consistency(i, j, config) == 1.0 for i in range(4) for j in range(4) if i != j)

    def test_swap_example(self, swap_config):
        assert pairwise_consistency(0, 1, swap_config) == 5 / 6

    def test_same_set_rejected(self, swap_config):
        with pytest.raises(ValueError):
            pairwise_consistency(1, 1, swap_config)

    @pytest.mark.parametrize("seed", range(40))
    def test_matches_naive_definition(self, seed):
        config = random_configuration(np.random.default_rng(seed))
        for i in range(config.n_sets):
            for j in range(config.n_sets):
                if i != j:
                    value = pairwise_consistency(i, j, config)
                    assert value == naive_pairwise(i, j, config)
                    assert 0 < value <= 1


class TestExpandStar:
    def test_identity_star(self):
        star = StarConfiguration(1, {0: np.arange(4), 2: np.arange(4)}, 3)
        assert expand_star(star) == identity_config(3, 4)

    def test_composition(self):
        rng = np.random.default_rng(5)
        p1, p2 = rng.permutation(6), rng.permutation(6)
        star = StarConfiguration(0, {1: p1, 2: p2}, 3)
        config = expand_star(star)
        x01, x02 = perm_to_matrix(p1), perm_to_matrix(p2)
        assert np.array_equal(config.matrix(1, 2), x01.T @ x02)
        assert np.array_equal(config.matrix(0, 2), x02)

    @pytest.mark.parametrize("seed", range(30))
    def test_random_star_is_fully_consistent(self, seed):
        rng = np.random.default_rng(seed)
        n_sets, n = int(rng.integers(2, 7)), int(rng.integers(1, 9))
        r = int(rng.integers(n_sets))
        star = StarConfiguration(r, {i: rng.permutation(n) for i in range(n_sets) if i != r}, n_sets, n)
        config = expand_star(star)
        for k in range(n_sets):
            assert naive_unary(k, config) == 1.0
            assert unary_consistency(k, config) == 1.0
        for i in range(n_sets):
            for j in range(i + 1, n_sets):
                assert pairwise_consistency(i, j, config) == 1.0

    def test_missing_map(self):
        with pytest.raises(ConfigurationError):
            StarConfiguration(0, {1: np.arange(3)}, 3, 3)


def test_perfect_consistency_characterisation():
    """All C_u = 1 exactly when all C_p = 1, and both hold for star expansions only."""
    rng = np.random.default_rng(11)
    seen_inconsistent = False
    for _ in range(200):
        config = random_configuration(rng, max_sets=4, max_n=3)
        all_cu = bool(np.all(unary_consistencies(config) == 1.0))
        all_cp = all(
            pairwise_consistency(i, j, config) == 1.0
            for i in range(config.n_sets) for j in range(i + 1, config.n_sets)
        )
        star = StarConfiguration(0, {i: config.perm(0, i) for i in range(1, config.n_sets)}, config.n_sets, config.n)
        factors = expand_star(star) == config
        assert all_cu == all_cp == factors
        seen_inconsistent |= not all_cu
    assert seen_inconsistent
