"""Matching configurations and their cycle-consistency scores.

A configuration stores one permutation per unordered pair of sets.  With
``perm = config.perm(i, j)``, node ``s`` of set ``i`` corresponds to node
``perm[s]`` of set ``j``; composing ``i -> k -> j`` gives
``config.perm(k, j)[config.perm(i, k)]``.

For permutation matrices ``||X_ij - X_ik X_kj||_F = sqrt(2 m)`` where ``m``
is the number of nodes the two maps send to different places; the scores
below use that form.  Set indices are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .assignment import is_permutation, perm_to_matrix


class ConfigurationError(ValueError):
    """A configuration or star is incomplete or holds invalid permutations."""


def invert(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.shape[0], dtype=perm.dtype)
    return inv


def _check_perm(perm, n: int, what: str) -> np.ndarray:
    perm = np.asarray(perm, dtype=np.int64)
    if not is_permutation(perm, n):
        raise ConfigurationError(f"{what} is not a permutation of length {n}")
    return perm


class MatchConfiguration:
    """Pairwise correspondences between all ``N`` sets of ``n`` nodes each."""

    def __init__(self, n_sets: int, n: int, pairwise: dict[tuple[int, int], np.ndarray]):
        if n_sets < 2:
            raise ConfigurationError("a configuration needs at least two sets")
        self.n_sets = n_sets
        self.n = n
        self._pairs: dict[tuple[int, int], np.ndarray] = {}
        for i in range(n_sets):
            for j in range(i + 1, n_sets):
                if (i, j) not in pairwise:
                    raise ConfigurationError(f"missing correspondence for pair ({i}, {j})")
                self._pairs[i, j] = _check_perm(pairwise[i, j], n, f"X[{i},{j}]")
        self._tensor = None

    @property
    def pairs(self) -> dict[tuple[int, int], np.ndarray]:
        return dict(self._pairs)

    def _check_index(self, i: int):
        if not 0 <= i < self.n_sets:
            raise IndexError(f"set index {i} out of range for {self.n_sets} sets")

    def perm(self, i: int, j: int) -> np.ndarray:
        self._check_index(i)
        self._check_index(j)
        if i == j:
            return np.arange(self.n, dtype=np.int64)
        if i < j:
            return self._pairs[i, j].copy()
        return invert(self._pairs[j, i])

    def matrix(self, i: int, j: int) -> np.ndarray:
        return perm_to_matrix(self.perm(i, j))

    def tensor(self) -> np.ndarray:
        """All maps as an ``N x N x n`` array, ``T[i, j] = perm(i, j)``."""
        if self._tensor is None:
            t = np.empty((self.n_sets, self.n_sets, self.n), dtype=np.int64)
            for i in range(self.n_sets):
                for j in range(self.n_sets):
                    t[i, j] = self.perm(i, j)
            t.setflags(write=False)
            self._tensor = t
        return self._tensor

    def __eq__(self, other):
        if not isinstance(other, MatchConfiguration):
            return NotImplemented
        return (
            self.n_sets == other.n_sets
            and self.n == other.n
            and all(np.array_equal(p, other._pairs[key]) for key, p in self._pairs.items())
        )


@dataclass
class StarConfiguration:
    """Correspondences from one reference set ``r`` to every other set.

    ``maps[i][c]`` is the node of set ``i`` matched to node ``c`` of the
    reference, i.e. the permutation form of ``X_ri``.
    """

    reference: int
    maps: dict[int, np.ndarray]
    n_sets: int
    n: int = field(default=0)

    def __post_init__(self):
        if not 0 <= self.reference < self.n_sets:
            raise ConfigurationError(f"reference {self.reference} out of range")
        if not self.n and self.maps:
            self.n = len(next(iter(self.maps.values())))
        maps = {}
        for i in range(self.n_sets):
            if i == self.reference:
                continue
            if i not in self.maps:
                raise ConfigurationError(f"star is missing the map to set {i}")
            maps[i] = _check_perm(self.maps[i], self.n, f"X[{self.reference},{i}]")
        self.maps = maps

    def perm_from_ref(self, i: int) -> np.ndarray:
        if i == self.reference:
            return np.arange(self.n, dtype=np.int64)
        return self.maps[i]

    def copy(self) -> "StarConfiguration":
        return StarConfiguration(self.reference, {i: p.copy() for i, p in self.maps.items()}, self.n_sets, self.n)

    def __eq__(self, other):
        if not isinstance(other, StarConfiguration):
            return NotImplemented
        return (
            self.reference == other.reference
            and self.n_sets == other.n_sets
            and self.n == other.n
            and all(np.array_equal(p, other.maps[i]) for i, p in self.maps.items())
        )


def expand_star(star: StarConfiguration) -> MatchConfiguration:
    """Full configuration with every pair composed through the reference: ``X_ij = X_ir X_rj``."""
    from_ref = [star.perm_from_ref(i) for i in range(star.n_sets)]
    to_ref = [invert(p) for p in from_ref]
    pairwise = {}
    for i in range(star.n_sets):
        for j in range(i + 1, star.n_sets):
            pairwise[i, j] = from_ref[j][to_ref[i]]
    return MatchConfiguration(star.n_sets, star.n, pairwise)


def _half_frobenius(mismatches: np.ndarray) -> np.ndarray:
    return np.sqrt(2.0 * mismatches) / 2.0


def _mismatches_through(t: np.ndarray, k: int) -> np.ndarray:
    """``m[i, j]`` = number of nodes where ``X_ij`` and ``X_ik X_kj`` disagree."""
    via = t[k][:, t[:, k]]  # via[j, i, s] = T[k, j][T[i, k][s]]
    return np.count_nonzero(t != via.transpose(1, 0, 2), axis=2)


def unary_consistency(k: int, config: MatchConfiguration) -> float:
    """How well every pair ``(i, j)`` agrees with the path through set ``k``; 1 means perfectly."""
    config._check_index(k)
    N, n = config.n_sets, config.n
    m = _mismatches_through(config.tensor(), k)
    iu = np.triu_indices(N, 1)
    total = math.fsum(_half_frobenius(m[iu]).tolist())
    return 1.0 - total / (n * N * (N - 1) / 2)


def unary_consistencies(config: MatchConfiguration) -> np.ndarray:
    return np.array([unary_consistency(k, config) for k in range(config.n_sets)])


def pairwise_consistency(i: int, j: int, config: MatchConfiguration) -> float:
    """Agreement of ``X_ij`` with every two-step path ``i -> k -> j``."""
    config._check_index(i)
    config._check_index(j)
    if i == j:
        raise ValueError("pairwise consistency needs two distinct sets")
    N, n = config.n_sets, config.n
    t = config.tensor()
    direct = t[i, j]
    via = t[:, j][np.arange(N)[:, None], t[i, :]]  # via[k, s] = T[k, j][T[i, k][s]]
    m = np.count_nonzero(via != direct[None, :], axis=1)
    total = math.fsum(_half_frobenius(m).tolist())
    return 1.0 - total / (n * N)


def mean_unary_consistency(config: MatchConfiguration) -> float:
    return float(np.mean(unary_consistencies(config)))
