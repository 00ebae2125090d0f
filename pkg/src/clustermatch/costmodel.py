"""Exponential-of-distance affinity between feature sets.

``build_cost`` returns ``exp(-||f_s - f_t||_2 / (sigma_sq * D))``.  The value
is 1 for identical attribute vectors and decays with distance, so it is an
affinity: matchers maximise it by handing its negation to the LAP solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import FeatureMatrix, as_feature_matrix

DEFAULT_SIGMA_SQ = 0.15


@dataclass(frozen=True)
class CostParams:
    sigma_sq: float = DEFAULT_SIGMA_SQ

    def __post_init__(self):
        if not (self.sigma_sq > 0 and np.isfinite(self.sigma_sq)):
            raise ValueError(f"sigma_sq must be positive, got {self.sigma_sq}")


def pairwise_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Euclidean distances between the columns of ``a`` (D x n1) and ``b`` (D x n2)."""
    diff = a[:, :, None] - b[:, None, :]
    return np.sqrt(np.einsum("dst,dst->st", diff, diff))


def build_cost(a, b, params: CostParams | None = None) -> np.ndarray:
    """Affinity matrix with entry ``(s, t)`` comparing column ``s`` of ``a`` to column ``t`` of ``b``.

    Dummy columns are ignored here; see :func:`pair_affinity`.
    """
    params = params or CostParams()
    a = as_feature_matrix(a)
    b = as_feature_matrix(b)
    if a.dim != b.dim:
        raise ValueError(f"attribute dimensions differ: {a.dim} vs {b.dim}")
    dist = pairwise_distances(a.features, b.features)
    return np.exp(-dist / (params.sigma_sq * a.dim))


def pair_affinity(a: FeatureMatrix, b: FeatureMatrix, params: CostParams | None = None) -> np.ndarray:
    """:func:`build_cost` with zero affinity on every row or column owned by a dummy node."""
    aff = build_cost(a, b, params)
    if a.has_dummies or b.has_dummies:
        aff[a.dummy, :] = 0.0
        aff[:, b.dummy] = 0.0
    return aff
