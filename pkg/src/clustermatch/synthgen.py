"""Seeded synthetic feature-set collections with known correspondence.

A latent template of ``n_inliers`` attribute vectors is drawn from
``Uniform[0, 1]^D``.  Each emitted set is the template plus i.i.d. Gaussian
noise of standard deviation ``epsilon``, extended by ``n_outliers`` fresh
uniform vectors, with its columns shuffled.  The template itself is never
emitted.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .data import OUTLIER, Dataset, FeatureMatrix


@dataclass(frozen=True)
class SyntheticSpec:
    n_sets: int
    n_inliers: int
    n_outliers: int = 0
    dim: int = 5
    # A scalar, or one value per set for heterogeneous noise.
    epsilon: float | Sequence[float] = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_sets < 2:
            raise ValueError("n_sets must be >= 2")
        if self.n_inliers < 1:
            raise ValueError("n_inliers must be >= 1")
        if self.n_outliers < 0:
            raise ValueError("n_outliers must be >= 0")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        eps = self.epsilons()
        if np.any(eps < 0) or not np.all(np.isfinite(eps)):
            raise ValueError("epsilon must be finite and >= 0")

    def epsilons(self) -> np.ndarray:
        eps = np.asarray(self.epsilon, dtype=np.float64)
        if eps.ndim == 0:
            return np.full(self.n_sets, float(eps))
        if eps.shape != (self.n_sets,):
            raise ValueError(f"per-set epsilon needs {self.n_sets} values, got {eps.shape[0]}")
        return eps


def generate(spec: SyntheticSpec) -> Dataset:
    rng = np.random.default_rng(spec.seed)
    n = spec.n_inliers + spec.n_outliers
    template = rng.uniform(0.0, 1.0, size=(spec.dim, spec.n_inliers))
    base_labels = np.concatenate([np.arange(spec.n_inliers), np.full(spec.n_outliers, OUTLIER)])
    sets, labels = [], []
    for i, eps in enumerate(spec.epsilons()):
        inliers = template + rng.normal(0.0, eps, size=template.shape)
        outliers = rng.uniform(0.0, 1.0, size=(spec.dim, spec.n_outliers))
        shuffle = rng.permutation(n)
        feats = np.hstack([inliers, outliers])[:, shuffle]
        sets.append(FeatureMatrix(feats, str(i)))
        labels.append(base_labels[shuffle])
    if np.ndim(spec.epsilon) == 0:
        eps_text = repr(float(spec.epsilon))
    else:
        eps_text = ",".join(repr(float(e)) for e in spec.epsilon)
    meta = {
        "generator": "synthetic",
        "n_sets": str(spec.n_sets),
        "n_inliers": str(spec.n_inliers),
        "n_outliers": str(spec.n_outliers),
        "dim": str(spec.dim),
        "epsilon": eps_text,
        "seed": str(spec.seed),
    }
    return Dataset(sets, labels, meta)
