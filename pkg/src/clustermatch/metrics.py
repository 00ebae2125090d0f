"""Accuracy, clustering error and per-method summaries."""

from __future__ import annotations

import statistics
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass

import numpy as np

from .consistency import MatchConfiguration, StarConfiguration
from .data import OUTLIER, FeatureMatrix, as_feature_matrix


def _pair_counts(config: MatchConfiguration, labels: Sequence[np.ndarray], i: int, j: int) -> tuple[int, int]:
    li, lj = labels[i], labels[j]
    shared = (li != OUTLIER) & np.isin(li, lj[lj != OUTLIER])
    mapped = lj[config.perm(i, j)]
    return int(np.count_nonzero(shared & (mapped == li))), int(np.count_nonzero(shared))


def _check_labels(config: MatchConfiguration, labels: Sequence[np.ndarray]):
    if len(labels) != config.n_sets or any(len(lab) != config.n for lab in labels):
        raise ValueError("ground truth does not cover the configuration's sets and nodes")


def accuracy(config: MatchConfiguration, labels: Sequence[np.ndarray], pairs: Iterable[tuple[int, int]] | None = None) -> float:
    """Fraction of shared inlier entities mapped to their true counterpart.

    Counts are pooled over ``pairs`` (default: every unordered pair of sets).
    Outliers and dummy nodes are excluded.  Returns ``nan`` if no entity is
    shared by any pair.
    """
    labels = [np.asarray(lab) for lab in labels]
    _check_labels(config, labels)
    if pairs is None:
        pairs = ((i, j) for i in range(config.n_sets) for j in range(i + 1, config.n_sets))
    correct = total = 0
    for i, j in pairs:
        c, t = _pair_counts(config, labels, i, j)
        correct += c
        total += t
    return correct / total if total else float("nan")


def star_accuracy(config: MatchConfiguration, labels: Sequence[np.ndarray], reference: int) -> float:
    """Accuracy restricted to the pairs ``(reference, i)``."""
    pairs = [(reference, i) for i in range(config.n_sets) if i != reference]
    return accuracy(config, labels, pairs)


def aligned_sets(star: StarConfiguration, sets: Sequence) -> list[FeatureMatrix]:
    """Reorder every set's columns so column ``c`` holds the node matched to reference node ``c``."""
    out = []
    for i, s in enumerate(sets):
        s = as_feature_matrix(s)
        p = star.perm_from_ref(i)
        out.append(FeatureMatrix(s.features[:, p], s.set_id, s.dummy[p]))
    return out


def clustering_error_aligned(aligned: Sequence[FeatureMatrix]) -> float:
    feats = np.stack([a.features for a in aligned])  # N x D x n
    real = ~np.stack([a.dummy for a in aligned])  # N x n
    # sum_i ||x_i - mean||^2 == sum_{i,j} ||x_i - x_j||^2 / (2 m); exact zero for identical members.
    diff = feats[:, None] - feats[None, :]
    sq = np.einsum("ijdc,ijdc->ijc", diff, diff)
    both = real[:, None, :] & real[None, :, :]
    count = real.sum(axis=0)
    per_cluster = np.where(count > 0, (sq * both).sum(axis=(0, 1)) / (2 * np.maximum(count, 1)), 0.0)
    return float(per_cluster.sum() / max(int(count.sum()), 1))


def clustering_error(star: StarConfiguration, sets: Sequence) -> float:
    """Mean squared distance of every aligned node to its cluster centroid."""
    if len(sets) != star.n_sets:
        raise ValueError("star and feature sets disagree on the number of sets")
    sets = [as_feature_matrix(s) for s in sets]
    if {s.n for s in sets} != {star.n} or len({s.dim for s in sets}) != 1:
        raise ValueError("feature sets do not match the star's node count")
    return clustering_error_aligned(aligned_sets(star, sets))


@dataclass
class TrialReport:
    method: str
    n_sets: int
    n_inliers: int
    n_outliers: int
    epsilon: float
    seed: int
    accuracy: float
    runtime_ms: float
    mean_Cu: float
    clustering_error: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MethodSummary:
    method: str
    trials: int
    accuracy_mean: float
    accuracy_std: float
    runtime_mean: float
    runtime_std: float


def _mean_std(values: list[float]) -> tuple[float, float]:
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


def summarize(trials: Sequence[TrialReport]) -> dict[str, MethodSummary]:
    """Per-method mean and sample standard deviation of accuracy and runtime."""
    if not trials:
        raise ValueError("no trials to summarize")
    by_method: dict[str, list[TrialReport]] = {}
    for t in trials:
        by_method.setdefault(t.method, []).append(t)
    out = {}
    for method, ts in by_method.items():
        acc = _mean_std([t.accuracy for t in ts])
        rt = _mean_std([t.runtime_ms for t in ts])
        out[method] = MethodSummary(method, len(ts), acc[0], acc[1], rt[0], rt[1])
    return out
