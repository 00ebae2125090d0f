"""Feature sets and datasets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

OUTLIER = -1


class DataError(ValueError):
    """Malformed feature set or dataset."""


@dataclass(eq=False)
class FeatureMatrix:
    """One feature set: a ``D x n`` matrix with one attribute vector per column.

    ``dummy`` flags padding columns that stand for unmatched slots; their
    feature values are placeholders and carry zero affinity to everything.
    """

    features: np.ndarray
    set_id: str = ""
    dummy: np.ndarray | None = None

    def __post_init__(self):
        f = np.asarray(self.features, dtype=np.float64)
        if f.ndim != 2 or f.shape[0] < 1 or f.shape[1] < 1:
            raise DataError(f"features must be a non-empty D x n matrix, got shape {f.shape}")
        if not np.all(np.isfinite(f)):
            raise DataError(f"feature set {self.set_id!r} has non-finite entries")
        self.features = f
        if self.dummy is None:
            self.dummy = np.zeros(f.shape[1], dtype=bool)
        else:
            self.dummy = np.asarray(self.dummy, dtype=bool)
            if self.dummy.shape != (f.shape[1],):
                raise DataError("dummy mask must have one entry per column")
        self.set_id = str(self.set_id)

    @property
    def dim(self) -> int:
        return self.features.shape[0]

    @property
    def n(self) -> int:
        return self.features.shape[1]

    @property
    def has_dummies(self) -> bool:
        return bool(self.dummy.any())

    def col(self, t: int) -> np.ndarray:
        return self.features[:, t]

    def __eq__(self, other):
        if not isinstance(other, FeatureMatrix):
            return NotImplemented
        return (
            self.set_id == other.set_id
            and _bit_equal(self.features, other.features)
            and np.array_equal(self.dummy, other.dummy)
        )


def as_feature_matrix(x, set_id: str = "") -> FeatureMatrix:
    if isinstance(x, FeatureMatrix):
        return x
    return FeatureMatrix(np.asarray(x), set_id)


def _bit_equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and a.dtype == b.dtype and a.tobytes() == b.tobytes()


@dataclass(eq=False)
class Dataset:
    """A collection of feature sets with optional per-node entity labels.

    ``labels[i][t]`` is the entity id of node ``t`` of set ``i``; outliers and
    dummy nodes carry :data:`OUTLIER`.
    """

    sets: list[FeatureMatrix]
    labels: list[np.ndarray] | None = None
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.sets = [as_feature_matrix(s, str(i)) for i, s in enumerate(self.sets)]
        if not self.sets:
            raise DataError("dataset has no feature sets")
        dims = {s.dim for s in self.sets}
        if len(dims) != 1:
            raise DataError(f"feature sets disagree on attribute dimension: {sorted(dims)}")
        if self.labels is not None:
            self.labels = [np.asarray(lab, dtype=np.int64) for lab in self.labels]
            if len(self.labels) != len(self.sets):
                raise DataError("need one label vector per feature set")
            for s, lab in zip(self.sets, self.labels):
                if lab.shape != (s.n,):
                    raise DataError(f"label vector of set {s.set_id!r} has wrong length")
                real = lab[lab != OUTLIER]
                if np.any(real < 0) or len(np.unique(real)) != len(real):
                    raise DataError(f"labels of set {s.set_id!r} repeat an entity or use a bad id")

    @property
    def n_sets(self) -> int:
        return len(self.sets)

    @property
    def dim(self) -> int:
        return self.sets[0].dim

    @property
    def sizes(self) -> list[int]:
        return [s.n for s in self.sets]

    @property
    def is_ragged(self) -> bool:
        return len(set(self.sizes)) > 1

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        if self.meta != other.meta or len(self.sets) != len(other.sets):
            return False
        if not all(a == b for a, b in zip(self.sets, other.sets)):
            return False
        if (self.labels is None) != (other.labels is None):
            return False
        if self.labels is not None:
            return all(np.array_equal(a, b) for a, b in zip(self.labels, other.labels))
        return True


def pad_sets(dataset: Dataset) -> Dataset:
    """Append dummy columns so every set has the size of the largest one."""
    n = max(dataset.sizes)
    sets = []
    labels = [] if dataset.labels is not None else None
    for i, s in enumerate(dataset.sets):
        extra = n - s.n
        feats = np.hstack([s.features, np.zeros((s.dim, extra))])
        dummy = np.concatenate([s.dummy, np.ones(extra, dtype=bool)])
        sets.append(FeatureMatrix(feats, s.set_id, dummy))
        if labels is not None:
            labels.append(np.concatenate([dataset.labels[i], np.full(extra, OUTLIER)]))
    return Dataset(sets, labels, dict(dataset.meta))
