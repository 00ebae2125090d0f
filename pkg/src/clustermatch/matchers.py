"""Multi-set matchers: pairwise and star baselines plus constrained clustering.

All four strategies read a list of equally sized feature sets (pad ragged
input first, see :func:`clustermatch.data.pad_sets`):

* :func:`hung_pair` solves one LAP for every pair of sets.
* :func:`hung_lin` matches every set to one random reference and composes.
* :func:`match_cluster_fast` starts like ``hung_lin`` and then repeatedly
  re-assigns each set to the centroids of all the others.
* :func:`match_cluster` starts from the ``hung_pair`` configuration, takes the
  most consistent set as the reference and visits the others in order of
  decreasing pairwise consistency.

The cluster matchers return a :class:`StarConfiguration`; expand it with
:func:`star_to_config` for pairwise evaluation.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .assignment import solve_lap
from .consistency import (
    MatchConfiguration,
    StarConfiguration,
    expand_star,
    pairwise_consistency,
    unary_consistencies,
)
from .costmodel import DEFAULT_SIGMA_SQ, CostParams, pair_affinity
from .data import FeatureMatrix, as_feature_matrix
from .metrics import accuracy, aligned_sets, clustering_error_aligned


class MatchError(ValueError):
    """Input unsuitable for the requested matcher."""


@dataclass(frozen=True)
class MatchOptions:
    max_outer_iters: int = 10
    seed: int = 0
    sigma_sq: float = DEFAULT_SIGMA_SQ

    def __post_init__(self):
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be >= 1")

    @property
    def cost_params(self) -> CostParams:
        return CostParams(self.sigma_sq)


class LapCounter:
    """Counts the LAP solves a matcher performs."""

    def __init__(self):
        self.calls = 0

    def match(self, affinity: np.ndarray) -> np.ndarray:
        self.calls += 1
        perm, _ = solve_lap(-affinity)
        return perm


@dataclass
class IterationRecord:
    iteration: int
    accuracy: float | None
    clustering_error: float
    changed_count: int


@dataclass
class IterationTrace:
    """Per-sweep history of a cluster matcher.

    ``records[0]`` describes the initial star; each later record follows one
    full sweep.  ``changed_count`` is the number of reference positions whose
    match changed during the sweep.
    """

    reference: int
    order: list[int]
    records: list[IterationRecord] = field(default_factory=list)
    init_lap_calls: int = 0
    lap_calls: int = 0

    @property
    def sweeps(self) -> int:
        return len(self.records) - 1

    @property
    def converged(self) -> bool:
        return bool(self.records) and self.records[-1].changed_count == 0


def _prepare(sets: Sequence, minimum: int) -> list[FeatureMatrix]:
    sets = [as_feature_matrix(s, str(i)) for i, s in enumerate(sets)]
    if len(sets) < minimum:
        raise MatchError(f"need at least {minimum} feature sets, got {len(sets)}")
    if len({s.dim for s in sets}) != 1:
        raise MatchError("feature sets disagree on attribute dimension")
    if len({s.n for s in sets}) != 1:
        raise MatchError("feature sets have different sizes; pad them first")
    return sets


def pick_reference(n_sets: int, seed: int) -> int:
    return int(np.random.default_rng(seed).integers(n_sets))


def star_to_config(star: StarConfiguration) -> MatchConfiguration:
    return expand_star(star)


def hung_pair(sets: Sequence, opts: MatchOptions | None = None, counter: LapCounter | None = None) -> MatchConfiguration:
    """Independent LAP on each of the ``N(N-1)/2`` pairs."""
    opts = opts or MatchOptions()
    counter = counter or LapCounter()
    sets = _prepare(sets, 2)
    params = opts.cost_params
    pairwise = {}
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            pairwise[i, j] = counter.match(pair_affinity(sets[i], sets[j], params))
    return MatchConfiguration(len(sets), sets[0].n, pairwise)


def _reference_star(sets: list[FeatureMatrix], reference: int, params: CostParams, counter: LapCounter) -> StarConfiguration:
    maps = {
        i: counter.match(pair_affinity(sets[reference], s, params))
        for i, s in enumerate(sets)
        if i != reference
    }
    return StarConfiguration(reference, maps, len(sets), sets[0].n)


def hung_lin_star(sets: Sequence, opts: MatchOptions | None = None, counter: LapCounter | None = None) -> StarConfiguration:
    """The ``N - 1`` reference matchings behind :func:`hung_lin`."""
    opts = opts or MatchOptions()
    counter = counter or LapCounter()
    sets = _prepare(sets, 2)
    r = pick_reference(len(sets), opts.seed)
    return _reference_star(sets, r, opts.cost_params, counter)


def hung_lin(sets: Sequence, opts: MatchOptions | None = None, counter: LapCounter | None = None) -> MatchConfiguration:
    """LAP from a seeded random reference to each other set, composed through it."""
    return expand_star(hung_lin_star(sets, opts, counter))


def cluster_centers(aligned: Sequence[FeatureMatrix], exclude: int) -> FeatureMatrix:
    """Column-wise mean of the aligned sets other than ``exclude``.

    Dummy columns are averaged like any other column; only the affinity
    step treats them specially.
    """
    feats = np.stack([a.features for i, a in enumerate(aligned) if i != exclude])
    return FeatureMatrix(feats.sum(axis=0) / feats.shape[0], "centers")


def update_step(
    k: int,
    star: StarConfiguration,
    aligned: Sequence[FeatureMatrix],
    opts: MatchOptions | None = None,
    counter: LapCounter | None = None,
) -> np.ndarray:
    """Re-assign set ``k`` to the centroids of the other aligned sets.

    Returns the new reference-to-``k`` map; ``star`` is not modified.
    """
    if k == star.reference:
        raise MatchError("the reference set is never updated")
    opts = opts or MatchOptions()
    counter = counter or LapCounter()
    centers = cluster_centers(aligned, k)
    # q[c] is the aligned column of set k given to cluster c.
    q = counter.match(pair_affinity(centers, aligned[k], opts.cost_params))
    return star.maps[k][q]


def _realign(s: FeatureMatrix, perm: np.ndarray) -> FeatureMatrix:
    return FeatureMatrix(s.features[:, perm], s.set_id, s.dummy[perm])


def _record(iteration, star, aligned, labels, changed) -> IterationRecord:
    acc = None
    if labels is not None:
        acc = accuracy(expand_star(star), labels)
    return IterationRecord(iteration, acc, clustering_error_aligned(aligned), changed)


def _sweep(
    sets: list[FeatureMatrix],
    star: StarConfiguration,
    trace: IterationTrace,
    opts: MatchOptions,
    counter: LapCounter,
    labels,
) -> StarConfiguration:
    star = star.copy()
    aligned = aligned_sets(star, sets)
    trace.records.append(_record(0, star, aligned, labels, 0))
    for it in range(1, opts.max_outer_iters + 1):
        changed = 0
        for k in trace.order:
            new = update_step(k, star, aligned, opts, counter)
            diff = int(np.count_nonzero(new != star.maps[k]))
            if diff:
                star.maps[k] = new
                aligned[k] = _realign(sets[k], new)
                changed += diff
        trace.records.append(_record(it, star, aligned, labels, changed))
        if changed == 0:
            break
    trace.lap_calls = counter.calls
    return star


def match_cluster_fast(
    sets: Sequence,
    opts: MatchOptions | None = None,
    counter: LapCounter | None = None,
    labels: Sequence[np.ndarray] | None = None,
) -> tuple[StarConfiguration, IterationTrace]:
    """Constrained clustering from a seeded random reference, sets visited in index order.

    ``labels`` (ground truth) is only used to fill ``accuracy`` in the trace.
    """
    opts = opts or MatchOptions()
    counter = counter or LapCounter()
    sets = _prepare(sets, 3)
    r = pick_reference(len(sets), opts.seed)
    star = _reference_star(sets, r, opts.cost_params, counter)
    trace = IterationTrace(r, [k for k in range(len(sets)) if k != r], init_lap_calls=counter.calls)
    return _sweep(sets, star, trace, opts, counter, labels), trace


def match_cluster(
    sets: Sequence,
    opts: MatchOptions | None = None,
    counter: LapCounter | None = None,
    labels: Sequence[np.ndarray] | None = None,
) -> tuple[StarConfiguration, IterationTrace]:
    """Constrained clustering with consistency-driven reference and update order.

    The reference maximises unary consistency of the ``hung_pair``
    configuration; the other sets are updated in decreasing pairwise
    consistency with it.  Ties go to the smaller set index.  The order is
    fixed once and reused in every sweep.
    """
    opts = opts or MatchOptions()
    counter = counter or LapCounter()
    sets = _prepare(sets, 3)
    config = hung_pair(sets, opts, counter)
    init_calls = counter.calls
    cu = unary_consistencies(config)
    r = int(np.argmax(cu))
    others = [k for k in range(len(sets)) if k != r]
    cp = {k: pairwise_consistency(r, k, config) for k in others}
    order = sorted(others, key=lambda k: (-cp[k], k))
    star = StarConfiguration(r, {k: config.perm(r, k) for k in others}, len(sets), config.n)
    trace = IterationTrace(r, order, init_lap_calls=init_calls)
    return _sweep(sets, star, trace, opts, counter, labels), trace


METHODS = ("matchCluster", "matchClusterFast", "hungPair", "hungLin")


@dataclass
class MatchResult:
    method: str
    config: MatchConfiguration
    star: StarConfiguration | None = None
    trace: IterationTrace | None = None
    lap_calls: int = 0


def run_method(method: str, sets: Sequence, opts: MatchOptions | None = None, labels=None) -> MatchResult:
    """Dispatch by CLI method name."""
    opts = opts or MatchOptions()
    counter = LapCounter()
    if method == "hungPair":
        return MatchResult(method, hung_pair(sets, opts, counter), lap_calls=counter.calls)
    if method == "hungLin":
        star = hung_lin_star(sets, opts, counter)
        return MatchResult(method, expand_star(star), star, lap_calls=counter.calls)
    if method == "matchClusterFast":
        star, trace = match_cluster_fast(sets, opts, counter, labels)
    elif method == "matchCluster":
        star, trace = match_cluster(sets, opts, counter, labels)
    else:
        raise MatchError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    return MatchResult(method, expand_star(star), star, trace, counter.calls)
