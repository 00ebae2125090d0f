"""Trial runner and parameter sweeps producing CSV rows."""

from __future__ import annotations

import csv
import io
import math
import os
import time
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .consistency import mean_unary_consistency
from .data import OUTLIER, Dataset
from .matchers import METHODS, MatchOptions, run_method
from .metrics import TrialReport, accuracy, clustering_error, star_accuracy
from .synthgen import SyntheticSpec, generate

CSV_COLUMNS = [f.name for f in fields(TrialReport)]
AXES = ("epsilon", "outliers", "n_sets")


def evaluate(method, dataset: Dataset, result, runtime_ms: float, seed: int, accuracy_mode: str = "pairwise") -> TrialReport:
    """Score a :class:`~clustermatch.matchers.MatchResult` against the dataset's labels."""
    config, star = result.config, result.star
    acc = float("nan")
    if dataset.labels is not None:
        if accuracy_mode == "star":
            acc = star_accuracy(config, dataset.labels, star.reference if star else 0)
        else:
            acc = accuracy(config, dataset.labels)
    cerr = clustering_error(star, dataset.sets) if star is not None else float("nan")
    n_inl, n_out, eps = _describe(dataset)
    return TrialReport(
        method=method,
        n_sets=dataset.n_sets,
        n_inliers=n_inl,
        n_outliers=n_out,
        epsilon=eps,
        seed=seed,
        accuracy=acc,
        runtime_ms=runtime_ms,
        mean_Cu=mean_unary_consistency(config),
        clustering_error=cerr,
    )


def _describe(dataset: Dataset) -> tuple[int, int, float]:
    meta = dataset.meta
    if "n_inliers" in meta and "n_outliers" in meta:
        n_inl, n_out = int(meta["n_inliers"]), int(meta["n_outliers"])
    elif dataset.labels is not None:
        n_inl = max(int(np.count_nonzero(lab != OUTLIER)) for lab in dataset.labels)
        n_out = max(dataset.sizes) - n_inl
    else:
        n_inl, n_out = max(dataset.sizes), 0
    try:
        eps = float(meta.get("epsilon", "nan"))
    except ValueError:
        eps = float("nan")
    return n_inl, n_out, eps


def run_trial(method: str, dataset: Dataset, opts: MatchOptions, accuracy_mode: str = "pairwise") -> TrialReport:
    t0 = time.perf_counter()
    result = run_method(method, dataset.sets, opts)
    runtime_ms = (time.perf_counter() - t0) * 1e3
    return evaluate(method, dataset, result, runtime_ms, opts.seed, accuracy_mode)


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    n_sets: int = 30
    n_inliers: int = 20
    n_outliers: int = 0
    dim: int = 5
    epsilon: float = 0.05
    trials: int = 20
    base_seed: int = 0
    methods: tuple[str, ...] = METHODS
    max_outer_iters: int = 10
    sigma_sq: float = 0.15
    accuracy_mode: str = "pairwise"

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}")
        if not self.values:
            raise ValueError("sweep needs at least one axis value")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")

    def synthetic(self, value, trial: int) -> SyntheticSpec:
        params = dict(
            n_sets=self.n_sets,
            n_inliers=self.n_inliers,
            n_outliers=self.n_outliers,
            dim=self.dim,
            epsilon=self.epsilon,
            seed=self.base_seed + trial,
        )
        key = {"epsilon": "epsilon", "outliers": "n_outliers", "n_sets": "n_sets"}[self.axis]
        params[key] = float(value) if key == "epsilon" else int(value)
        return SyntheticSpec(**params)


def _sweep_job(spec: SweepSpec, value, trial: int) -> list[TrialReport]:
    syn = spec.synthetic(value, trial)
    dataset = generate(syn)
    opts = MatchOptions(spec.max_outer_iters, syn.seed, spec.sigma_sq)
    return [run_trial(m, dataset, opts, spec.accuracy_mode) for m in spec.methods]


def thread_count() -> int:
    raw = os.environ.get("MSM_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list[TrialReport]:
    """All trials of a sweep, ordered by (method, axis value, trial) whatever the completion order."""
    jobs = [(vi, t) for vi in range(len(spec.values)) for t in range(spec.trials)]
    workers = workers or thread_count()
    if workers == 1 or len(jobs) == 1:
        results = [_sweep_job(spec, spec.values[vi], t) for vi, t in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sweep_job, spec, spec.values[vi], t) for vi, t in jobs]
            results = [f.result() for f in futures]
    by_job = dict(zip(jobs, results))
    rows = []
    for mi, _ in enumerate(spec.methods):
        for job in jobs:
            rows.append(by_job[job][mi])
    return rows


def _fmt(value) -> str:
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(value)
    return str(value)


def reports_to_csv(reports: Sequence[TrialReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        writer.writerow([_fmt(getattr(rep, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))
