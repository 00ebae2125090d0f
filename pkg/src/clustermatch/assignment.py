"""Exact linear assignment solver with dummy-node padding.

Permutations are stored as integer vectors: ``perm[s] = t`` means row ``s``
is assigned to column ``t``.  The equivalent 0/1 matrix ``X`` has
``X[s, perm[s]] = 1``.

Among optimal assignments the solver always returns the lexicographically
smallest assignment vector, and :func:`brute_force_lap` uses the same rule,
so the two can be compared exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

BRUTE_FORCE_MAX_N = 9


class DimensionError(ValueError):
    """Cost matrix has the wrong shape for the requested operation."""


class CostValidationError(ValueError):
    """Cost matrix contains non-finite entries or is empty."""


@dataclass(frozen=True)
class PadInfo:
    """Bookkeeping for :func:`pad_to_square`.

    ``transposed`` is set when the input had more rows than columns and was
    transposed before padding, so rows of the padded matrix are the original
    columns.  ``dummy_rows`` lists the rows of the padded matrix that were
    added.
    """

    original_shape: tuple[int, int]
    transposed: bool = False
    dummy_rows: tuple[int, ...] = field(default_factory=tuple)

    @property
    def is_empty(self) -> bool:
        return not self.transposed and not self.dummy_rows


def validate_cost(cost) -> np.ndarray:
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] < 1 or c.shape[1] < 1:
        raise CostValidationError(f"cost must be a non-empty 2-D matrix, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise CostValidationError("cost matrix contains NaN or infinite entries")
    return c


def _validate_square(cost) -> np.ndarray:
    c = validate_cost(cost)
    if c.shape[0] != c.shape[1]:
        raise DimensionError(f"cost matrix must be square, got {c.shape[0]}x{c.shape[1]}; pad first")
    return c


def _tie_tolerance(c: np.ndarray) -> float:
    # Two totals closer than this are treated as a tie.
    return 1e-12 * c.shape[0] * max(1.0, float(np.abs(c).max()))


def assignment_cost(cost: np.ndarray, perm) -> float:
    """Total cost of ``perm``, correctly rounded (independent of summation order)."""
    return math.fsum(float(cost[i, j]) for i, j in enumerate(perm))


def perm_to_matrix(perm) -> np.ndarray:
    perm = np.asarray(perm, dtype=np.int64)
    n = perm.shape[0]
    x = np.zeros((n, n), dtype=np.int64)
    x[np.arange(n), perm] = 1
    return x


def matrix_to_perm(x) -> np.ndarray:
    x = np.asarray(x)
    n = x.shape[0]
    if x.shape != (n, n) or not np.all((x == 0) | (x == 1)):
        raise ValueError("expected a square 0/1 matrix")
    if not (np.all(x.sum(axis=1) == 1) and np.all(x.sum(axis=0) == 1)):
        raise ValueError("matrix is not a full permutation")
    return np.argmax(x, axis=1).astype(np.int64)


def is_permutation(perm, n: int | None = None) -> bool:
    perm = np.asarray(perm)
    if perm.ndim != 1 or (n is not None and perm.shape[0] != n):
        return False
    if not np.issubdtype(perm.dtype, np.integer):
        return False
    return bool(np.array_equal(np.sort(perm), np.arange(perm.shape[0])))


def _sap_numpy(c: np.ndarray):
    n = c.shape[0]
    inf = math.inf
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    # Column 0 is a virtual column; col_owner[j] is the 1-based row matched to column j.
    col_owner = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        col_owner[0] = i
        j0 = 0
        minv = np.full(n + 1, inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = col_owner[j0]
            free = ~used
            free[0] = False
            reduced = c[i0 - 1] - u[i0] - v[1:]
            better = free[1:] & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0
            masked = np.where(free, minv, inf)
            j1 = int(masked.argmin())
            delta = masked[j1]
            u[col_owner[used]] += delta
            v[used] -= delta
            minv[free] -= delta
            j0 = j1
            if col_owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            col_owner[j0] = col_owner[j1]
            j0 = j1
    return col_owner, u, v


def _sap_lists(c: np.ndarray):
    # Same iteration as _sap_numpy on Python lists; faster for small n.
    n = c.shape[0]
    inf = math.inf
    rows = [None] + c.tolist()
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    col_owner = [0] * (n + 1)
    way = [0] * (n + 1)
    cols = range(1, n + 1)
    for i in range(1, n + 1):
        col_owner[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = col_owner[j0]
            ci = rows[i0]
            ui = u[i0]
            delta = inf
            j1 = 0
            for j in cols:
                if not used[j]:
                    cur = ci[j - 1] - ui - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[col_owner[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if col_owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            col_owner[j0] = col_owner[j1]
            j0 = j1
    return np.asarray(col_owner, dtype=np.int64), np.asarray(u), np.asarray(v)


_LIST_KERNEL_MAX_N = 48


def _shortest_augmenting_path(c: np.ndarray, kernel: str | None = None):
    """Hungarian method with potentials (Jonker-Volgenant style augmentation).

    Returns ``(row_to_col, u, v)`` where ``c[i, j] - u[i] - v[j] >= 0`` and
    equality holds on every assigned pair.
    """
    n = c.shape[0]
    if kernel is None:
        kernel = "lists" if n <= _LIST_KERNEL_MAX_N else "numpy"
    col_owner, u, v = (_sap_lists if kernel == "lists" else _sap_numpy)(c)
    row_to_col = np.empty(n, dtype=np.int64)
    row_to_col[col_owner[1:] - 1] = np.arange(n)
    return row_to_col, u[1:], v[1:]


def _lex_smallest_matching(tight: np.ndarray, row_to_col: np.ndarray) -> np.ndarray:
    """Lexicographically smallest perfect matching inside the equality graph.

    ``row_to_col`` must already be a perfect matching using only ``tight`` edges.
    Rows are fixed greedily; row ``i`` moves to a smaller column ``j`` only if an
    alternating path lets the displaced row reach the column ``i`` gives up.
    """
    n = tight.shape[0]
    adj = [np.flatnonzero(tight[i]).tolist() for i in range(n)]
    assign = row_to_col.tolist()
    owner = [0] * n
    for r, col in enumerate(assign):
        owner[col] = r
    fixed_col = [False] * n
    for i in range(n):
        cur = assign[i]
        for j in adj[i]:
            if j >= cur:
                break
            if fixed_col[j]:
                continue
            start = owner[j]
            parent = {}
            frontier = [start]
            seen_rows = {start, i}
            found = False
            while frontier and not found:
                nxt = []
                for row in frontier:
                    for col in adj[row]:
                        if fixed_col[col] or col == j or col in parent:
                            continue
                        parent[col] = row
                        if col == cur:
                            found = True
                            break
                        r2 = owner[col]
                        if r2 not in seen_rows:
                            seen_rows.add(r2)
                            nxt.append(r2)
                    if found:
                        break
                frontier = nxt
            if found:
                col = cur
                while True:
                    row = parent[col]
                    prev = assign[row]
                    assign[row] = col
                    owner[col] = row
                    if row == start:
                        break
                    col = prev
                assign[i] = j
                owner[j] = i
                break
        fixed_col[assign[i]] = True
    return np.asarray(assign, dtype=np.int64)


def solve_lap(cost, *, kernel: str | None = None) -> tuple[np.ndarray, float]:
    """Minimum-cost perfect assignment of a square cost matrix.

    Returns ``(perm, total_cost)``.  Ties between optimal assignments are broken
    towards the lexicographically smallest ``perm``.

    ``kernel`` forces the inner loop implementation (``"lists"`` or
    ``"numpy"``); by default it is picked by size.  Both give the same result.

    Raises :class:`DimensionError` on non-square input and
    :class:`CostValidationError` on non-finite entries.
    """
    c = _validate_square(cost)
    n = c.shape[0]
    if n == 1:
        return np.zeros(1, dtype=np.int64), float(c[0, 0])
    row_to_col, u, v = _shortest_augmenting_path(c, kernel)
    tight = (c - u[:, None] - v[None, :]) <= _tie_tolerance(c)
    tight[np.arange(n), row_to_col] = True
    if np.count_nonzero(tight) > n:
        row_to_col = _lex_smallest_matching(tight, row_to_col)
    return row_to_col, assignment_cost(c, row_to_col)


def brute_force_lap(cost) -> tuple[np.ndarray, float]:
    """Exhaustive LAP solver used as a test oracle (``n <= 9``)."""
    c = _validate_square(cost)
    n = c.shape[0]
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force refused for n={n} > {BRUTE_FORCE_MAX_N}")
    # itertools yields permutations of range(n) in lexicographic order.
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    totals = c[np.arange(n), perms].sum(axis=1)
    best = totals.min()
    first = int(np.flatnonzero(totals <= best + _tie_tolerance(c))[0])
    perm = perms[first].copy()
    return perm, assignment_cost(c, perm)


def pad_to_square(cost) -> tuple[np.ndarray, PadInfo]:
    """Pad a rectangular cost matrix with constant-zero dummy rows.

    The smaller side is oriented as rows (transposing if needed) and dummy
    rows are appended until the matrix is square.
    """
    c = validate_cost(cost)
    shape = (int(c.shape[0]), int(c.shape[1]))
    transposed = False
    if c.shape[0] > c.shape[1]:
        c = c.T
        transposed = True
    n1, n2 = c.shape
    if n1 == n2:
        return c.copy(), PadInfo(shape, transposed)
    padded = np.zeros((n2, n2))
    padded[:n1] = c
    return padded, PadInfo(shape, transposed, tuple(range(n1, n2)))


def solve_rectangular(cost) -> list[tuple[int, int]]:
    """Solve a rectangular LAP; returns matched ``(row, col)`` pairs of the original matrix."""
    padded, info = pad_to_square(cost)
    perm, _ = solve_lap(padded)
    dummies = set(info.dummy_rows)
    pairs = [(s, int(t)) for s, t in enumerate(perm) if s not in dummies]
    if info.transposed:
        pairs = sorted((t, s) for s, t in pairs)
    return pairs
