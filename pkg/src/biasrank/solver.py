"""Optimal rankings: unconstrained, greedy with deadline lookahead, and an
exhaustive oracle.

The unconstrained optimum for a nonincreasing discount is simply the top-n
items by weight.  Under prefix lower bounds with disjoint groups, a greedy
pass fills positions in order, placing the heaviest item whose placement
keeps every remaining prefix bound satisfiable; the lookahead is the
earliest-deadline feasibility test from scheduling.  The brute-force solver
enumerates ordered subsets and works for overlapping groups too, but only
on small instances; it doubles as the correctness oracle for the greedy.
"""

from __future__ import annotations

import numpy as np

from .constraints import (
    ConstraintMatrix,
    InfeasibleConstraintsError,
    NonDisjointGroupsError,
    feasible_for_sizes,
)
from .model import Instance, Ranking

__all__ = [
    "rank_constrained_bruteforce",
    "rank_constrained_greedy",
    "rank_unconstrained",
    "BRUTEFORCE_MAX_ITEMS",
    "BRUTEFORCE_MAX_POSITIONS",
]

BRUTEFORCE_MAX_ITEMS = 10
BRUTEFORCE_MAX_POSITIONS = 6


def _check_weights(instance: Instance, weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (instance.m,):
        raise ValueError(f"weights must have shape ({instance.m},), got {w.shape}")
    return w


def rank_unconstrained(instance: Instance, weights) -> Ranking:
    """Top-n items by weight, descending; ties broken by ascending id.

    Optimal for any nonincreasing discount vector.
    """
    w = _check_weights(instance, weights)
    order = np.argsort(-w, kind="stable")[: instance.n]
    return Ranking(tuple(int(i) for i in order))


def _single_unit_column(L: np.ndarray) -> int | None:
    """Index of the only constrained column if its increments are all <= 1.

    For such matrices the lookahead collapses to "place a target-group item
    whenever the current row demands one more than is already placed".
    Returns -1 when no column is constrained at all, None when the general
    lookahead is required.
    """
    nonzero = np.nonzero(L[-1])[0] if L.size else np.empty(0, dtype=np.int64)
    if nonzero.size == 0:
        return -1
    if nonzero.size > 1:
        return None
    s = int(nonzero[0])
    col = L[:, s]
    steps = np.diff(col, prepend=0)
    return s if np.all(steps <= 1) else None


def _forced_groups(Lrows: list[list[int]], counts: list[int], j: int, n: int, p: int) -> tuple[int, ...] | None:
    """Groups the j-th position must draw from, or None if any item works.

    Scans prefixes k >= j: if the total unmet demand at k equals the k-j+1
    positions still available, the earliest such k pins position j to a
    group with unmet demand there.  Unmet demand exceeding the available
    positions means the matrix became infeasible (cannot happen after
    check_feasibility plus a correct fill).
    """
    for k in range(j, n + 1):
        row = Lrows[k - 1]
        deficit = 0
        for s in range(p):
            d = row[s] - counts[s]
            if d > 0:
                deficit += d
        slots = k - j + 1
        if deficit > slots:
            raise InfeasibleConstraintsError(f"unmet demand {deficit} exceeds {slots} open positions at prefix {k}")
        if deficit == slots:
            return tuple(s for s in range(p) if row[s] > counts[s])
    return None


def rank_constrained_greedy(instance: Instance, weights, L: ConstraintMatrix) -> Ranking:
    """Maximum-weight ranking satisfying prefix lower bounds, disjoint groups.

    Fills positions 1..n in order; at each position places the heaviest item
    (ties by ascending id) whose placement leaves every later prefix bound
    satisfiable.  Raises for overlapping groups or infeasible bounds.
    """
    n, p = instance.n, instance.p
    if L.n != n or L.p != p:
        raise ValueError(f"constraints are {L.n}x{L.p}, instance needs {n}x{p}")
    mem = instance.membership_matrix
    row_counts = mem.sum(axis=1)
    if np.any(row_counts > 1):
        raise NonDisjointGroupsError("greedy solver requires disjoint groups; use the brute-force solver")
    sizes = mem.sum(axis=0).astype(np.int64)
    if not feasible_for_sizes(L.matrix, sizes, n):
        raise InfeasibleConstraintsError("no ranking satisfies the constraint matrix")
    w = _check_weights(instance, weights)
    Lmat = L.matrix

    labels = np.where(row_counts > 0, mem.argmax(axis=1), -1) if p else np.full(instance.m, -1)
    order = np.argsort(-w, kind="stable")
    order_list = order.tolist()
    ordered_labels = labels[order]
    per_group: list[list[int]] = [order[ordered_labels == s].tolist() for s in range(p)]

    wlist = w.tolist()
    labels_list = labels.tolist()
    Lrows = Lmat.tolist()
    fast = _single_unit_column(Lmat)
    placed = bytearray(instance.m)
    counts = [0] * p
    gptr = [0] * p
    optr = 0
    out: list[int] = []

    for j in range(1, n + 1):
        if fast == -1:
            forced = None
        elif fast is not None:
            forced = (fast,) if Lrows[j - 1][fast] > counts[fast] else None
        else:
            forced = _forced_groups(Lrows, counts, j, n, p)
        if forced:
            pick = -1
            pick_w = 0.0
            for s in forced:
                q = per_group[s]
                ptr = gptr[s]
                while ptr < len(q) and placed[q[ptr]]:
                    ptr += 1
                gptr[s] = ptr
                if ptr >= len(q):
                    raise InfeasibleConstraintsError(f"group {s} ran out of items at position {j}")
                cand = q[ptr]
                if pick < 0 or wlist[cand] > pick_w or (wlist[cand] == pick_w and cand < pick):
                    pick, pick_w = cand, wlist[cand]
        else:
            while placed[order_list[optr]]:
                optr += 1
            pick = order_list[optr]
        placed[pick] = 1
        g = labels_list[pick]
        if g >= 0:
            counts[g] += 1
        out.append(pick)
    return Ranking(tuple(out))


def rank_constrained_bruteforce(instance: Instance, weights, L: ConstraintMatrix) -> Ranking:
    """Exact constrained optimum by enumerating ordered n-subsets.

    Handles overlapping groups.  Guarded to m <= 10 and n <= 6; the search
    prunes any prefix that already violates a bound.  Utility ties resolve
    to the lexicographically smallest id sequence.  Raises when no ordering
    satisfies the bounds.
    """
    m, n, p = instance.m, instance.n, instance.p
    if m > BRUTEFORCE_MAX_ITEMS or n > BRUTEFORCE_MAX_POSITIONS:
        raise ValueError(
            f"brute force limited to m <= {BRUTEFORCE_MAX_ITEMS}, n <= {BRUTEFORCE_MAX_POSITIONS}"
        )
    if L.n != n or L.p != p:
        raise ValueError(f"constraints are {L.n}x{L.p}, instance needs {n}x{p}")
    w = _check_weights(instance, weights).tolist()
    v = instance.v.values.tolist()
    Lrows = L.matrix.tolist()
    mem = instance.membership_matrix
    item_groups = [tuple(int(s) for s in np.nonzero(mem[i])[0]) for i in range(m)]

    best_util = -np.inf
    best_seq: tuple[int, ...] | None = None
    counts = [0] * p
    used = bytearray(m)
    seq: list[int] = []

    def extend(depth: int, util: float) -> None:
        nonlocal best_util, best_seq
        if depth == n:
            if util > best_util:
                best_util = util
                best_seq = tuple(seq)
            return
        row = Lrows[depth]
        for i in range(m):
            if used[i]:
                continue
            gs = item_groups[i]
            for s in gs:
                counts[s] += 1
            if all(counts[s] >= row[s] for s in range(p)):
                used[i] = 1
                seq.append(i)
                extend(depth + 1, util + w[i] * v[depth])
                seq.pop()
                used[i] = 0
            for s in gs:
                counts[s] -= 1

    extend(0, 0.0)
    if best_seq is None:
        raise InfeasibleConstraintsError("no ordering satisfies the constraint matrix")
    return Ranking(best_seq)
