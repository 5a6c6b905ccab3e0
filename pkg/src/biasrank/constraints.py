"""Prefix lower-bound constraint matrices for rankings.

An (n, p) integer matrix L constrains a ranking to contain at least
``L[k-1][s]`` members of group s among its top k positions, for every
k and s.  Two constructions are provided: the single-parameter family
``L[k][target] = floor(alpha * k)`` that spreads a target share over
every prefix, and the counts taken from the latent-optimal ranking,
which make the constrained observed-utility optimum recover the full
latent optimum.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .model import GroupLayout, Instance, Ranking, prefix_group_counts

__all__ = [
    "ConstraintMatrix",
    "InfeasibleConstraintsError",
    "NonDisjointGroupsError",
    "check_feasibility",
    "derived_constraints",
    "feasible_for_sizes",
    "satisfies",
    "simple_constraints",
]

# Guards floor() against alpha*k values that real arithmetic makes integral
# but binary floating point lands just below (e.g. 0.3 * 10 = 2.999...96).
FLOOR_EPSILON = 1e-9


class InfeasibleConstraintsError(ValueError):
    """No ranking can satisfy the given constraint matrix."""


class NonDisjointGroupsError(ValueError):
    """Operation requires disjoint groups but the layout overlaps."""


class ConstraintMatrix:
    """Nonnegative (n, p) lower bounds with nondecreasing columns.

    Row k-1 applies to the top-k prefix; entries never exceed k because a
    prefix of length k cannot contain more than k items.
    """

    __slots__ = ("_matrix",)

    def __init__(self, matrix: Sequence[Sequence[int]] | np.ndarray):
        arr = np.asarray(matrix, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("constraint matrix must be 2-D (n rows, p columns)")
        if arr.shape[0] == 0:
            raise ValueError("constraint matrix needs at least one row")
        if np.any(arr < 0):
            raise ValueError("constraint entries must be nonnegative")
        if np.any(np.diff(arr, axis=0) < 0):
            raise ValueError("constraint columns must be nondecreasing")
        rows = np.arange(1, arr.shape[0] + 1, dtype=np.int64)
        if np.any(arr.max(axis=1, initial=0) > rows):
            raise ValueError("a top-k prefix cannot require more than k items")
        self._matrix = arr.copy()
        self._matrix.setflags(write=False)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def n(self) -> int:
        return int(self._matrix.shape[0])

    @property
    def p(self) -> int:
        return int(self._matrix.shape[1])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ConstraintMatrix) and np.array_equal(self._matrix, other._matrix)

    def __le__(self, other: "ConstraintMatrix") -> bool:
        return bool(np.all(self._matrix <= other._matrix))

    def __repr__(self) -> str:
        return f"ConstraintMatrix(n={self.n}, p={self.p})"

    def to_json_dict(self) -> dict:
        return {"n": self.n, "p": self.p, "L": self._matrix.tolist()}

    @classmethod
    def from_json_dict(cls, d: dict) -> "ConstraintMatrix":
        try:
            n, p, rows = int(d["n"]), int(d["p"]), d["L"]
        except KeyError as exc:
            raise ValueError(f"constraint JSON missing key {exc}") from exc
        arr = np.asarray(rows, dtype=np.int64)
        if arr.ndim == 1 and p == 0:
            arr = arr.reshape(n, 0)
        if arr.shape != (n, p):
            raise ValueError(f"L has shape {arr.shape}, expected ({n}, {p})")
        return cls(arr)

    @classmethod
    def zeros(cls, n: int, p: int) -> "ConstraintMatrix":
        return cls(np.zeros((n, p), dtype=np.int64))


def simple_constraints(alpha: float, target_group: int, n: int, p: int) -> ConstraintMatrix:
    """Require at least ``floor(alpha * k)`` target-group items in every
    top-k prefix; all other groups are unconstrained.

    Floor (with a tiny epsilon) is used rather than ceil so the bound never
    exceeds the prefix length for any alpha in [0, 1].
    """
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if not (0 <= target_group < p):
        raise ValueError(f"target group {target_group} outside [0, {p})")
    L = np.zeros((n, p), dtype=np.int64)
    for k in range(1, n + 1):
        L[k - 1, target_group] = int(math.floor(alpha * k + FLOOR_EPSILON))
    return ConstraintMatrix(L)


def derived_constraints(instance: Instance) -> ConstraintMatrix:
    """Per-prefix group counts of the latent-optimal ranking.

    The latent-optimal ranking sorts by latent utility descending, breaking
    ties by ascending id.  Optimizing observed utility under these bounds
    recovers the optimal latent utility for any strictly-positive,
    below-one bias factors.
    """
    order = np.argsort(-instance.latent_utilities, kind="stable")[: instance.n]
    counts = np.cumsum(instance.membership_matrix[order], axis=0, dtype=np.int64)
    return ConstraintMatrix(counts)


def satisfies(ranking: Ranking, L: ConstraintMatrix, groups: GroupLayout) -> bool:
    """True iff every prefix of the ranking meets every group lower bound."""
    if len(ranking.positions) != L.n:
        raise ValueError(f"ranking length {len(ranking.positions)} != constraint rows {L.n}")
    if groups.p != L.p:
        raise ValueError(f"layout has {groups.p} groups but constraints have {L.p} columns")
    counts = prefix_group_counts(ranking, groups)
    return bool(np.all(counts >= L.matrix))


def feasible_for_sizes(mat: np.ndarray, sizes: np.ndarray, n: int) -> bool:
    """Feasibility core for disjoint groups given only the group sizes.

    Exact for nondecreasing columns: the final demand of each column must
    fit inside its group and the total demand at each prefix must fit
    inside the prefix.
    """
    if mat.size == 0:
        return True
    if np.any(mat[-1] > sizes):
        return False
    if np.any(mat.sum(axis=1) > np.arange(1, n + 1)):
        return False
    return True


def check_feasibility(L: ConstraintMatrix, groups: GroupLayout, n: int) -> bool:
    """Decide whether any ranking satisfies L, for disjoint groups.

    For disjoint groups the exact conditions are: nondecreasing columns
    (guaranteed by construction), final demand within each group's size,
    and total demand at each prefix within the prefix length.  Overlapping
    layouts are rejected; use the brute-force solver for those.
    """
    if not groups.disjoint:
        raise NonDisjointGroupsError("feasibility test requires disjoint groups")
    if L.n != n:
        raise ValueError(f"constraint matrix has {L.n} rows, expected n={n}")
    if groups.p != L.p:
        raise ValueError(f"layout has {groups.p} groups but constraints have {L.p} columns")
    sizes = np.array([len(g) for g in groups.members], dtype=np.int64)
    return feasible_for_sizes(L.matrix, sizes, n)
