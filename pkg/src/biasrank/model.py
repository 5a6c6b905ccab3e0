"""Core domain types for ranking under multiplicative group bias.

Items carry a latent (true) utility and a set of group memberships, which
may be empty, singleton, or overlapping.  An evaluator does not see the
latent utilities: each group contributes a multiplicative factor in
``[0, 1]``, and an item belonging to several groups is shaded by the
product of its groups' factors.  Rankings place ``n`` of the ``m`` items
into positions ``1..n`` and are scored against a nonincreasing,
nonnegative position-discount vector; a constant vector reduces ranking
to plain subset selection.

All types are immutable after construction and all operations are pure
functions, so values can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BiasModel",
    "DiscountDiagnostics",
    "DiscountVector",
    "GroupLayout",
    "Instance",
    "Item",
    "Ranking",
    "instance_from_json",
    "instance_to_json",
    "observed_utilities",
    "prefix_group_counts",
    "ranking_utility",
    "validate_discount",
]


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Item:
    """One rankable item: dense integer id, latent utility, group ids."""

    id: int
    latent_utility: float
    groups: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "groups", frozenset(int(s) for s in self.groups))
        if self.id < 0:
            raise ValueError("item id must be nonnegative")
        if any(s < 0 for s in self.groups):
            raise ValueError("group indices must be nonnegative")
        if not math.isfinite(self.latent_utility):
            raise ValueError("latent utility must be finite")


class GroupLayout:
    """Membership sets for groups ``0..p-1``.

    Groups may overlap; ``disjoint`` reports whether they do not.
    """

    __slots__ = ("_members",)

    def __init__(self, members: Iterable[Iterable[int]]):
        self._members = tuple(frozenset(int(i) for i in g) for g in members)
        for g in self._members:
            if any(i < 0 for i in g):
                raise ValueError("group members must be nonnegative item ids")

    @property
    def p(self) -> int:
        return len(self._members)

    @property
    def members(self) -> tuple[frozenset[int], ...]:
        return self._members

    @property
    def disjoint(self) -> bool:
        total = sum(len(g) for g in self._members)
        union: set[int] = set()
        for g in self._members:
            union.update(g)
        return total == len(union)

    def membership_matrix(self, m: int) -> np.ndarray:
        """Boolean (m, p) matrix; entry (i, s) is True iff item i is in group s."""
        mat = np.zeros((m, self.p), dtype=bool)
        for s, g in enumerate(self._members):
            for i in g:
                if i >= m:
                    raise ValueError(f"group {s} references item {i} >= m={m}")
                mat[i, s] = True
        return _readonly(mat)

    def labels(self, m: int) -> np.ndarray:
        """Per-item group label (-1 for ungrouped items); disjoint groups only."""
        if not self.disjoint:
            raise ValueError("labels are only defined for disjoint groups")
        lab = np.full(m, -1, dtype=np.int64)
        for s, g in enumerate(self._members):
            for i in g:
                if i >= m:
                    raise ValueError(f"group {s} references item {i} >= m={m}")
                lab[i] = s
        return lab

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroupLayout) and self._members == other._members

    def __hash__(self) -> int:
        return hash(self._members)

    def __repr__(self) -> str:
        return f"GroupLayout({[sorted(g) for g in self._members]})"


class BiasModel:
    """Per-group multiplicative shading factors, each in ``[0, 1]``.

    An item in groups ``T`` is observed at ``w * prod(betas[s] for s in T)``;
    the empty product leaves ungrouped items unshaded.
    """

    __slots__ = ("_betas",)

    def __init__(self, betas: Sequence[float]):
        arr = np.asarray(betas, dtype=float).reshape(-1)
        if arr.size and (np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr))):
            raise ValueError("bias factors must lie in [0, 1]")
        self._betas = _readonly(arr)

    @property
    def betas(self) -> np.ndarray:
        return self._betas

    @property
    def p(self) -> int:
        return int(self._betas.size)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BiasModel) and np.array_equal(self._betas, other._betas)

    def __repr__(self) -> str:
        return f"BiasModel({self._betas.tolist()})"


class DiscountVector:
    """Nonincreasing, nonnegative per-position weights.

    ``kind`` is one of ``"constant"``, ``"dcg"``, ``"zipf"``, ``"custom"``.
    The dcg kind is ``1 / log(k + 1)`` with a configurable logarithm base;
    the default base is e.  Zeros are allowed, positivity is not required.
    """

    __slots__ = ("_values", "_kind", "_log_base")

    def __init__(self, values: Sequence[float], kind: str = "custom", log_base: float | None = None):
        arr = np.asarray(values, dtype=float).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("discount vector must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("discount entries must be finite")
        if np.any(arr < 0.0):
            raise ValueError("discount entries must be nonnegative")
        if np.any(arr[:-1] < arr[1:]):
            raise ValueError("discount vector must be nonincreasing")
        if kind not in ("constant", "dcg", "zipf", "custom"):
            raise ValueError(f"unknown discount kind {kind!r}")
        self._values = _readonly(arr)
        self._kind = kind
        self._log_base = log_base

    @classmethod
    def constant(cls, n: int) -> "DiscountVector":
        return cls(np.ones(n), kind="constant")

    @classmethod
    def dcg(cls, n: int, log_base: float | None = None) -> "DiscountVector":
        """1 / log(k + 1) for k = 1..n; natural log unless a base > 1 is given."""
        k = np.arange(1, n + 1, dtype=float)
        if log_base is None:
            v = 1.0 / np.log(k + 1.0)
        else:
            if log_base <= 1.0:
                raise ValueError("log base must exceed 1")
            v = math.log(log_base) / np.log(k + 1.0)
        return cls(v, kind="dcg", log_base=log_base)

    @classmethod
    def zipf(cls, n: int) -> "DiscountVector":
        return cls(1.0 / np.arange(1, n + 1, dtype=float), kind="zipf")

    @classmethod
    def custom(cls, values: Sequence[float]) -> "DiscountVector":
        return cls(values, kind="custom")

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def log_base(self) -> float | None:
        return self._log_base

    def __len__(self) -> int:
        return int(self._values.size)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, DiscountVector)
            and self._kind == other._kind
            and self._log_base == other._log_base
            and np.array_equal(self._values, other._values)
        )

    def __repr__(self) -> str:
        return f"DiscountVector(kind={self._kind!r}, n={len(self)})"

    def to_json_dict(self) -> dict:
        d: dict = {"kind": self._kind}
        if self._kind == "dcg" and self._log_base is not None:
            d["log_base"] = self._log_base
        if self._kind == "custom":
            d["values"] = [float(x) for x in self._values]
        return d

    @classmethod
    def from_json_dict(cls, d: dict, n: int) -> "DiscountVector":
        kind = d.get("kind")
        if kind == "constant":
            return cls.constant(n)
        if kind == "dcg":
            return cls.dcg(n, log_base=d.get("log_base"))
        if kind == "zipf":
            return cls.zipf(n)
        if kind == "custom":
            values = d.get("values")
            if values is None:
                raise ValueError('custom discount requires a "values" array')
            if len(values) != n:
                raise ValueError(f"discount has {len(values)} values but n={n}")
            return cls.custom(values)
        raise ValueError(f"unknown discount kind {kind!r}")


class Instance:
    """A ranking problem: m items with latent utilities and group memberships,
    n ranked positions, and a position-discount vector of length n.

    Item ids are dense 0-based integers and every per-item vector is
    id-indexed.  Internally the instance stores a float utility vector and a
    boolean membership matrix; :class:`Item` objects are materialized lazily.
    """

    def __init__(self, items: Iterable[Item], n: int, v: DiscountVector, p: int | None = None):
        items = sorted(items, key=lambda it: it.id)
        m = len(items)
        if [it.id for it in items] != list(range(m)):
            raise ValueError("item ids must be exactly 0..m-1 with no duplicates")
        max_group = max((max(it.groups, default=-1) for it in items), default=-1)
        if p is None:
            p = max_group + 1
        elif max_group >= p:
            raise ValueError(f"item references group {max_group} >= p={p}")
        w = np.array([it.latent_utility for it in items], dtype=float)
        mem = np.zeros((m, p), dtype=bool)
        for it in items:
            for s in it.groups:
                mem[it.id, s] = True
        self._init_arrays(w, mem, n, v)

    def _init_arrays(self, w: np.ndarray, mem: np.ndarray, n: int, v: DiscountVector) -> None:
        if w.ndim != 1:
            raise ValueError("latent utilities must be 1-D")
        if not np.all(np.isfinite(w)):
            raise ValueError("latent utilities must be finite")
        m = int(w.size)
        if mem.shape[0] != m:
            raise ValueError("membership rows must match the number of items")
        if not (1 <= n <= m):
            raise ValueError(f"need 1 <= n <= m, got n={n}, m={m}")
        if not isinstance(v, DiscountVector):
            v = DiscountVector(v)
        if len(v) != n:
            raise ValueError(f"discount vector has length {len(v)}, expected n={n}")
        self._w = _readonly(w.astype(float, copy=True))
        self._mem = _readonly(mem.astype(bool, copy=True))
        self._n = int(n)
        self._v = v

    @classmethod
    def from_arrays(
        cls,
        latent_utilities: Sequence[float],
        groups,
        n: int,
        v: DiscountVector,
        p: int | None = None,
    ) -> "Instance":
        """Build an instance without materializing Item objects.

        ``groups`` may be a (m, p) boolean membership matrix, a length-m
        integer label vector (-1 marks ungrouped items), or a length-m
        sequence of per-item group-id collections.
        """
        w = np.asarray(latent_utilities, dtype=float)
        m = int(w.size)
        per_item_sets = isinstance(groups, (list, tuple)) and any(
            isinstance(g, (set, frozenset, list, tuple)) for g in groups
        )
        if per_item_sets:
            sets = [frozenset(int(s) for s in gi) for gi in groups]
            if len(sets) != m:
                raise ValueError("per-item group list length must equal number of items")
            width = p if p is not None else max((max(s, default=-1) for s in sets), default=-1) + 1
            mem = np.zeros((m, width), dtype=bool)
            for i, gi in enumerate(sets):
                for s in gi:
                    if s >= width:
                        raise ValueError(f"item {i} references group {s} >= p={width}")
                    mem[i, s] = True
        else:
            g = np.asarray(groups)
            if g.ndim == 2:
                mem = g.astype(bool)
                if p is not None and p != mem.shape[1]:
                    raise ValueError("explicit p contradicts membership matrix width")
            elif g.ndim == 1:
                lab = g.astype(np.int64)
                if lab.size != m:
                    raise ValueError("label vector length must equal number of items")
                width = p if p is not None else int(lab.max(initial=-1)) + 1
                if lab.max(initial=-1) >= width:
                    raise ValueError("label exceeds group count")
                mem = np.zeros((m, width), dtype=bool)
                sel = lab >= 0
                mem[np.nonzero(sel)[0], lab[sel]] = True
            else:
                raise ValueError("groups must be a membership matrix, label vector, or per-item sets")
        obj = cls.__new__(cls)
        obj._init_arrays(w, mem, n, v)
        return obj

    @property
    def m(self) -> int:
        return int(self._w.size)

    @property
    def n(self) -> int:
        return self._n

    @property
    def p(self) -> int:
        return int(self._mem.shape[1])

    @property
    def v(self) -> DiscountVector:
        return self._v

    @property
    def latent_utilities(self) -> np.ndarray:
        return self._w

    @property
    def membership_matrix(self) -> np.ndarray:
        return self._mem

    @cached_property
    def groups(self) -> GroupLayout:
        return GroupLayout(
            tuple(frozenset(np.nonzero(self._mem[:, s])[0].tolist()) for s in range(self.p))
        )

    @cached_property
    def items(self) -> tuple[Item, ...]:
        return tuple(
            Item(i, float(self._w[i]), frozenset(np.nonzero(self._mem[i])[0].tolist()))
            for i in range(self.m)
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Instance)
            and self._n == other._n
            and self._v == other._v
            and np.array_equal(self._w, other._w)
            and np.array_equal(self._mem, other._mem)
        )

    def __repr__(self) -> str:
        return f"Instance(m={self.m}, n={self.n}, p={self.p}, v={self._v.kind})"


@dataclass(frozen=True)
class Ranking:
    """An injective assignment of item ids to positions 1..n.

    ``positions[j]`` holds the id placed at position ``j + 1``.
    """

    positions: tuple[int, ...]

    def __post_init__(self) -> None:
        pos = tuple(map(int, self.positions))
        object.__setattr__(self, "positions", pos)
        if pos and min(pos) < 0:
            raise ValueError("item ids must be nonnegative")
        if len(set(pos)) != len(pos):
            raise ValueError("ranking must not repeat items")

    def __len__(self) -> int:
        return len(self.positions)

    def __iter__(self):
        return iter(self.positions)


def observed_utilities(instance: Instance, bias: BiasModel) -> np.ndarray:
    """Shaded utilities: each item's latent utility times the product of its
    groups' bias factors (the empty product is 1)."""
    if bias.p != instance.p:
        raise ValueError(f"bias has {bias.p} factors but instance has {instance.p} groups")
    if instance.p == 0:
        return instance.latent_utilities.copy()
    factors = np.where(instance.membership_matrix, bias.betas, 1.0).prod(axis=1)
    return instance.latent_utilities * factors


def ranking_utility(ranking: Ranking, v, weights) -> float:
    """Discounted utility of a ranking: sum over positions j of
    ``weights[positions[j]] * v[j]``."""
    vv = v.values if isinstance(v, DiscountVector) else np.asarray(v, dtype=float)
    w = np.asarray(weights, dtype=float)
    pos = np.asarray(ranking.positions, dtype=np.intp)
    if pos.size != vv.size:
        raise ValueError(f"ranking has {pos.size} positions but discount has {vv.size}")
    if pos.size and int(pos.max()) >= w.size:
        raise ValueError("ranking references an item id outside the weight vector")
    return float(w[pos] @ vv)


@dataclass(frozen=True)
class DiscountDiagnostics:
    """Diagnostics for a candidate discount vector.

    ``convex_differences`` is vacuously true for n < 3.  ``assumption_ratio``
    is ``(v_1 - v_n) / sum(v)``, a smallness measure of the end-to-end drop
    relative to the total mass (reported, not pass/fail).
    """

    nonincreasing: bool
    convex_differences: bool
    assumption_ratio: float


def validate_discount(v) -> DiscountDiagnostics:
    """Check monotonicity and convexity of consecutive differences.

    Accepts a :class:`DiscountVector` or any 1-D array-like, so candidate
    vectors can be diagnosed before construction.
    """
    vv = v.values if isinstance(v, DiscountVector) else np.asarray(v, dtype=float)
    if vv.ndim != 1 or vv.size == 0:
        raise ValueError("discount must be a nonempty 1-D sequence")
    nonincreasing = bool(np.all(vv[:-1] >= vv[1:])) if vv.size > 1 else True
    if vv.size < 3:
        convex = True
    else:
        d = vv[:-1] - vv[1:]
        convex = bool(np.all(d[:-1] >= d[1:]))
    total = float(vv.sum())
    ratio = 0.0 if total == 0.0 else float((vv[0] - vv[-1]) / total)
    return DiscountDiagnostics(nonincreasing, convex, ratio)


def prefix_group_counts(ranking: Ranking, groups: GroupLayout) -> np.ndarray:
    """(n, p) integer matrix; entry (k-1, s) counts group-s items among
    positions 1..k."""
    p = groups.p
    members = groups.members
    rows = np.zeros((len(ranking.positions), p), dtype=np.int64)
    for j, item in enumerate(ranking.positions):
        for s in range(p):
            if item in members[s]:
                rows[j, s] = 1
    return np.cumsum(rows, axis=0)


def instance_to_json(instance: Instance) -> dict:
    """Serialize to the instance JSON schema (groups listed both at top
    level and per item)."""
    mem = instance.membership_matrix
    return {
        "n": instance.n,
        "v": instance.v.to_json_dict(),
        "groups": [sorted(int(i) for i in g) for g in instance.groups.members],
        "items": [
            {
                "id": i,
                "w": float(instance.latent_utilities[i]),
                "groups": sorted(int(s) for s in np.nonzero(mem[i])[0]),
            }
            for i in range(instance.m)
        ],
    }


def instance_from_json(d: dict) -> Instance:
    """Parse the instance JSON schema, validating that top-level group
    membership lists agree with per-item group lists."""
    try:
        n = int(d["n"])
        group_lists = d["groups"]
        item_dicts = d["items"]
        v = DiscountVector.from_json_dict(d["v"], n)
    except KeyError as exc:
        raise ValueError(f"instance JSON missing key {exc}") from exc
    items = [
        Item(int(it["id"]), float(it["w"]), frozenset(int(s) for s in it.get("groups", ())))
        for it in item_dicts
    ]
    p = len(group_lists)
    inst = Instance(items, n, v, p=p)
    declared = GroupLayout(group_lists)
    if declared != inst.groups:
        raise ValueError("top-level group lists disagree with per-item group lists")
    return inst
