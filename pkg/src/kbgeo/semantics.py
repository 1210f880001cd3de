"""Assignment spaces over a finite model and formula valuation as bitmask sets.

A point is a variable assignment into the carrier.  The space of all points
over (model, varset) is enumerated lexicographically: variable order comes
from the varset, element order from the carrier.  Point sets are immutable
bitmasks over that enumeration, so all boolean structure is integer work.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional

from .core import (
    BoundError,
    DEFAULT_MAX_POINTS,
    MismatchError,
    Model,
    Substitution,
    Term,
    Var,
    VarSet,
    eval_term,
)
from .formulas import (
    And,
    Atom,
    Equal,
    Exists,
    FalseF,
    Forall,
    Formula,
    FormulaContext,
    Implies,
    Not,
    Or,
    SubstNode,
    TrueF,
    check_formula,
)


@dataclass(frozen=True)
class Point:
    """A variable assignment, stored as values aligned with the varset order."""

    varset: VarSet
    values: tuple

    def __getitem__(self, name: str):
        return self.values[self.varset.index(name)]

    def as_dict(self) -> dict:
        return dict(zip(self.varset.names, self.values))

    def __str__(self) -> str:
        return "(" + ",".join(str(v) for v in self.values) + ")"


class PointSpace:
    """All assignments varset -> carrier for one model, in enumeration order."""

    def __init__(self, model: Model, varset: VarSet):
        self.model = model
        self.varset = varset
        self.value_rows: tuple[tuple, ...] = tuple(
            product(model.carrier, repeat=len(varset)))
        self._row_index = {row: i for i, row in enumerate(self.value_rows)}

    @property
    def size(self) -> int:
        return len(self.value_rows)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def point(self, index: int) -> Point:
        return Point(self.varset, self.value_rows[index])

    def index_of(self, values: tuple) -> int:
        try:
            return self._row_index[tuple(values)]
        except KeyError:
            raise MismatchError(f"{values!r} is not a point of this space") from None

    def env(self, index: int) -> dict:
        return dict(zip(self.varset.names, self.value_rows[index]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSpace):
            return NotImplemented
        return self.varset == other.varset and self.model == other.model

    __hash__ = None

    def __repr__(self) -> str:
        return f"PointSpace({self.varset}, {self.size} points)"


def enumerate_points(model: Model, varset: VarSet,
                     max_points: int = DEFAULT_MAX_POINTS) -> PointSpace:
    """Build the assignment space, refusing to enumerate past max_points."""
    count = len(model.carrier) ** len(varset)
    if count > max_points:
        raise BoundError(f"{count} points exceed the bound {max_points}")
    return PointSpace(model, varset)


class PointSet:
    """An immutable subset of a point space, held as an integer bitmask."""

    __slots__ = ("space", "mask")

    def __init__(self, space: PointSpace, mask: int):
        if mask < 0 or mask > space.full_mask:
            raise MismatchError(f"mask {mask:#x} outside space of {space.size} points")
        self.space = space
        self.mask = mask

    @classmethod
    def empty(cls, space: PointSpace) -> "PointSet":
        return cls(space, 0)

    @classmethod
    def full(cls, space: PointSpace) -> "PointSet":
        return cls(space, space.full_mask)

    @classmethod
    def of_rows(cls, space: PointSpace, rows) -> "PointSet":
        mask = 0
        for row in rows:
            mask |= 1 << space.index_of(tuple(row))
        return cls(space, mask)

    def _check_same_space(self, other: "PointSet") -> None:
        if self.space.varset != other.space.varset or self.space.model != other.space.model:
            raise MismatchError("point sets live over different spaces")

    def union(self, other: "PointSet") -> "PointSet":
        self._check_same_space(other)
        return PointSet(self.space, self.mask | other.mask)

    def intersect(self, other: "PointSet") -> "PointSet":
        self._check_same_space(other)
        return PointSet(self.space, self.mask & other.mask)

    def complement(self) -> "PointSet":
        return PointSet(self.space, self.space.full_mask & ~self.mask)

    def is_subset_of(self, other: "PointSet") -> bool:
        self._check_same_space(other)
        return self.mask & ~other.mask == 0

    @property
    def cardinality(self) -> int:
        return self.mask.bit_count()

    def contains_values(self, values: tuple) -> bool:
        return bool(self.mask >> self.space.index_of(tuple(values)) & 1)

    def indices(self) -> Iterator[int]:
        mask = self.mask
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def points(self) -> tuple[Point, ...]:
        return tuple(self.space.point(i) for i in self.indices())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return (self.mask == other.mask and self.space.varset == other.space.varset
                and self.space.model == other.space.model)

    def __hash__(self) -> int:
        return hash((self.space.varset.names, self.mask))

    def __str__(self) -> str:
        return "{" + ", ".join(str(self.space.point(i)) for i in self.indices()) + "}"

    def __repr__(self) -> str:
        return f"PointSet({self.space.varset}, mask={self.mask:#x})"


def _term_columns(term: Term, space: PointSpace) -> tuple:
    """Evaluate a term at every point of the space, as a value column."""
    if isinstance(term, Var):
        i = space.varset.index(term.name)
        return tuple(row[i] for row in space.value_rows)
    table = space.model.op_tables[term.op]
    columns = [_term_columns(a, space) for a in term.args]
    return tuple(table[tuple(col[p] for col in columns)] for p in range(space.size))


def pullback_indices(subst: Substitution, source_space: PointSpace,
                     target_space: PointSpace) -> list[int]:
    """For each target point mu, the source index of the composite mu after subst.

    The substitution maps source variables to terms over the target varset, so
    composing an assignment over the target with it yields an assignment over
    the source.
    """
    if source_space.varset != subst.source or target_space.varset != subst.target:
        raise MismatchError("substitution endpoints do not match the given spaces")
    if source_space.model != target_space.model:
        raise MismatchError("spaces live over different models")
    columns = [_term_columns(t, target_space) for t in subst.images]
    return [source_space.index_of(tuple(col[p] for col in columns))
            for p in range(target_space.size)]


def _exists_mask(mask: int, space: PointSpace, var: str) -> int:
    """Cylindrify along one axis: keep every point whose fiber meets the mask."""
    axis = space.varset.index(var)
    base = len(space.model.carrier)
    weight = base ** (len(space.varset) - 1 - axis)
    hit_roots = set()
    rest = mask
    while rest:
        low = rest & -rest
        idx = low.bit_length() - 1
        rest ^= low
        digit = (idx // weight) % base
        hit_roots.add(idx - digit * weight)
    out = 0
    for idx in range(space.size):
        digit = (idx // weight) % base
        if idx - digit * weight in hit_roots:
            out |= 1 << idx
    return out


class _Evaluator:
    """Recursive valuation over one model, caching spaces per variable set."""

    def __init__(self, model: Model, max_points: int):
        self.model = model
        self.max_points = max_points
        self.spaces: dict[tuple[str, ...], PointSpace] = {}

    def space_for(self, varset: VarSet) -> PointSpace:
        key = varset.names
        if key not in self.spaces:
            self.spaces[key] = enumerate_points(self.model, varset, self.max_points)
        return self.spaces[key]

    def mask(self, f: Formula, space: PointSpace) -> int:
        if isinstance(f, TrueF):
            return space.full_mask
        if isinstance(f, FalseF):
            return 0
        if isinstance(f, Atom):
            rows = self.model.rel_tables[f.rel]
            columns = [_term_columns(t, space) for t in f.args]
            out = 0
            for p in range(space.size):
                if tuple(col[p] for col in columns) in rows:
                    out |= 1 << p
            return out
        if isinstance(f, Equal):
            left = _term_columns(f.left, space)
            right = _term_columns(f.right, space)
            out = 0
            for p in range(space.size):
                if left[p] == right[p]:
                    out |= 1 << p
            return out
        if isinstance(f, Not):
            return space.full_mask & ~self.mask(f.body, space)
        if isinstance(f, And):
            return self.mask(f.left, space) & self.mask(f.right, space)
        if isinstance(f, Or):
            return self.mask(f.left, space) | self.mask(f.right, space)
        if isinstance(f, Implies):
            return (space.full_mask & ~self.mask(f.left, space)) | self.mask(f.right, space)
        if isinstance(f, Exists):
            return _exists_mask(self.mask(f.body, space), space, f.var)
        if isinstance(f, Forall):
            inner = space.full_mask & ~self.mask(f.body, space)
            return space.full_mask & ~_exists_mask(inner, space, f.var)
        if isinstance(f, SubstNode):
            inner_space = self.space_for(f.subst.source)
            inner_mask = self.mask(f.body, inner_space)
            pull = pullback_indices(f.subst, inner_space, space)
            out = 0
            for p in range(space.size):
                if inner_mask >> pull[p] & 1:
                    out |= 1 << p
            return out
        raise MismatchError(f"not a formula: {f!r}")


def satisfying_points(f: Formula, model: Model, varset: VarSet,
                      max_points: int = DEFAULT_MAX_POINTS) -> PointSet:
    """The set of assignments over varset at which the formula holds."""
    check_formula(f, FormulaContext(model.sig, varset))
    ev = _Evaluator(model, max_points)
    space = ev.space_for(varset)
    return PointSet(space, ev.mask(f, space))


def holds_at(point: Point, f: Formula, model: Model,
             max_points: int = DEFAULT_MAX_POINTS) -> bool:
    """Truth of the formula at one assignment."""
    sat = satisfying_points(f, model, point.varset, max_points)
    return sat.contains_values(point.values)


def points_satisfying_all(formulas, model: Model, varset: VarSet,
                          max_points: int = DEFAULT_MAX_POINTS) -> PointSet:
    """Common solutions of a formula collection; the empty collection gives
    the full space."""
    ev = _Evaluator(model, max_points)
    space = ev.space_for(varset)
    mask = space.full_mask
    for f in formulas:
        check_formula(f, FormulaContext(model.sig, varset))
        mask &= ev.mask(f, space)
    return PointSet(space, mask)


def holds_on_all(pset: PointSet, f: Formula,
                 max_points: int = DEFAULT_MAX_POINTS) -> bool:
    """True when the formula is satisfied by every point of the set.  This is
    membership of the formula in the filter cut out by the set."""
    sat = satisfying_points(f, pset.space.model, pset.space.varset, max_points)
    return pset.is_subset_of(sat)


def subst_preimage_points(subst: Substitution, pset: PointSet,
                          max_points: int = DEFAULT_MAX_POINTS) -> PointSet:
    """Points over the target whose composite with the substitution lands in
    the given source-space set."""
    if pset.space.varset != subst.source:
        raise MismatchError(
            f"point set is over {pset.space.varset}, substitution starts at {subst.source}")
    target_space = enumerate_points(pset.space.model, subst.target, max_points)
    pull = pullback_indices(subst, pset.space, target_space)
    mask = 0
    for p in range(target_space.size):
        if pset.mask >> pull[p] & 1:
            mask |= 1 << p
    return PointSet(target_space, mask)


def subst_image_points(subst: Substitution, pset: PointSet,
                       max_points: int = DEFAULT_MAX_POINTS) -> PointSet:
    """Composites mu after subst for mu in the given target-space set."""
    if pset.space.varset != subst.target:
        raise MismatchError(
            f"point set is over {pset.space.varset}, substitution targets {subst.target}")
    source_space = enumerate_points(pset.space.model, subst.source, max_points)
    pull = pullback_indices(subst, source_space, pset.space)
    mask = 0
    for p in pset.indices():
        mask |= 1 << pull[p]
    return PointSet(source_space, mask)


__all__ = [
    "Point",
    "PointSpace",
    "PointSet",
    "enumerate_points",
    "satisfying_points",
    "holds_at",
    "points_satisfying_all",
    "holds_on_all",
    "subst_preimage_points",
    "subst_image_points",
    "pullback_indices",
]
