"""Definable point sets over one model and the dual lattice of closed filters.

The definable algebra over (model, varset) is generated from the valuations of
all atomic formulas (relation atoms over term-definable argument tuples, plus
equalities between them when the signature has equality) by closing under
complement, intersection, union, and one-variable projection.  Every member
carries a witness formula that evaluates exactly to its point set.

A closed filter is represented by its dual definable set: the filter of all
formulas true on that set.  Smaller filters correspond to larger point sets,
so the lattice order here is reverse inclusion of duals.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Optional

from .core import DEFAULT_MAX_POINTS, MismatchError, Model, Substitution, VarSet, term_functions
from .formulas import And, Atom, Equal, Exists, FALSE, Formula, Not, Or, TRUE, formula_to_text
from .semantics import (
    PointSet,
    PointSpace,
    _exists_mask,
    enumerate_points,
    satisfying_points,
    subst_image_points,
)


class DefinabilityError(RuntimeError):
    """A point set expected to be definable is missing from the algebra."""


class DefinableSet:
    """A definable point set together with a defining witness formula.

    Construction re-evaluates the witness and refuses a mismatch, so a
    DefinableSet is definable by checked evidence, not by promise.  Equality
    and hashing ignore the witness: two members with the same points are the
    same set.
    """

    __slots__ = ("points", "witness")

    def __init__(self, points: PointSet, witness: Formula):
        space = points.space
        actual = satisfying_points(witness, space.model, space.varset)
        if actual.mask != points.mask:
            raise DefinabilityError(
                f"witness {formula_to_text(witness)} evaluates to {actual}, not {points}")
        self.points = points
        self.witness = witness

    @property
    def mask(self) -> int:
        return self.points.mask

    def __eq__(self, other) -> bool:
        if not isinstance(other, DefinableSet):
            return NotImplemented
        return self.points == other.points

    def __hash__(self) -> int:
        return hash(self.points)

    def __str__(self) -> str:
        return f"{self.points} by {formula_to_text(self.witness)}"

    def __repr__(self) -> str:
        return f"DefinableSet(mask={self.mask:#x}, witness={formula_to_text(self.witness)!r})"


class DefinableAlgebra:
    """The complete generated family of definable sets over one space."""

    def __init__(self, model: Model, varset: VarSet, space: PointSpace,
                 members: tuple[DefinableSet, ...], saturated: bool):
        self.model = model
        self.varset = varset
        self.space = space
        self.members = members
        self.saturated = saturated
        self._by_mask = {m.mask: m for m in members}
        self._blocks: Optional[tuple[int, ...]] = None

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[DefinableSet]:
        return iter(self.members)

    def contains_mask(self, mask: int) -> bool:
        return mask in self._by_mask

    def member(self, mask: int) -> DefinableSet:
        try:
            return self._by_mask[mask]
        except KeyError:
            raise DefinabilityError(f"mask {mask:#x} is not definable here") from None

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(m.mask for m in self.members)

    def block_masks(self) -> tuple[int, ...]:
        """Masks of the minimal nonempty members, ascending.  Every member is
        a union of these blocks."""
        if self._blocks is None:
            signatures: dict[tuple, int] = {}
            ordered = sorted(self._by_mask)
            for p in range(self.space.size):
                key = tuple(mask >> p & 1 for mask in ordered)
                signatures[key] = signatures.get(key, 0) | (1 << p)
            self._blocks = tuple(sorted(signatures.values()))
        return self._blocks

    def dump_lines(self) -> list[str]:
        """One line per member, sorted by mask: hex mask, cardinality, witness."""
        out = []
        for mask in sorted(self._by_mask):
            member = self._by_mask[mask]
            out.append(f"{mask:#x} {member.points.cardinality} {formula_to_text(member.witness)}")
        return out

    def __repr__(self) -> str:
        return (f"DefinableAlgebra({self.varset}, {len(self.members)} sets,"
                f" saturated={self.saturated})")


def generate_definable_algebra(model: Model, varset: VarSet,
                               max_term_depth: Optional[int] = None,
                               max_points: int = DEFAULT_MAX_POINTS) -> DefinableAlgebra:
    """Generate the definable algebra by a worklist closure.

    Seeds are the full space, the empty set, every relation atom over tuples
    of term functions, and every equality between term functions when the
    signature has equality.  The worklist closes under complement, pairwise
    intersection and union, and projection along each variable.  The first
    witness found for a point set is kept.
    """
    space = enumerate_points(model, varset, max_points)
    clone = term_functions(model, varset, max_term_depth, max_points)

    order: list[int] = []
    witness_of: dict[int, Formula] = {}

    def add(mask: int, witness: Formula) -> None:
        if mask not in witness_of:
            witness_of[mask] = witness
            order.append(mask)

    add(space.full_mask, TRUE)
    add(0, FALSE)
    for rel, arity in model.sig.rels:
        rows = model.rel_tables[rel]
        for combo in itertools.product(clone.functions, repeat=arity):
            mask = 0
            for p in range(space.size):
                if tuple(f.values[p] for f in combo) in rows:
                    mask |= 1 << p
            add(mask, Atom(rel, tuple(f.witness for f in combo)))
    if model.sig.with_equality:
        for f1 in clone.functions:
            for f2 in clone.functions:
                mask = 0
                for p in range(space.size):
                    if f1.values[p] == f2.values[p]:
                        mask |= 1 << p
                add(mask, Equal(f1.witness, f2.witness))

    i = 0
    while i < len(order):
        mask = order[i]
        witness = witness_of[mask]
        add(space.full_mask & ~mask, Not(witness))
        for var in varset.names:
            add(_exists_mask(mask, space, var), Exists(var, witness))
        for j in range(i + 1):
            other = order[j]
            other_witness = witness_of[other]
            add(mask & other, And(other_witness, witness))
            add(mask | other, Or(other_witness, witness))
        i += 1

    members = tuple(DefinableSet(PointSet(space, m), witness_of[m]) for m in order)
    return DefinableAlgebra(model, varset, space, members, clone.saturated)


def closure(pset: PointSet, algebra: DefinableAlgebra) -> DefinableSet:
    """The least definable superset: intersection of all members containing
    the given points."""
    if pset.space.varset != algebra.varset or pset.space.model != algebra.model:
        raise MismatchError("point set does not live over the algebra's space")
    mask = algebra.space.full_mask
    for member_mask in algebra.masks:
        if pset.mask & ~member_mask == 0:
            mask &= member_mask
    return algebra.member(mask)


class ClosedFilter:
    """A closed set of formulas, represented by its dual definable point set.

    Membership of a formula means the formula holds on every dual point.  The
    filter order runs opposite to point inclusion: a larger filter pins down
    fewer points.
    """

    __slots__ = ("dual",)

    def __init__(self, dual: DefinableSet):
        self.dual = dual

    @property
    def points(self) -> PointSet:
        return self.dual.points

    @property
    def mask(self) -> int:
        return self.dual.mask

    def member_formula(self, f: Formula) -> bool:
        from .semantics import holds_on_all

        return holds_on_all(self.points, f)

    def is_leq(self, other: "ClosedFilter") -> bool:
        if self.points.space.varset != other.points.space.varset \
                or self.points.space.model != other.points.space.model:
            raise MismatchError("filters live over different spaces")
        return other.mask & ~self.mask == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClosedFilter):
            return NotImplemented
        return self.dual == other.dual

    def __hash__(self) -> int:
        return hash(self.dual)

    def __str__(self) -> str:
        return f"filter of {self.points}"

    def __repr__(self) -> str:
        return f"ClosedFilter(dual_mask={self.mask:#x})"


class FilterLattice:
    """All closed filters over one space, dual to the definable algebra."""

    def __init__(self, algebra: DefinableAlgebra):
        self.algebra = algebra
        self.filters = tuple(ClosedFilter(m) for m in algebra.members)
        self._by_mask = {f.mask: f for f in self.filters}

    @property
    def model(self) -> Model:
        return self.algebra.model

    @property
    def varset(self) -> VarSet:
        return self.algebra.varset

    @property
    def saturated(self) -> bool:
        return self.algebra.saturated

    def __len__(self) -> int:
        return len(self.filters)

    def __iter__(self) -> Iterator[ClosedFilter]:
        return iter(self.filters)

    def filter_for_mask(self, mask: int) -> ClosedFilter:
        try:
            return self._by_mask[mask]
        except KeyError:
            raise DefinabilityError(f"no filter with dual mask {mask:#x}") from None

    @property
    def bottom(self) -> ClosedFilter:
        """The filter of formulas true everywhere: dual is the full space."""
        return self.filter_for_mask(self.algebra.space.full_mask)

    @property
    def top(self) -> ClosedFilter:
        """The improper filter: dual is empty."""
        return self.filter_for_mask(0)

    def _own(self, filt: ClosedFilter) -> None:
        if filt.mask not in self._by_mask or \
                filt.points.space.varset != self.varset or \
                filt.points.space.model != self.model:
            raise MismatchError("filter does not belong to this lattice")

    def meet(self, a: ClosedFilter, b: ClosedFilter) -> ClosedFilter:
        self._own(a)
        self._own(b)
        return self.filter_for_mask(a.mask | b.mask)

    def join(self, a: ClosedFilter, b: ClosedFilter) -> ClosedFilter:
        """Closed union of filters: dual is the intersection of duals."""
        self._own(a)
        self._own(b)
        return self.filter_for_mask(a.mask & b.mask)

    def __repr__(self) -> str:
        return f"FilterLattice({self.varset}, {len(self.filters)} filters)"


def build_filter_lattice(model: Model, varset: VarSet,
                         max_term_depth: Optional[int] = None,
                         max_points: int = DEFAULT_MAX_POINTS) -> FilterLattice:
    return FilterLattice(generate_definable_algebra(model, varset, max_term_depth, max_points))


def filter_preimage(subst: Substitution, filt: ClosedFilter,
                    source_lattice: FilterLattice) -> ClosedFilter:
    """Pull a filter over the substitution's target back to its source.

    A formula belongs to the result exactly when its substituted form belongs
    to the original filter; on duals this closes the pointwise image.
    """
    if filt.points.space.varset != subst.target:
        raise MismatchError("filter is not over the substitution's target")
    if source_lattice.varset != subst.source or source_lattice.model != filt.points.space.model:
        raise MismatchError("lattice does not match the substitution's source")
    image = subst_image_points(subst, filt.points)
    closed = closure(image, source_lattice.algebra)
    return source_lattice.filter_for_mask(closed.mask)


def lattice_profile(lat: FilterLattice) -> tuple[int, int, tuple[int, ...]]:
    """(size, height, sorted degree multiset) of the lattice's cover diagram.

    Height is the longest cover chain; the degree of a node counts its
    covers and cocovers together.
    """
    masks = sorted(f.mask for f in lat.filters)
    n = len(masks)
    # filter order: a <= b iff dual(a) contains dual(b)
    leq = [[masks[j] & ~masks[i] == 0 for j in range(n)] for i in range(n)]
    covers: list[tuple[int, int]] = []
    for i in range(n):
        for j in range(n):
            if i == j or not leq[i][j]:
                continue
            if any(k != i and k != j and leq[i][k] and leq[k][j] for k in range(n)):
                continue
            covers.append((i, j))
    degree = [0] * n
    for i, j in covers:
        degree[i] += 1
        degree[j] += 1
    by_popcount = sorted(range(n), key=lambda i: -masks[i].bit_count())
    longest = {i: 0 for i in range(n)}
    up = {i: [] for i in range(n)}
    for i, j in covers:
        up[i].append(j)
    height = 0
    for i in by_popcount:
        for j in up[i]:
            longest[j] = max(longest[j], longest[i] + 1)
            height = max(height, longest[j])
    return len(masks), height, tuple(sorted(degree))
