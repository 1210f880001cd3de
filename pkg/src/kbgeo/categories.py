"""Filter-side and set-side categories over one model, and their duality.

Objects pair a variable set with its filter lattice (description side) or its
definable algebra (content side).  A description morphism along a substitution
s: X -> Y sends each filter over X to a filter over Y admissibly: the dual of
the image must sit inside the pointwise preimage of the dual of the argument.
Content morphisms run the other way, from sets over Y to sets over X, with the
pointwise image required to land inside the assigned set.

The duality swaps the two sides object by object (a filter and its dual set)
and morphism by morphism, reversing direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .core import (
    DEFAULT_MAX_POINTS,
    MismatchError,
    Model,
    Substitution,
    canonical_varset,
    compose_subst,
    enumerate_substitutions,
)
from .lattice import (
    ClosedFilter,
    DefinabilityError,
    DefinableAlgebra,
    DefinableSet,
    FilterLattice,
    build_filter_lattice,
    closure,
)
from .semantics import (
    PointSet,
    pullback_indices,
    subst_image_points,
    subst_preimage_points,
)


class AdmissibilityError(ValueError):
    """An assignment pairs filters or sets that violate admissibility."""


@dataclass(frozen=True)
class Report:
    """Outcome of a structural verification sweep."""

    title: str
    entries: tuple[tuple[str, str], ...]
    checked: int
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def render(self) -> str:
        lines = [f"report: {self.title}"]
        for key, value in self.entries:
            lines.append(f"{key}: {value}")
        lines.append(f"checked: {self.checked}")
        if self.failures:
            lines.append(f"failures: {len(self.failures)}")
            for i, failure in enumerate(self.failures):
                lines.append(f"failure[{i}]: {failure}")
        else:
            lines.append("failures: none")
        return "\n".join(lines)


class DescriptionObject:
    """A variable set together with its lattice of closed filters."""

    def __init__(self, lattice: FilterLattice):
        self.lattice = lattice
        self.model = lattice.model
        self.varset = lattice.varset

    def __len__(self) -> int:
        return len(self.lattice)

    def __repr__(self) -> str:
        return f"DescriptionObject({self.varset}, {len(self.lattice)} filters)"


class ContentObject:
    """A variable set together with its algebra of definable sets."""

    def __init__(self, algebra: DefinableAlgebra):
        self.algebra = algebra
        self.model = algebra.model
        self.varset = algebra.varset

    def __len__(self) -> int:
        return len(self.algebra)

    def __repr__(self) -> str:
        return f"ContentObject({self.varset}, {len(self.algebra)} sets)"


def is_admissible_desc(subst: Substitution, source_filter: ClosedFilter,
                       target_filter: ClosedFilter,
                       max_points: int = DEFAULT_MAX_POINTS) -> bool:
    """Whether the substitution may send source_filter to target_filter.

    On duals: the target filter's points must all pull back into the source
    filter's points.
    """
    if source_filter.points.space.model != target_filter.points.space.model:
        raise MismatchError("filters live over different models")
    preimage = subst_preimage_points(subst, source_filter.points, max_points)
    return target_filter.points.is_subset_of(preimage)


def is_admissible_cont(subst: Substitution, source_set: DefinableSet,
                       target_set: DefinableSet,
                       max_points: int = DEFAULT_MAX_POINTS) -> bool:
    """Whether the substitution may send source_set (over the substitution's
    target varset) to target_set (over its source varset): the pointwise image
    must be contained in the assigned set."""
    if source_set.points.space.model != target_set.points.space.model:
        raise MismatchError("sets live over different models")
    image = subst_image_points(subst, source_set.points, max_points)
    return image.is_subset_of(target_set.points)


class DescMorphism:
    """An admissible, total assignment of filters along a substitution.

    The assignment maps every dual mask of the source lattice to a dual mask
    of the target lattice; admissibility of each pair is checked on
    construction.
    """

    def __init__(self, source: DescriptionObject, target: DescriptionObject,
                 subst: Substitution, assignment: Mapping[int, int]):
        if subst.source != source.varset or subst.target != target.varset:
            raise MismatchError("substitution endpoints do not match the objects")
        if source.model != target.model:
            raise MismatchError("objects live over different models")
        assignment = dict(assignment)
        if set(assignment) != set(source.lattice.algebra.masks):
            raise MismatchError("assignment is not total on the source lattice")
        pull = pullback_indices(subst, source.lattice.algebra.space,
                                target.lattice.algebra.space)
        for src_mask, dst_mask in assignment.items():
            target.lattice.filter_for_mask(dst_mask)
            preimage = 0
            for p in range(target.lattice.algebra.space.size):
                if src_mask >> pull[p] & 1:
                    preimage |= 1 << p
            if dst_mask & ~preimage:
                raise AdmissibilityError(
                    f"assignment {src_mask:#x} -> {dst_mask:#x} is not admissible for {subst}")
        self.source = source
        self.target = target
        self.subst = subst
        self.assignment = assignment

    def map_filter(self, filt: ClosedFilter) -> ClosedFilter:
        return self.target.lattice.filter_for_mask(self.assignment[filt.mask])

    def __eq__(self, other) -> bool:
        if not isinstance(other, DescMorphism):
            return NotImplemented
        return (self.subst == other.subst and self.assignment == other.assignment
                and self.source.varset == other.source.varset
                and self.target.varset == other.target.varset)

    __hash__ = None

    def __repr__(self) -> str:
        return f"DescMorphism({self.subst}, {self.source.varset} -> {self.target.varset})"


class ContMorphism:
    """An admissible, total assignment of definable sets against a substitution.

    For a substitution s: X -> Y this maps sets over Y to sets over X.
    """

    def __init__(self, source: ContentObject, target: ContentObject,
                 subst: Substitution, assignment: Mapping[int, int]):
        if subst.target != source.varset or subst.source != target.varset:
            raise MismatchError("substitution endpoints do not match the objects")
        if source.model != target.model:
            raise MismatchError("objects live over different models")
        assignment = dict(assignment)
        if set(assignment) != set(source.algebra.masks):
            raise MismatchError("assignment is not total on the source algebra")
        pull = pullback_indices(subst, target.algebra.space, source.algebra.space)
        for src_mask, dst_mask in assignment.items():
            target.algebra.member(dst_mask)
            image = 0
            rest = src_mask
            while rest:
                low = rest & -rest
                image |= 1 << pull[low.bit_length() - 1]
                rest ^= low
            if image & ~dst_mask:
                raise AdmissibilityError(
                    f"assignment {src_mask:#x} -> {dst_mask:#x} is not admissible for {subst}")
        self.source = source
        self.target = target
        self.subst = subst
        self.assignment = assignment

    def map_set(self, dset: DefinableSet) -> DefinableSet:
        return self.target.algebra.member(self.assignment[dset.mask])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ContMorphism):
            return NotImplemented
        return (self.subst == other.subst and self.assignment == other.assignment
                and self.source.varset == other.source.varset
                and self.target.varset == other.target.varset)

    __hash__ = None

    def __repr__(self) -> str:
        return f"ContMorphism({self.subst}, {self.source.varset} -> {self.target.varset})"


def compose_desc(second: DescMorphism, first: DescMorphism) -> DescMorphism:
    """Apply first, then second."""
    if first.target.varset != second.source.varset:
        raise MismatchError("morphisms do not compose")
    subst = compose_subst(first.subst, second.subst)
    assignment = {m: second.assignment[first.assignment[m]] for m in first.assignment}
    return DescMorphism(first.source, second.target, subst, assignment)


def compose_cont(second: ContMorphism, first: ContMorphism) -> ContMorphism:
    """Apply first, then second.  Against substitutions this composes the
    underlying substitutions the other way around."""
    if first.target.varset != second.source.varset:
        raise MismatchError("morphisms do not compose")
    subst = compose_subst(second.subst, first.subst)
    assignment = {m: second.assignment[first.assignment[m]] for m in first.assignment}
    return ContMorphism(first.source, second.target, subst, assignment)


def identity_desc(obj: DescriptionObject) -> DescMorphism:
    subst = Substitution.identity(obj.varset)
    return DescMorphism(obj, obj, subst, {m: m for m in obj.lattice.algebra.masks})


def least_desc_morphism(source: DescriptionObject, target: DescriptionObject,
                        subst: Substitution) -> DescMorphism:
    """The pointwise least admissible assignment along a substitution: each
    filter goes to the filter whose dual is the full pullback of its dual."""
    pull = pullback_indices(subst, source.lattice.algebra.space,
                            target.lattice.algebra.space)
    assignment = {}
    for mask in source.lattice.algebra.masks:
        preimage = 0
        for p in range(target.lattice.algebra.space.size):
            if mask >> pull[p] & 1:
                preimage |= 1 << p
        if not target.lattice.algebra.contains_mask(preimage):
            raise DefinabilityError(
                f"pullback {preimage:#x} of {mask:#x} is not definable over {target.varset}")
        assignment[mask] = preimage
    return DescMorphism(source, target, subst, assignment)


def least_cont_morphism(source: ContentObject, target: ContentObject,
                        subst: Substitution) -> ContMorphism:
    """Each definable set goes to the closure of its pointwise image."""
    assignment = {}
    for member in source.algebra:
        image = subst_image_points(subst, member.points)
        assignment[member.mask] = closure(image, target.algebra).mask
    return ContMorphism(source, target, subst, assignment)


def content_of(obj: DescriptionObject) -> ContentObject:
    """The dual object: same variable set, the algebra of filter duals."""
    return ContentObject(obj.lattice.algebra)


def content_morphism(morphism: DescMorphism) -> ContMorphism:
    """The dual of a description morphism.

    The result runs against the substitution with the least content
    assignment.  Every assigned pair of the input is asserted admissible on
    the content side: the image of an assigned target dual must land in the
    argument's dual.  A violation would contradict the duality and raises.
    """
    source_obj = content_of(morphism.target)
    target_obj = content_of(morphism.source)
    result = least_cont_morphism(source_obj, target_obj, morphism.subst)
    for src_mask, dst_mask in morphism.assignment.items():
        dual_src = source_obj.algebra.member(dst_mask)
        dual_dst = target_obj.algebra.member(src_mask)
        if not is_admissible_cont(morphism.subst, dual_src, dual_dst):
            raise AdmissibilityError(
                f"duality broken: pair {src_mask:#x} -> {dst_mask:#x} has an inadmissible dual")
    return result


class KnowledgeBase:
    """A model with its description and content objects for sizes 1..n_max.

    Objects are built over the canonical variable sets and cached.  On every
    object the duality invariant is checked: filters and definable sets are in
    mask-for-mask bijection.
    """

    def __init__(self, model: Model, n_max: int,
                 max_term_depth: Optional[int] = None,
                 max_points: int = DEFAULT_MAX_POINTS):
        if n_max < 1:
            raise MismatchError("n_max must be at least 1")
        self.model = model
        self.n_max = n_max
        self.max_term_depth = max_term_depth
        self.max_points = max_points
        self._descriptions: dict[int, DescriptionObject] = {}

    def description(self, n: int) -> DescriptionObject:
        if not 1 <= n <= self.n_max:
            raise MismatchError(f"object size {n} outside 1..{self.n_max}")
        if n not in self._descriptions:
            lattice = build_filter_lattice(self.model, canonical_varset(n),
                                           self.max_term_depth, self.max_points)
            obj = DescriptionObject(lattice)
            dual_masks = sorted(m.mask for m in lattice.algebra)
            filter_masks = sorted(f.mask for f in lattice)
            if dual_masks != filter_masks:
                raise DefinabilityError("duality bijection broken on construction")
            self._descriptions[n] = obj
        return self._descriptions[n]

    def content(self, n: int) -> ContentObject:
        return content_of(self.description(n))

    @property
    def saturated(self) -> bool:
        return all(self.description(n).lattice.saturated for n in range(1, self.n_max + 1))


def push_filter(subst: Substitution, filt: ClosedFilter,
                target_lattice: FilterLattice) -> ClosedFilter:
    """Push a filter forward along a substitution to the least admissible
    target: the filter whose dual is the pullback of the dual."""
    if filt.points.space.varset != subst.source:
        raise MismatchError("filter is not over the substitution's source")
    if target_lattice.varset != subst.target or target_lattice.model != filt.points.space.model:
        raise MismatchError("lattice does not match the substitution's target")
    preimage = subst_preimage_points(subst, filt.points)
    if not target_lattice.algebra.contains_mask(preimage.mask):
        raise DefinabilityError(
            f"pullback {preimage.mask:#x} is not definable over {target_lattice.varset}")
    return target_lattice.filter_for_mask(preimage.mask)


def check_duality(model: Model, n_max: int, depth: int = 1,
                  max_term_depth: Optional[int] = None,
                  max_points: int = DEFAULT_MAX_POINTS) -> Report:
    """Verify the object and morphism duality up to the given bounds.

    Objects: mask bijection and order reversal between filters and sets.
    Morphisms: for every substitution between canonical variable sets of sizes
    up to n_max with image depth up to depth, the least description morphism
    dualizes admissibly, duals compose contravariantly, identities map to
    identities, and dualization is injective on the sampled family.
    """
    kb = KnowledgeBase(model, n_max, max_term_depth, max_points)
    checked = 0
    failures: list[str] = []
    sizes = []
    for n in range(1, n_max + 1):
        obj = kb.description(n)
        sizes.append(len(obj))
        masks = obj.lattice.algebra.masks
        for a in masks:
            fa = obj.lattice.filter_for_mask(a)
            for b in masks:
                fb = obj.lattice.filter_for_mask(b)
                order_filters = fa.is_leq(fb)
                order_duals = b & ~a == 0
                checked += 1
                if order_filters != order_duals:
                    failures.append(
                        f"|X|={n}: filter order and dual inclusion disagree on "
                        f"{a:#x}, {b:#x}")

    morphisms: dict[tuple[int, int], list[DescMorphism]] = {}
    duals: dict[tuple[int, int], list[ContMorphism]] = {}
    for a in range(1, n_max + 1):
        for b in range(1, n_max + 1):
            source, target = kb.description(a), kb.description(b)
            pairs: list[DescMorphism] = []
            dual_pairs: list[ContMorphism] = []
            for subst in enumerate_substitutions(model.sig, source.varset,
                                                 target.varset, depth):
                morphism = least_desc_morphism(source, target, subst)
                dual = content_morphism(morphism)
                checked += 1
                pairs.append(morphism)
                dual_pairs.append(dual)
            morphisms[(a, b)] = pairs
            duals[(a, b)] = dual_pairs
            for i, m1 in enumerate(pairs):
                for j, m2 in enumerate(pairs):
                    checked += 1
                    if (dual_pairs[i] == dual_pairs[j]) != (m1 == m2):
                        failures.append(
                            f"duality not injective between sizes {a}->{b}")

    for n in range(1, n_max + 1):
        obj = kb.description(n)
        ident = identity_desc(obj)
        dual = content_morphism(ident)
        checked += 1
        if any(dual.assignment[m] != m for m in dual.assignment):
            failures.append(f"identity over |X|={n} does not dualize to the identity")

    for a in range(1, n_max + 1):
        for b in range(1, n_max + 1):
            for c in range(1, n_max + 1):
                for i, m1 in enumerate(morphisms[(a, b)]):
                    for j, m2 in enumerate(morphisms[(b, c)]):
                        composite = compose_desc(m2, m1)
                        left = content_morphism(composite)
                        right = compose_cont(duals[(a, b)][i], duals[(b, c)][j])
                        checked += 1
                        if left != right:
                            failures.append(
                                f"dual of a composite differs: sizes {a}->{b}->{c}, "
                                f"subs {m1.subst} then {m2.subst}")

    entries = (
        ("object", f"canonical variable sets of sizes 1..{n_max}"),
        ("sizes", " ".join(str(s) for s in sizes)),
        ("morphism family", f"least assignments for substitutions of depth <= {depth}"),
    )
    return Report("duality", entries, checked, tuple(failures))


def verify_push_functoriality(model: Model, depth: int, n_max: int,
                              max_term_depth: Optional[int] = None,
                              max_points: int = DEFAULT_MAX_POINTS) -> Report:
    """Check that pushing filters forward respects identity and composition.

    Sweeps all composable substitution pairs between canonical variable sets
    of sizes up to n_max with image depth up to depth, applied to every filter
    of the source lattice.
    """
    kb = KnowledgeBase(model, n_max, max_term_depth, max_points)
    checked = 0
    failures: list[str] = []
    for n in range(1, n_max + 1):
        lattice = kb.description(n).lattice
        ident = Substitution.identity(lattice.varset)
        for filt in lattice:
            checked += 1
            if push_filter(ident, filt, lattice) != filt:
                failures.append(f"identity push moved a filter over |X|={n}")

    triples = 0
    for a in range(1, n_max + 1):
        for b in range(1, n_max + 1):
            for c in range(1, n_max + 1):
                lat_a = kb.description(a).lattice
                lat_b = kb.description(b).lattice
                lat_c = kb.description(c).lattice
                subs_ab = enumerate_substitutions(model.sig, lat_a.varset, lat_b.varset, depth)
                subs_bc = enumerate_substitutions(model.sig, lat_b.varset, lat_c.varset, depth)
                for s1 in subs_ab:
                    for s2 in subs_bc:
                        composite = compose_subst(s1, s2)
                        for filt in lat_a:
                            triples += 1
                            checked += 1
                            direct = push_filter(composite, filt, lat_c)
                            staged = push_filter(s2, push_filter(s1, filt, lat_b), lat_c)
                            if direct != staged:
                                failures.append(
                                    f"push along {s1} then {s2} disagrees with the "
                                    f"composite on dual {filt.mask:#x}")

    entries = (
        ("object", f"canonical variable sets of sizes 1..{n_max}"),
        ("substitution depth", str(depth)),
        ("triples", str(triples)),
    )
    return Report("push functoriality", entries, checked, tuple(failures))
