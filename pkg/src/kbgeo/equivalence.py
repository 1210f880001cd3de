"""Bounded deciders for equivalence of finite models as knowledge bases.

Three strengths are covered: carrier isomorphism, automorphism-witnessed
isomorphism of the filter-lattice families, and the informational pipeline
combining invariant refutation with witness search.  Verdicts are tri-state:
a witness is verified before it is reported, a refutation names the invariant
that separates the models, and anything else is UNKNOWN together with the
bounds that were tried.

Supported automorphisms are generated by relation permutations and by
variable renamings; in a free term setting the invertible substitutions are
exactly the renamings, so this covers every automorphism built from symbol
shuffles.  Every report says so.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import (
    DEFAULT_MAX_POINTS,
    MismatchError,
    Model,
    ModelMap,
    Signature,
    SignatureError,
    Substitution,
    Var,
    canonical_varset,
    compose_subst,
    enumerate_substitutions,
    enumerate_terms,
    model_isomorphisms,
)
from .formulas import Atom, Equal, Formula
from .lattice import DefinabilityError, FilterLattice, build_filter_lattice, lattice_profile
from .semantics import pullback_indices, satisfying_points
from .categories import (
    AdmissibilityError,
    DescMorphism,
    DescriptionObject,
    Report,
    compose_desc,
    identity_desc,
    least_desc_morphism,
)

VERDICT_WITNESSED = "EQUIVALENT_WITNESSED"
VERDICT_INEQUIVALENT = "INEQUIVALENT"
VERDICT_UNKNOWN = "UNKNOWN"

SUPPORTED_CLASS = "relation permutations and variable renamings"


@dataclass(frozen=True)
class FormulaAutomorphism:
    """A symmetry of the formula system over a fixed signature.

    It permutes relation symbols (preserving arity) and renames the canonical
    variables sizewise; both parts act on formulas atom by atom.  Variable
    renamings are stored per size and default to the identity.
    """

    sig: Signature
    rel_images: tuple[tuple[str, str], ...]
    var_images: tuple[tuple[int, tuple[str, ...]], ...] = ()

    def __post_init__(self):
        rel_map = dict(self.rel_images)
        names = [n for n, _ in self.sig.rels]
        if sorted(rel_map) != sorted(names) or sorted(rel_map.values()) != sorted(names):
            raise SignatureError("relation images must permute the declared relations")
        for name, image in rel_map.items():
            if self.sig.rel_arity(name) != self.sig.rel_arity(image):
                raise SignatureError(f"relation map {name} -> {image} changes arity")
        object.__setattr__(self, "rel_images", tuple(sorted(rel_map.items())))
        var_map = {}
        for n, images in self.var_images:
            expected = canonical_varset(n).names
            if sorted(images) != sorted(expected):
                raise SignatureError(f"size {n} images must permute {expected}")
            if images != expected:
                var_map[n] = tuple(images)
        object.__setattr__(self, "var_images", tuple(sorted(var_map.items())))

    @classmethod
    def identity(cls, sig: Signature) -> "FormulaAutomorphism":
        return cls(sig, tuple((n, n) for n in sig.rel_names))

    @classmethod
    def relation_permutation(cls, sig: Signature, mapping) -> "FormulaAutomorphism":
        mapping = dict(mapping)
        images = tuple((n, mapping.get(n, n)) for n in sig.rel_names)
        return cls(sig, images)

    @classmethod
    def variable_renaming(cls, sig: Signature, renamings) -> "FormulaAutomorphism":
        images = tuple((n, n) for n in sig.rel_names)
        var_images = tuple((n, tuple(perm)) for n, perm in dict(renamings).items())
        return cls(sig, images, var_images)

    def rel_image(self, name: str) -> str:
        for source, image in self.rel_images:
            if source == name:
                return image
        raise SignatureError(f"unknown relation {name}")

    def renaming_for(self, n: int) -> Substitution:
        varset = canonical_varset(n)
        for size, images in self.var_images:
            if size == n:
                return Substitution(varset, varset, tuple(Var(v) for v in images))
        return Substitution.identity(varset)

    @property
    def is_identity(self) -> bool:
        return all(a == b for a, b in self.rel_images) and not self.var_images

    def inverse(self) -> "FormulaAutomorphism":
        rel = tuple((b, a) for a, b in self.rel_images)
        var = []
        for n, images in self.var_images:
            names = canonical_varset(n).names
            inverse = dict(zip(images, names))
            var.append((n, tuple(inverse[v] for v in names)))
        return FormulaAutomorphism(self.sig, rel, tuple(var))

    def map_subst(self, subst: Substitution) -> Substitution:
        """Conjugate a substitution between canonical variable sets by the
        sizewise renamings."""
        u_source = self.renaming_for(len(subst.source))
        u_target = self.renaming_for(len(subst.target))
        return compose_subst(compose_subst(u_source.inverted(), subst), u_target)

    def map_formula(self, f: Formula, n: int) -> Formula:
        """Act on an atomic formula over the canonical variable set of size n."""
        u = self.renaming_for(n)
        if isinstance(f, Atom):
            return Atom(self.rel_image(f.rel), tuple(u.apply_to_term(t) for t in f.args))
        if isinstance(f, Equal):
            return Equal(u.apply_to_term(f.left), u.apply_to_term(f.right))
        raise MismatchError("only atomic formulas are mapped directly")

    def describe(self) -> str:
        if self.is_identity:
            return "identity"
        parts = []
        moved = [(a, b) for a, b in self.rel_images if a != b]
        if moved:
            if all((b, a) in moved for a, b in moved):
                seen = set()
                for a, b in moved:
                    if a not in seen:
                        parts.append(f"swap {min(a, b)} {max(a, b)}")
                        seen.update((a, b))
            else:
                parts.append("relperm " + ",".join(f"{a}->{b}" for a, b in moved))
        for n, images in self.var_images:
            names = canonical_varset(n).names
            inner = ",".join(f"{a}:{b}" for a, b in zip(names, images) if a != b)
            parts.append(f"renamevars[{n}] {inner}")
        return "; ".join(parts)


def enumerate_automorphisms(sig: Signature, n_max: int) -> list[FormulaAutomorphism]:
    """The supported search order: identity first, then relation permutations
    lexicographically, then variable renaming families."""
    out = [FormulaAutomorphism.identity(sig)]
    names = list(sig.rel_names)
    for perm in itertools.permutations(names):
        if list(perm) == names:
            continue
        if any(sig.rel_arity(a) != sig.rel_arity(b) for a, b in zip(names, perm)):
            continue
        out.append(FormulaAutomorphism(sig, tuple(zip(names, perm))))
    per_size = []
    for n in range(1, n_max + 1):
        per_size.append(list(itertools.permutations(canonical_varset(n).names)))
    for family in itertools.product(*per_size):
        renamings = {n + 1: images for n, images in enumerate(family)}
        if all(tuple(images) == canonical_varset(n).names for n, images in renamings.items()):
            continue
        out.append(FormulaAutomorphism.variable_renaming(sig, renamings))
    return out


@dataclass
class FunctorIso:
    """A verified family of lattice bijections implementing an automorphism.

    ``alphas[n]`` maps dual masks of the first model's lattice over x1..xn to
    dual masks of the second model's.  The bounds record how far the defining
    conditions were checked.
    """

    phi: FormulaAutomorphism
    n_max: int
    depth: int
    alphas: dict[int, dict[int, int]]
    lattices1: dict[int, FilterLattice]
    lattices2: dict[int, FilterLattice]

    def alpha_mask(self, n: int, mask: int) -> int:
        return self.alphas[n][mask]

    def inverse_alphas(self) -> dict[int, dict[int, int]]:
        return {n: {v: k for k, v in table.items()} for n, table in self.alphas.items()}

    def describe(self) -> str:
        sizes = "; ".join(f"|X|={n}: {len(self.alphas[n])} filters"
                          for n in sorted(self.alphas))
        return f"phi {self.phi.describe()} with {sizes}"


class _PullCache:
    """Pullback index arrays per (model tag, substitution)."""

    def __init__(self, lattices1: dict[int, FilterLattice],
                 lattices2: dict[int, FilterLattice]):
        self.spaces = {
            1: {n: lat.algebra.space for n, lat in lattices1.items()},
            2: {n: lat.algebra.space for n, lat in lattices2.items()},
        }
        self.cache: dict[tuple[int, Substitution], list[int]] = {}

    def pull(self, tag: int, subst: Substitution) -> list[int]:
        key = (tag, subst)
        if key not in self.cache:
            spaces = self.spaces[tag]
            self.cache[key] = pullback_indices(
                subst, spaces[len(subst.source)], spaces[len(subst.target)])
        return self.cache[key]

    def preimage(self, tag: int, subst: Substitution, mask: int) -> int:
        pull = self.pull(tag, subst)
        out = 0
        for p, q in enumerate(pull):
            if mask >> q & 1:
                out |= 1 << p
        return out


def _atom_constraints(model1: Model, model2: Model, phi: FormulaAutomorphism,
                      n: int, depth: int,
                      max_points: int) -> Optional[list[tuple[int, int]]]:
    """Pairs (mask over model1, required image mask over model2) forced by the
    automorphism's action on atomic formulas, or None when they already clash.
    """
    varset = canonical_varset(n)
    terms = enumerate_terms(model1.sig, varset, depth)
    atoms: list[Formula] = []
    for rel, arity in model1.sig.rels:
        for combo in itertools.product(terms, repeat=arity):
            atoms.append(Atom(rel, combo))
    if model1.sig.with_equality:
        for left in terms:
            for right in terms:
                atoms.append(Equal(left, right))
    forward: dict[int, int] = {}
    backward: dict[int, int] = {}
    for atom in atoms:
        mask1 = satisfying_points(atom, model1, varset, max_points).mask
        image = phi.map_formula(atom, n)
        mask2 = satisfying_points(image, model2, varset, max_points).mask
        if forward.get(mask1, mask2) != mask2 or backward.get(mask2, mask1) != mask1:
            return None
        forward[mask1] = mask2
        backward[mask2] = mask1
    return sorted(forward.items())


def _candidate_alphas(lat1: FilterLattice, lat2: FilterLattice,
                      constraints: list[tuple[int, int]]) -> Iterable[dict[int, int]]:
    """All mask bijections induced by block bijections compatible with the
    constraints, in deterministic order."""
    blocks1 = lat1.algebra.block_masks()
    blocks2 = lat2.algebra.block_masks()
    if len(blocks1) != len(blocks2):
        return
    sig1 = {b: tuple(b & ~a == 0 for a, _ in constraints) for b in blocks1}
    sig2 = {b: tuple(b & ~a == 0 for _, a in constraints) for b in blocks2}
    classes1: dict[tuple, list[int]] = {}
    classes2: dict[tuple, list[int]] = {}
    for b in blocks1:
        classes1.setdefault(sig1[b], []).append(b)
    for b in blocks2:
        classes2.setdefault(sig2[b], []).append(b)
    if sorted(classes1) != sorted(classes2):
        return
    keys = sorted(classes1)
    if any(len(classes1[k]) != len(classes2[k]) for k in keys):
        return
    member_masks = lat1.algebra.masks
    target_masks = set(lat2.algebra.masks)
    for choice in itertools.product(*(itertools.permutations(classes2[k]) for k in keys)):
        block_map: dict[int, int] = {}
        for key, images in zip(keys, choice):
            for b, c in zip(classes1[key], images):
                block_map[b] = c
        alpha: dict[int, int] = {}
        ok = True
        for mask in member_masks:
            image = 0
            for b, c in block_map.items():
                if b & mask == b:
                    image |= c
            if image not in target_masks:
                ok = False
                break
            alpha[mask] = image
        if ok:
            yield alpha


def _squares_commute(alphas: dict[int, dict[int, int]], phi: FormulaAutomorphism,
                     lattices1: dict[int, FilterLattice],
                     pulls: _PullCache, sig: Signature, depth: int,
                     source_n: int, target_n: int) -> bool:
    """Check the naturality squares for all bounded substitutions between two
    assigned sizes: pushing then transporting equals transporting then
    pushing along the mapped substitution."""
    source = canonical_varset(source_n)
    target = canonical_varset(target_n)
    alpha_a = alphas[source_n]
    alpha_b = alphas[target_n]
    for subst in enumerate_substitutions(sig, source, target, depth):
        mapped = phi.map_subst(subst)
        for mask in lattices1[source_n].algebra.masks:
            push1 = pulls.preimage(1, subst, mask)
            if push1 not in alpha_b:
                raise DefinabilityError(
                    f"pullback {push1:#x} is not definable over {target}")
            lhs = alpha_b[push1]
            rhs = pulls.preimage(2, mapped, alpha_a[mask])
            if lhs != rhs:
                return False
    return True


def _build_lattices(model: Model, n_max: int, max_term_depth, max_points):
    return {n: build_filter_lattice(model, canonical_varset(n), max_term_depth, max_points)
            for n in range(1, n_max + 1)}


def find_functor_iso(model1: Model, model2: Model, phi: FormulaAutomorphism,
                     n_max: int = 2, depth: int = 2,
                     max_term_depth: Optional[int] = None,
                     max_points: int = DEFAULT_MAX_POINTS) -> Optional[FunctorIso]:
    """Search for lattice bijections realizing the automorphism, or None.

    Candidates for each size are block bijections pinned down by the
    automorphism's action on atomic formulas; a backtracking pass accepts an
    assignment only when every naturality square between assigned sizes
    commutes for every substitution within the depth bound.  Partial lattices
    never certify: the search requires saturated generation.
    """
    if model1.sig != model2.sig:
        raise MismatchError("models have different signatures")
    lattices1 = _build_lattices(model1, n_max, max_term_depth, max_points)
    lattices2 = _build_lattices(model2, n_max, max_term_depth, max_points)
    if not all(lat.saturated for lat in lattices1.values()) or \
            not all(lat.saturated for lat in lattices2.values()):
        return None
    candidate_lists: list[list[dict[int, int]]] = []
    for n in range(1, n_max + 1):
        if len(lattices1[n]) != len(lattices2[n]):
            return None
        constraints = _atom_constraints(model1, model2, phi, n, depth, max_points)
        if constraints is None:
            return None
        candidates = list(_candidate_alphas(lattices1[n], lattices2[n], constraints))
        if not candidates:
            return None
        candidate_lists.append(candidates)

    pulls = _PullCache(lattices1, lattices2)
    alphas: dict[int, dict[int, int]] = {}

    def assign(n: int) -> bool:
        if n > n_max:
            return True
        for candidate in candidate_lists[n - 1]:
            alphas[n] = candidate
            ok = True
            for other in range(1, n + 1):
                if not _squares_commute(alphas, phi, lattices1, pulls, model1.sig,
                                        depth, other, n):
                    ok = False
                    break
                if other != n and not _squares_commute(alphas, phi, lattices1, pulls,
                                                       model1.sig, depth, n, other):
                    ok = False
                    break
            if ok and assign(n + 1):
                return True
            del alphas[n]
        return False

    if not assign(1):
        return None
    return FunctorIso(phi, n_max, depth, dict(alphas), lattices1, lattices2)


def transport_model_iso(mmap: ModelMap, n_max: int = 2, depth: int = 2,
                        max_term_depth: Optional[int] = None,
                        max_points: int = DEFAULT_MAX_POINTS) -> FunctorIso:
    """Turn a carrier isomorphism into the induced lattice-family bijection,
    with the identity automorphism, and verify its defining conditions."""
    model1, model2 = mmap.source, mmap.target
    lattices1 = _build_lattices(model1, n_max, max_term_depth, max_points)
    lattices2 = _build_lattices(model2, n_max, max_term_depth, max_points)
    alphas: dict[int, dict[int, int]] = {}
    for n in range(1, n_max + 1):
        space1 = lattices1[n].algebra.space
        space2 = lattices2[n].algebra.space
        table: dict[int, int] = {}
        for mask in lattices1[n].algebra.masks:
            image = 0
            rest = mask
            while rest:
                low = rest & -rest
                idx = low.bit_length() - 1
                rest ^= low
                image |= 1 << space2.index_of(mmap.apply_values(space1.value_rows[idx]))
            if not lattices2[n].algebra.contains_mask(image):
                raise DefinabilityError(
                    f"relabeled member {image:#x} is missing over size {n}")
            table[mask] = image
        alphas[n] = table
    phi = FormulaAutomorphism.identity(model1.sig)
    pulls = _PullCache(lattices1, lattices2)
    for n in range(1, n_max + 1):
        constraints = _atom_constraints(model1, model2, phi, n, depth, max_points)
        if constraints is None or any(alphas[n][a] != b for a, b in constraints):
            raise DefinabilityError("carrier transport violates an atom constraint")
    for a in range(1, n_max + 1):
        for b in range(1, n_max + 1):
            if not _squares_commute(alphas, phi, lattices1, pulls, model1.sig,
                                    depth, a, b):
                raise DefinabilityError("carrier transport violates a naturality square")
    return FunctorIso(phi, n_max, depth, alphas, lattices1, lattices2)


def verify_admissibility_transfer(iso: FunctorIso, n_max: Optional[int] = None,
                                  depth: Optional[int] = None) -> Report:
    """Exhaustively confirm that a filter pair is admissible along a
    substitution exactly when its transported pair is admissible along the
    mapped substitution."""
    n_max = iso.n_max if n_max is None else n_max
    depth = iso.depth if depth is None else depth
    if n_max > iso.n_max:
        raise MismatchError("cannot verify beyond the witness bounds")
    sig = iso.lattices1[1].model.sig
    pulls = _PullCache(iso.lattices1, iso.lattices2)
    checked = 0
    failures: list[str] = []
    for a in range(1, n_max + 1):
        for b in range(1, n_max + 1):
            masks_a = iso.lattices1[a].algebra.masks
            masks_b = iso.lattices1[b].algebra.masks
            for subst in enumerate_substitutions(sig, canonical_varset(a),
                                                 canonical_varset(b), depth):
                mapped = iso.phi.map_subst(subst)
                for t1 in masks_a:
                    pre1 = pulls.preimage(1, subst, t1)
                    pre2 = pulls.preimage(2, mapped, iso.alphas[a][t1])
                    for t2 in masks_b:
                        checked += 1
                        before = t2 & ~pre1 == 0
                        after = iso.alphas[b][t2] & ~pre2 == 0
                        if before != after:
                            failures.append(
                                f"transfer broken for {subst} on duals "
                                f"{t1:#x}, {t2:#x}: {before} vs {after}")
    entries = (
        ("object", f"canonical variable sets of sizes 1..{n_max}"),
        ("substitution depth", str(depth)),
        ("phi", iso.phi.describe()),
    )
    return Report("admissibility transfer", entries, checked, tuple(failures))


def build_description_iso(iso: FunctorIso) -> Report:
    """Materialize the induced functor between the description categories and
    check the functor laws.

    The forward functor maps a least morphism along s to the transported
    assignment along the mapped substitution; the backward functor uses the
    inverse automorphism and inverse bijections.  Checked: every image is
    admissible, identities map to identities, composition is preserved, and
    the two functors invert each other on the sampled families.
    """
    sig = iso.lattices1[1].model.sig
    objects1 = {n: DescriptionObject(iso.lattices1[n]) for n in iso.lattices1}
    objects2 = {n: DescriptionObject(iso.lattices2[n]) for n in iso.lattices2}
    inverse = iso.inverse_alphas()
    phi_inv = iso.phi.inverse()
    checked = 0
    failures: list[str] = []

    def forward(m: DescMorphism) -> DescMorphism:
        a, b = len(m.source.varset), len(m.target.varset)
        assignment = {iso.alphas[a][k]: iso.alphas[b][v] for k, v in m.assignment.items()}
        return DescMorphism(objects2[a], objects2[b], iso.phi.map_subst(m.subst), assignment)

    def backward(m: DescMorphism) -> DescMorphism:
        a, b = len(m.source.varset), len(m.target.varset)
        assignment = {inverse[a][k]: inverse[b][v] for k, v in m.assignment.items()}
        return DescMorphism(objects1[a], objects1[b], phi_inv.map_subst(m.subst), assignment)

    family1: dict[tuple[int, int], list[DescMorphism]] = {}
    family2: dict[tuple[int, int], list[DescMorphism]] = {}
    images1: dict[tuple[int, int], list[DescMorphism]] = {}
    for a in range(1, iso.n_max + 1):
        for b in range(1, iso.n_max + 1):
            lst1, lst2, img = [], [], []
            for subst in enumerate_substitutions(sig, canonical_varset(a),
                                                 canonical_varset(b), iso.depth):
                m1 = least_desc_morphism(objects1[a], objects1[b], subst)
                lst1.append(m1)
                checked += 1
                try:
                    img.append(forward(m1))
                except AdmissibilityError as exc:
                    failures.append(f"image of {subst} is not admissible: {exc}")
                    img.append(None)
                m2 = least_desc_morphism(objects2[a], objects2[b], subst)
                lst2.append(m2)
            family1[(a, b)] = lst1
            family2[(a, b)] = lst2
            images1[(a, b)] = img

    for n in range(1, iso.n_max + 1):
        checked += 1
        if forward(identity_desc(objects1[n])) != identity_desc(objects2[n]):
            failures.append(f"identity over |X|={n} is not preserved")

    for a in range(1, iso.n_max + 1):
        for b in range(1, iso.n_max + 1):
            for c in range(1, iso.n_max + 1):
                for m1, f1 in zip(family1[(a, b)], images1[(a, b)]):
                    for m2, f2 in zip(family1[(b, c)], images1[(b, c)]):
                        if f1 is None or f2 is None:
                            continue
                        checked += 1
                        if forward(compose_desc(m2, m1)) != compose_desc(f2, f1):
                            failures.append(
                                f"composition not preserved for {m1.subst} then {m2.subst}")

    for key, morphisms in family1.items():
        for m1, f1 in zip(morphisms, images1[key]):
            if f1 is None:
                continue
            checked += 1
            if backward(f1) != m1:
                failures.append(f"backward functor does not invert {m1.subst}")
    for key, morphisms in family2.items():
        for m2 in morphisms:
            checked += 1
            try:
                if forward(backward(m2)) != m2:
                    failures.append(f"forward functor does not invert {m2.subst}")
            except AdmissibilityError as exc:
                failures.append(f"backward image of {m2.subst} is not admissible: {exc}")

    entries = (
        ("object", f"canonical variable sets of sizes 1..{iso.n_max}"),
        ("substitution depth", str(iso.depth)),
        ("phi", iso.phi.describe()),
    )
    return Report("description functor", entries, checked, tuple(failures))


@dataclass(frozen=True)
class EquivReport:
    """Outcome of an equivalence decision with its evidence."""

    verdict: str
    mode: str
    bounds: tuple[tuple[str, str], ...]
    witness: Optional[tuple[tuple[str, str], ...]]
    refutation: Optional[tuple[tuple[str, str], ...]]
    notes: tuple[str, ...]

    @property
    def exit_code(self) -> int:
        if self.verdict == VERDICT_WITNESSED:
            return 0
        if self.verdict == VERDICT_INEQUIVALENT:
            return 1
        return 2


def check_isomorphic(model1: Model, model2: Model) -> EquivReport:
    """Exact decision of carrier isomorphism by exhaustive bijection search."""
    isos = model_isomorphisms(model1, model2)
    if isos:
        witness = (
            ("kind", "model isomorphism"),
            ("map", isos[0].describe()),
        )
        return EquivReport(VERDICT_WITNESSED, "isomorphism", (), witness, None, ())
    refutation = (
        ("invariant", "model isomorphism"),
        ("detail", "no carrier bijection preserves every table"),
    )
    return EquivReport(VERDICT_INEQUIVALENT, "isomorphism", (), None, refutation, ())


def _bounds(n_max: int, depth: int) -> tuple[tuple[str, str], ...]:
    return (("n_max", str(n_max)), ("depth", str(depth)))


def _invariant_refutation(lattices1, lattices2, n_max) -> Optional[tuple[tuple[str, str], ...]]:
    for n in range(1, n_max + 1):
        size1, height1, degrees1 = lattice_profile(lattices1[n])
        size2, height2, degrees2 = lattice_profile(lattices2[n])
        varset = canonical_varset(n)
        for name, left, right in (("lattice size", size1, size2),
                                  ("lattice height", height1, height2),
                                  ("degree multiset", degrees1, degrees2)):
            if left != right:
                return (
                    ("invariant", name),
                    ("var_count", str(n)),
                    ("left", str(left)),
                    ("right", str(right)),
                    ("values", f"{left} vs {right} at |X|={n}"),
                    ("summary", f"{name} {left} vs {right} at X={varset}"),
                )
    return None


def check_informational_equivalence(model1: Model, model2: Model,
                                    n_max: int = 2, depth: int = 2,
                                    max_term_depth: Optional[int] = None,
                                    max_points: int = DEFAULT_MAX_POINTS,
                                    phis: Optional[list[FormulaAutomorphism]] = None,
                                    mode: str = "informational",
                                    use_model_iso: bool = True) -> EquivReport:
    """The bounded pipeline: refute by lattice invariants, then search for a
    verified witness, otherwise report UNKNOWN with the bounds.

    A witness is either a carrier isomorphism transported to the lattice
    families or a found functor isomorphism for one of the candidate
    automorphisms; in both cases the description functor construction must
    pass before the witness is reported.
    """
    if model1.sig != model2.sig:
        raise MismatchError("models have different signatures")
    lattices1 = _build_lattices(model1, n_max, max_term_depth, max_points)
    lattices2 = _build_lattices(model2, n_max, max_term_depth, max_points)
    saturated = all(lat.saturated for lat in lattices1.values()) and \
        all(lat.saturated for lat in lattices2.values())
    notes = [f"supported automorphism class: {SUPPORTED_CLASS}"]
    bounds = _bounds(n_max, depth)

    if saturated:
        refutation = _invariant_refutation(lattices1, lattices2, n_max)
        if refutation is not None:
            return EquivReport(VERDICT_INEQUIVALENT, mode, bounds, None,
                               refutation, tuple(notes))
    else:
        notes.append("lattice generation hit the term depth bound; no refutation or witness"
                     " is drawn from partial lattices")

    if use_model_iso:
        isos = model_isomorphisms(model1, model2)
        if isos:
            iso = transport_model_iso(isos[0], n_max, depth, max_term_depth, max_points)
            construction = build_description_iso(iso)
            if not construction.passed:
                raise DefinabilityError(
                    "carrier isomorphism failed the description functor construction")
            witness = (
                ("kind", "model isomorphism"),
                ("map", isos[0].describe()),
                ("phi", iso.phi.describe()),
                ("alphas", "; ".join(f"|X|={n}: {len(iso.alphas[n])} filters"
                                     for n in sorted(iso.alphas))),
            )
            return EquivReport(VERDICT_WITNESSED, mode, bounds, witness, None, tuple(notes))

    if saturated:
        candidates = enumerate_automorphisms(model1.sig, n_max) if phis is None else phis
        for phi in candidates:
            iso = find_functor_iso(model1, model2, phi, n_max, depth,
                                   max_term_depth, max_points)
            if iso is None:
                continue
            construction = build_description_iso(iso)
            if not construction.passed:
                raise DefinabilityError(
                    f"witness {phi.describe()} failed the description functor construction")
            witness = (
                ("kind", "functor isomorphism"),
                ("phi", phi.describe()),
                ("alphas", "; ".join(f"|X|={n}: {len(iso.alphas[n])} filters"
                                     for n in sorted(iso.alphas))),
            )
            return EquivReport(VERDICT_WITNESSED, mode, bounds, witness, None, tuple(notes))

    return EquivReport(VERDICT_UNKNOWN, mode, bounds, None, None, tuple(notes))


def check_automorphic_equivalence(model1: Model, model2: Model,
                                  phis: Optional[list[FormulaAutomorphism]] = None,
                                  n_max: int = 2, depth: int = 2,
                                  max_term_depth: Optional[int] = None,
                                  max_points: int = DEFAULT_MAX_POINTS) -> EquivReport:
    """Witness search over automorphisms only, without the carrier fast path."""
    return check_informational_equivalence(
        model1, model2, n_max, depth, max_term_depth, max_points,
        phis=phis, mode="automorphic", use_model_iso=False)
