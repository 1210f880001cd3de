"""Definable point geometry over finite models.

The package builds the correspondence between formulas and the point sets
they carve out of finite assignment spaces, generates the definable-set
algebras and filter lattices attached to each variable count, verifies the
duality between knowledge descriptions and knowledge content, and decides
bounded equivalences between knowledge bases: model isomorphism, automorphic
equivalence through a formula-algebra automorphism, and informational
equivalence.
"""

from .core import (
    BoundError,
    DEFAULT_MAX_POINTS,
    MismatchError,
    Model,
    ModelError,
    ModelMap,
    OpApp,
    ParseError,
    Signature,
    SignatureError,
    Substitution,
    Var,
    VarSet,
    canonical_varset,
    compose_subst,
    enumerate_substitutions,
    enumerate_terms,
    eval_term,
    model_isomorphisms,
    parse_term,
    term_depth,
    term_to_text,
    term_vars,
    term_functions,
)
from .formulas import (
    And,
    Atom,
    Equal,
    Exists,
    FALSE,
    FalseF,
    Forall,
    FormulaContext,
    Implies,
    Not,
    Or,
    SubstNode,
    TRUE,
    TrueF,
    apply_subst_formula,
    check_formula,
    enumerate_formulas,
    formula_to_text,
    free_vars,
    parse_formula,
)
from .semantics import (
    Point,
    PointSet,
    PointSpace,
    enumerate_points,
    holds_at,
    holds_on_all,
    points_satisfying_all,
    satisfying_points,
    subst_image_points,
    subst_preimage_points,
)
from .lattice import (
    ClosedFilter,
    DefinabilityError,
    DefinableAlgebra,
    DefinableSet,
    FilterLattice,
    build_filter_lattice,
    closure,
    filter_preimage,
    generate_definable_algebra,
    lattice_profile,
)
from .categories import (
    AdmissibilityError,
    ContMorphism,
    ContentObject,
    DescMorphism,
    DescriptionObject,
    KnowledgeBase,
    Report,
    check_duality,
    compose_cont,
    compose_desc,
    content_morphism,
    content_of,
    identity_desc,
    is_admissible_cont,
    is_admissible_desc,
    least_cont_morphism,
    least_desc_morphism,
    push_filter,
    verify_push_functoriality,
)
from .equivalence import (
    EquivReport,
    FormulaAutomorphism,
    FunctorIso,
    VERDICT_INEQUIVALENT,
    VERDICT_UNKNOWN,
    VERDICT_WITNESSED,
    build_description_iso,
    check_automorphic_equivalence,
    check_informational_equivalence,
    check_isomorphic,
    enumerate_automorphisms,
    find_functor_iso,
    transport_model_iso,
    verify_admissibility_transfer,
)

__version__ = "0.1.0"

__all__ = [
    "BoundError",
    "DEFAULT_MAX_POINTS",
    "MismatchError",
    "Model",
    "ModelError",
    "ModelMap",
    "OpApp",
    "ParseError",
    "Signature",
    "SignatureError",
    "Substitution",
    "Var",
    "VarSet",
    "canonical_varset",
    "compose_subst",
    "enumerate_substitutions",
    "enumerate_terms",
    "eval_term",
    "model_isomorphisms",
    "parse_term",
    "term_depth",
    "term_to_text",
    "term_vars",
    "term_functions",
    "And",
    "Atom",
    "Equal",
    "Exists",
    "FALSE",
    "FalseF",
    "Forall",
    "FormulaContext",
    "Implies",
    "Not",
    "Or",
    "SubstNode",
    "TRUE",
    "TrueF",
    "apply_subst_formula",
    "check_formula",
    "enumerate_formulas",
    "formula_to_text",
    "free_vars",
    "parse_formula",
    "Point",
    "PointSet",
    "PointSpace",
    "enumerate_points",
    "holds_at",
    "holds_on_all",
    "points_satisfying_all",
    "satisfying_points",
    "subst_image_points",
    "subst_preimage_points",
    "ClosedFilter",
    "DefinabilityError",
    "DefinableAlgebra",
    "DefinableSet",
    "FilterLattice",
    "build_filter_lattice",
    "closure",
    "filter_preimage",
    "generate_definable_algebra",
    "lattice_profile",
    "AdmissibilityError",
    "ContMorphism",
    "ContentObject",
    "DescMorphism",
    "DescriptionObject",
    "KnowledgeBase",
    "Report",
    "check_duality",
    "compose_cont",
    "compose_desc",
    "content_morphism",
    "content_of",
    "identity_desc",
    "is_admissible_cont",
    "is_admissible_desc",
    "least_cont_morphism",
    "least_desc_morphism",
    "push_filter",
    "verify_push_functoriality",
    "EquivReport",
    "FormulaAutomorphism",
    "FunctorIso",
    "VERDICT_INEQUIVALENT",
    "VERDICT_UNKNOWN",
    "VERDICT_WITNESSED",
    "build_description_iso",
    "check_automorphic_equivalence",
    "check_informational_equivalence",
    "check_isomorphic",
    "enumerate_automorphisms",
    "find_functor_iso",
    "transport_model_iso",
    "verify_admissibility_transfer",
]
