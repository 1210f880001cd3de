"""Signatures, terms, substitutions, models, and term-function clones."""

import pytest

from kbgeo import (
    BoundError,
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
from helpers import model_eq, model_neg, model_p, model_p_relabeled


def test_signature_basic():
    sig = Signature((("f", 2), ("c", 0)), (("R", 1),))
    assert sig.op_arity("f") == 2
    assert sig.rel_arity("R") == 1
    assert sig.rel_names == ("R",)
    assert sig.with_equality


def test_signature_rejects_duplicates_and_reserved():
    with pytest.raises(SignatureError):
        Signature((("f", 1), ("f", 2)), ())
    with pytest.raises(SignatureError):
        Signature((("f", 1),), (("f", 1),))
    with pytest.raises(SignatureError):
        Signature((("exists", 1),), ())
    with pytest.raises(SignatureError):
        Signature((), (("R", -1),))


def test_varset_order_and_lookup():
    xs = VarSet(("u", "v", "w"))
    assert xs.index("v") == 1
    assert xs.names[2] == "w"
    assert "u" in xs and "z" not in xs
    assert list(xs) == ["u", "v", "w"]
    assert str(xs) == "{u, v, w}"
    assert VarSet.of("u", "v") == VarSet(("u", "v"))
    with pytest.raises(SignatureError):
        VarSet(("u", "u"))
    assert canonical_varset(3).names == ("x1", "x2", "x3")


def test_parse_term_round_trip():
    sig = Signature((("f", 2), ("g", 1), ("c", 0)), ())
    xs = VarSet(("x", "y"))
    for text in ("x", "c", "g(x)", "f(x,y)", "f(g(c),f(x,x))"):
        term = parse_term(text, sig, xs)
        assert term_to_text(term) == text
        assert parse_term("f( x , y )", sig, xs) == parse_term("f(x,y)", sig, xs)


def test_parse_term_errors_carry_position():
    sig = Signature((("f", 2),), ())
    xs = VarSet(("x",))
    with pytest.raises(ParseError) as info:
        parse_term("f(x x)", sig, xs)
    assert info.value.position is not None
    with pytest.raises(ParseError):
        parse_term("f(x)", sig, xs)
    with pytest.raises(ParseError):
        parse_term("y", sig, xs)
    with pytest.raises(ParseError):
        parse_term("x)", sig, xs)


def test_term_depth_and_vars():
    sig = Signature((("f", 2), ("g", 1)), ())
    xs = VarSet(("x", "y"))
    term = parse_term("f(g(x), y)", sig, xs)
    assert term_depth(term) == 2
    assert term_vars(term) == {"x", "y"}
    assert term_depth(Var("x")) == 0


def test_substitution_apply_and_compose():
    sig = Signature((("g", 1),), ())
    xs = VarSet(("x", "y"))
    s = Substitution.of(xs, xs, {"x": parse_term("g(y)", sig, xs),
                                 "y": parse_term("x", sig, xs)})
    assert term_to_text(s.apply_to_term(parse_term("g(x)", sig, xs))) == "g(g(y))"
    t = Substitution.of(xs, xs, {"x": parse_term("y", sig, xs),
                                 "y": parse_term("y", sig, xs)})
    both = compose_subst(s, t)
    assert term_to_text(both.image_of("x")) == "g(y)"
    assert term_to_text(both.image_of("y")) == "y"
    assert Substitution.identity(xs).is_identity
    assert not s.is_identity


def test_substitution_renaming_inverts():
    xs = VarSet(("x1", "x2"))
    ren = Substitution.renaming(xs, xs, {"x1": "x2", "x2": "x1"})
    assert ren.as_renaming() == {"x1": "x2", "x2": "x1"}
    assert compose_subst(ren, ren.inverted()).is_identity


def test_substitution_requires_every_source_variable():
    xs = VarSet(("x", "y"))
    with pytest.raises(MismatchError):
        Substitution.of(xs, xs, {"x": Var("x")})


def test_model_validation():
    sig = Signature((("neg", 1),), (("P", 1),))
    with pytest.raises(ModelError) as info:
        Model(sig, (0, 1), {"neg": {(0,): 1}}, {"P": []})
    assert "neg" in str(info.value)
    with pytest.raises(ModelError):
        Model(sig, (0, 1), {"neg": {(0,): 1, (1,): 2}}, {"P": []})
    with pytest.raises(ModelError):
        Model(sig, (0, 1), {"neg": {(0,): 1, (1,): 0}}, {"P": [(7,)]})
    with pytest.raises(ModelError):
        Model(Signature((), ()), (0, 1), None, {"P": []})
    with pytest.raises(ModelError):
        Model(Signature((), ()), (0, 0))


def test_model_equality_and_eval():
    m = model_neg()
    assert m == model_neg()
    assert m != model_p()
    env = {"x1": 1}
    sig, xs = m.sig, canonical_varset(1)
    assert eval_term(parse_term("neg(neg(x1))", sig, xs), env, m) == 1
    assert eval_term(parse_term("neg(x1)", sig, xs), env, m) == 0


def test_model_map_checks_structure():
    relab = model_p_relabeled()
    iso = ModelMap(model_p(), relab, ("a", "b"))
    assert iso.apply(1) == "b"
    assert iso.apply_values((0, 1)) == ("a", "b")
    assert iso.describe() == "0->a 1->b"
    with pytest.raises(ModelError):
        ModelMap(model_p(), relab, ("b", "a"))
    with pytest.raises(ModelError):
        ModelMap(model_p(), relab, ("a", "a"))


def test_model_isomorphisms_enumeration():
    found = model_isomorphisms(model_p(), model_p_relabeled())
    assert [iso.describe() for iso in found] == ["0->a 1->b"]
    both = model_isomorphisms(model_eq(), model_eq())
    assert [iso.describe() for iso in both] == ["0->0 1->1", "0->1 1->0"]
    with pytest.raises(MismatchError):
        model_isomorphisms(model_p(), model_eq())


def test_term_functions_clone():
    clone = term_functions(model_neg(), canonical_varset(1))
    values = sorted(f.values for f in clone.functions)
    assert values == [(0, 1), (1, 0)]
    assert clone.saturated
    plain = term_functions(model_eq(), canonical_varset(2))
    assert sorted(f.values for f in plain.functions) == [(0, 0, 1, 1), (0, 1, 0, 1)]


def test_term_functions_partial_when_depth_capped():
    capped = term_functions(model_neg(), canonical_varset(1), max_term_depth=0)
    assert not capped.saturated
    assert [f.values for f in capped.functions] == [(0, 1)]


def test_enumerate_terms_by_depth():
    m = model_neg()
    xs = canonical_varset(1)
    depth0 = enumerate_terms(m.sig, xs, 0)
    assert [term_to_text(t) for t in depth0] == ["x1"]
    depth2 = enumerate_terms(m.sig, xs, 2)
    assert [term_to_text(t) for t in depth2] == ["x1", "neg(x1)", "neg(neg(x1))"]


def test_enumerate_substitutions_counts():
    m = model_neg()
    one, two = canonical_varset(1), canonical_varset(2)
    assert len(enumerate_substitutions(m.sig, one, one, 2)) == 3
    assert len(enumerate_substitutions(m.sig, two, two, 2)) == 36
    assert len(enumerate_substitutions(m.sig, one, two, 2)) == 6
    for s in enumerate_substitutions(m.sig, two, one, 2):
        assert s.source.names == ("x1", "x2")
        assert s.target.names == ("x1",)


def test_point_bound_is_enforced():
    m = model_eq()
    with pytest.raises(BoundError):
        from kbgeo import enumerate_points
        enumerate_points(m, canonical_varset(3), max_points=4)
