"""Formula ASTs over a signature: parser, printer, free variables, substitution action.

Formulas are syntax; no identification up to logical equivalence happens here.
Quantifiers bind variables of the ambient variable set (cylindric style), so
`exists x. f` is only well formed when x already belongs to the context.
A substitution node keeps an explicit substitution in front of a formula over
the substitution's source variables; semantically it is a preimage operator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .core import (
    MismatchError,
    ParseError,
    Signature,
    SignatureError,
    Substitution,
    Term,
    TokenStream,
    Var,
    VarSet,
    check_term,
    compose_subst,
    parse_term_stream,
    term_to_text,
    term_vars,
    tokenize,
)


class Formula:
    """Base class for formula nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return formula_to_text(self)


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    rel: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Equal(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class SubstNode(Formula):
    subst: Substitution
    body: Formula


TRUE = TrueF()
FALSE = FalseF()


@dataclass(frozen=True)
class FormulaContext:
    """The signature and ambient variable set a formula lives over."""

    sig: Signature
    varset: VarSet


# Printer precedence: higher binds tighter.  Binders get the lowest level so
# their bodies extend maximally to the right without parentheses.
_PREC_BINDER = 10
_PREC_IMPLIES = 30
_PREC_OR = 50
_PREC_AND = 70
_PREC_NOT = 90
_PREC_ATOM = 100


def _prec(f: Formula) -> int:
    if isinstance(f, (TrueF, FalseF, Atom, Equal)):
        return _PREC_ATOM
    if isinstance(f, Not):
        return _PREC_NOT
    if isinstance(f, And):
        return _PREC_AND
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, Implies):
        return _PREC_IMPLIES
    return _PREC_BINDER


def formula_to_text(f: Formula) -> str:
    return _render(f, 0)


def _render(f: Formula, min_prec: int) -> str:
    prec = _prec(f)
    if isinstance(f, TrueF):
        text = "true"
    elif isinstance(f, FalseF):
        text = "false"
    elif isinstance(f, Atom):
        text = f.rel + "(" + ",".join(term_to_text(t) for t in f.args) + ")"
    elif isinstance(f, Equal):
        text = f"{term_to_text(f.left)} = {term_to_text(f.right)}"
    elif isinstance(f, Not):
        text = "!" + _render(f.body, _PREC_NOT)
    elif isinstance(f, And):
        text = _render(f.left, _PREC_AND) + " & " + _render(f.right, _PREC_AND + 1)
    elif isinstance(f, Or):
        text = _render(f.left, _PREC_OR) + " | " + _render(f.right, _PREC_OR + 1)
    elif isinstance(f, Implies):
        text = _render(f.left, _PREC_IMPLIES + 1) + " -> " + _render(f.right, _PREC_IMPLIES)
    elif isinstance(f, Exists):
        text = f"exists {f.var}. " + _render(f.body, 0)
    elif isinstance(f, Forall):
        text = f"forall {f.var}. " + _render(f.body, 0)
    elif isinstance(f, SubstNode):
        inner = ", ".join(f"{n} := {term_to_text(t)}"
                          for n, t in zip(f.subst.source.names, f.subst.images))
        text = "subst {" + inner + "} " + _render(f.body, 0)
    else:
        raise SignatureError(f"not a formula: {f!r}")
    if prec < min_prec:
        return "(" + text + ")"
    return text


def parse_formula(text: str, ctx: FormulaContext) -> Formula:
    """Parse a formula; ! binds tighter than &, & than |, | than ->, and -> is
    right associative.  Binders (quantifiers and subst blocks) scope maximally
    to the right."""
    ts = TokenStream(tokenize(text), len(text))
    f = _parse_implies(ts, ctx)
    ts.require_done()
    return f


def _parse_implies(ts: TokenStream, ctx: FormulaContext) -> Formula:
    left = _parse_or(ts, ctx)
    if ts.match("->"):
        return Implies(left, _parse_implies(ts, ctx))
    return left


def _parse_or(ts: TokenStream, ctx: FormulaContext) -> Formula:
    f = _parse_and(ts, ctx)
    while ts.match("|"):
        f = Or(f, _parse_and(ts, ctx))
    return f


def _parse_and(ts: TokenStream, ctx: FormulaContext) -> Formula:
    f = _parse_unary(ts, ctx)
    while ts.match("&"):
        f = And(f, _parse_unary(ts, ctx))
    return f


def _parse_unary(ts: TokenStream, ctx: FormulaContext) -> Formula:
    tok = ts.peek()
    if tok is None:
        raise ParseError("unexpected end of input")
    kind, value, pos = tok
    if kind == "!":
        ts.next()
        return Not(_parse_unary(ts, ctx))
    if kind == "name" and value in ("exists", "forall"):
        ts.next()
        var_tok = ts.expect("name")
        if var_tok[1] not in ctx.varset:
            raise ParseError(f"quantified variable {var_tok[1]} not in {ctx.varset}",
                             position=var_tok[2])
        ts.expect(".")
        body = _parse_implies(ts, ctx)
        node = Exists if value == "exists" else Forall
        return node(var_tok[1], body)
    if kind == "name" and value == "subst":
        ts.next()
        ts.expect("{")
        names: list[str] = []
        images: list[Term] = []
        while True:
            name_tok = ts.expect("name")
            ts.expect(":=")
            names.append(name_tok[1])
            images.append(parse_term_stream(ts, ctx.sig, ctx.varset))
            if not ts.match(","):
                break
        ts.expect("}")
        try:
            source = VarSet(tuple(names))
        except SignatureError as exc:
            raise ParseError(f"bad substitution block: {exc}", position=pos) from None
        subst = Substitution(source, ctx.varset, tuple(images))
        body = _parse_implies(ts, FormulaContext(ctx.sig, source))
        return SubstNode(subst, body)
    return _parse_primary(ts, ctx)


def _parse_primary(ts: TokenStream, ctx: FormulaContext) -> Formula:
    tok = ts.peek()
    if tok is None:
        raise ParseError("unexpected end of input")
    kind, value, pos = tok
    if kind == "(":
        ts.next()
        f = _parse_implies(ts, ctx)
        ts.expect(")")
        return f
    if kind == "name" and value == "true":
        ts.next()
        return TRUE
    if kind == "name" and value == "false":
        ts.next()
        return FALSE
    if kind == "name" and ctx.sig.rel_arity(value) is not None:
        ts.next()
        arity = ctx.sig.rel_arity(value)
        ts.expect("(")
        args = [parse_term_stream(ts, ctx.sig, ctx.varset)]
        while ts.match(","):
            args.append(parse_term_stream(ts, ctx.sig, ctx.varset))
        ts.expect(")")
        if len(args) != arity:
            raise ParseError(f"relation {value} expects {arity} arguments, got {len(args)}",
                             position=pos)
        return Atom(value, tuple(args))
    # anything else must start an equality between terms
    left = parse_term_stream(ts, ctx.sig, ctx.varset)
    eq = ts.peek()
    if eq is None or eq[0] != "=":
        raise ParseError("expected '=' after a bare term",
                         position=eq[2] if eq else ts.length)
    if not ctx.sig.with_equality:
        raise ParseError("equality is not enabled in this signature", position=eq[2])
    ts.next()
    right = parse_term_stream(ts, ctx.sig, ctx.varset)
    return Equal(left, right)


def free_vars(f: Formula) -> frozenset[str]:
    """Free variable names.  For a substitution node these are the variables
    used by the images of the body's free variables."""
    if isinstance(f, (TrueF, FalseF)):
        return frozenset()
    if isinstance(f, Atom):
        out: frozenset[str] = frozenset()
        for t in f.args:
            out |= term_vars(t)
        return out
    if isinstance(f, Equal):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or, Implies)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, SubstNode):
        out = frozenset()
        for name in free_vars(f.body):
            out |= term_vars(f.subst.image_of(name))
        return out
    raise SignatureError(f"not a formula: {f!r}")


def check_formula(f: Formula, ctx: FormulaContext) -> None:
    """Validate relation symbols, arities, terms, and binder scoping."""
    if isinstance(f, (TrueF, FalseF)):
        return
    if isinstance(f, Atom):
        arity = ctx.sig.rel_arity(f.rel)
        if arity is None:
            raise SignatureError(f"unknown relation {f.rel}")
        if arity != len(f.args):
            raise SignatureError(f"relation {f.rel} expects {arity} arguments, got {len(f.args)}")
        for t in f.args:
            check_term(t, ctx.sig, ctx.varset)
        return
    if isinstance(f, Equal):
        if not ctx.sig.with_equality:
            raise SignatureError("equality is not enabled in this signature")
        check_term(f.left, ctx.sig, ctx.varset)
        check_term(f.right, ctx.sig, ctx.varset)
        return
    if isinstance(f, Not):
        check_formula(f.body, ctx)
        return
    if isinstance(f, (And, Or, Implies)):
        check_formula(f.left, ctx)
        check_formula(f.right, ctx)
        return
    if isinstance(f, (Exists, Forall)):
        if f.var not in ctx.varset:
            raise MismatchError(f"quantified variable {f.var} not in {ctx.varset}")
        check_formula(f.body, ctx)
        return
    if isinstance(f, SubstNode):
        if f.subst.target != ctx.varset:
            raise MismatchError(
                f"substitution targets {f.subst.target}, context is over {ctx.varset}")
        for t in f.subst.images:
            check_term(t, ctx.sig, ctx.varset)
        check_formula(f.body, FormulaContext(ctx.sig, f.subst.source))
        return
    raise SignatureError(f"not a formula: {f!r}")


def _mentions_quantifier(f: Formula) -> bool:
    # substitution nodes are treated as atomic: their bodies live over another
    # variable set and compose through the substitution instead
    if isinstance(f, (Exists, Forall)):
        return True
    if isinstance(f, Not):
        return _mentions_quantifier(f.body)
    if isinstance(f, (And, Or, Implies)):
        return _mentions_quantifier(f.left) or _mentions_quantifier(f.right)
    return False


def apply_subst_formula(subst: Substitution, f: Formula) -> Formula:
    """The action of a substitution on a formula.

    Quantifier-free formulas are rewritten structurally, with nested
    substitution nodes composed; a formula mentioning a quantifier is wrapped
    wholesale in a substitution node, which has the same preimage semantics.
    The identity substitution returns the formula unchanged.
    """
    missing = free_vars(f) - set(subst.source.names)
    if missing:
        raise MismatchError(f"formula uses variables {sorted(missing)} outside {subst.source}")
    if subst.is_identity:
        return f
    if _mentions_quantifier(f):
        return SubstNode(subst, f)
    return _push_subst(subst, f)


def _push_subst(subst: Substitution, f: Formula) -> Formula:
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(subst.apply_to_term(t) for t in f.args))
    if isinstance(f, Equal):
        return Equal(subst.apply_to_term(f.left), subst.apply_to_term(f.right))
    if isinstance(f, Not):
        return Not(_push_subst(subst, f.body))
    if isinstance(f, And):
        return And(_push_subst(subst, f.left), _push_subst(subst, f.right))
    if isinstance(f, Or):
        return Or(_push_subst(subst, f.left), _push_subst(subst, f.right))
    if isinstance(f, Implies):
        return Implies(_push_subst(subst, f.left), _push_subst(subst, f.right))
    if isinstance(f, SubstNode):
        return SubstNode(compose_subst(f.subst, subst), f.body)
    raise SignatureError(f"not a formula: {f!r}")


def enumerate_formulas(ctx: FormulaContext, max_depth: int,
                       max_term_depth: int = 1) -> Iterator[Formula]:
    """Yield formulas by connective depth: first the atomic layer, then each
    depth adds negations, binary connectives, and quantifiers.  The stream is
    deterministic; consumers bound it by slicing."""
    terms = _bounded_terms(ctx, max_term_depth)
    layer: list[Formula] = [TRUE, FALSE]
    for rel, arity in ctx.sig.rels:
        for combo in itertools.product(terms, repeat=arity):
            layer.append(Atom(rel, combo))
    if ctx.sig.with_equality:
        for left in terms:
            for right in terms:
                layer.append(Equal(left, right))
    yield from layer
    everything = list(layer)
    for _ in range(max_depth):
        new_layer: list[Formula] = []
        for f in layer:
            new_layer.append(Not(f))
            for var in ctx.varset.names:
                new_layer.append(Exists(var, f))
                new_layer.append(Forall(var, f))
        for f in layer:
            for g in everything:
                new_layer.append(And(f, g))
                new_layer.append(Or(f, g))
                new_layer.append(Implies(f, g))
        yield from new_layer
        everything.extend(new_layer)
        layer = new_layer


def _bounded_terms(ctx: FormulaContext, max_term_depth: int) -> list[Term]:
    from .core import enumerate_terms

    return enumerate_terms(ctx.sig, ctx.varset, max_term_depth)
