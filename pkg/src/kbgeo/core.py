"""Finite signatures, free terms, substitutions, and finite models with tables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

DEFAULT_MAX_POINTS = 10 ** 6
EQUALITY_NAME = "≡"
RESERVED_WORDS = frozenset({"true", "false", "exists", "forall", "subst"})


class ParseError(ValueError):
    """Syntax error in term, formula, or model text."""

    def __init__(self, message: str, position: Optional[int] = None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position


class SignatureError(ValueError):
    """A name or arity is used inconsistently with the declared signature."""


class ModelError(ValueError):
    """Carrier or interpretation tables are malformed."""


class MismatchError(ValueError):
    """Two values that must share a variable set, signature, or model do not."""


class BoundError(ValueError):
    """A configured enumeration bound would be exceeded."""


def _check_name(name: str, what: str) -> None:
    if not isinstance(name, str) or not name.isidentifier():
        raise SignatureError(f"{what} name {name!r} is not an identifier")
    if name in RESERVED_WORDS:
        raise SignatureError(f"{what} name {name!r} is a reserved word")


@dataclass(frozen=True)
class Signature:
    """Operation and relation symbols with arities, plus the equality flag.

    Operation arities may be zero (constants); relation arities must be
    positive.  The name ``EQUALITY_NAME`` is reserved for built-in equality
    and may not be declared.
    """

    ops: tuple[tuple[str, int], ...] = ()
    rels: tuple[tuple[str, int], ...] = ()
    with_equality: bool = True

    def __post_init__(self):
        ops = tuple((str(n), int(a)) for n, a in self.ops)
        rels = tuple((str(n), int(a)) for n, a in self.rels)
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "rels", rels)
        seen: set[str] = set()
        for name, arity in ops:
            _check_name(name, "operation")
            if arity < 0:
                raise SignatureError(f"operation {name} has negative arity")
            if name in seen:
                raise SignatureError(f"duplicate symbol {name}")
            seen.add(name)
        for name, arity in rels:
            _check_name(name, "relation")
            if arity < 1:
                raise SignatureError(f"relation {name} must have arity >= 1")
            if name in seen:
                raise SignatureError(f"duplicate symbol {name}")
            seen.add(name)
        object.__setattr__(self, "_op_arity", dict(ops))
        object.__setattr__(self, "_rel_arity", dict(rels))

    def op_arity(self, name: str) -> Optional[int]:
        return self._op_arity.get(name)

    def rel_arity(self, name: str) -> Optional[int]:
        return self._rel_arity.get(name)

    @property
    def rel_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.rels)


@dataclass(frozen=True)
class VarSet:
    """A nonempty, ordered set of distinct variable names."""

    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise SignatureError("variable set must be nonempty")
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate variable in {names}")
        for name in names:
            _check_name(name, "variable")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @classmethod
    def of(cls, *names: str) -> "VarSet":
        return cls(tuple(names))

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise MismatchError(f"variable {name} not in {{{', '.join(self.names)}}}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def __str__(self) -> str:
        return "{" + ", ".join(self.names) + "}"


def canonical_varset(n: int) -> VarSet:
    """The standard variable set x1..xn used for size-indexed sweeps."""
    if n < 1:
        raise SignatureError("canonical variable set needs n >= 1")
    return VarSet(tuple(f"x{i}" for i in range(1, n + 1)))


class Term:
    """Base class for elements of the free term algebra."""

    __slots__ = ()

    def __str__(self) -> str:
        return term_to_text(self)


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class OpApp(Term):
    op: str
    args: tuple[Term, ...] = ()


def term_to_text(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    if not term.args:
        return term.op
    return term.op + "(" + ",".join(term_to_text(a) for a in term.args) + ")"


def term_depth(term: Term) -> int:
    """Nesting depth: variables are 0, an application adds 1."""
    if isinstance(term, Var):
        return 0
    return 1 + max((term_depth(a) for a in term.args), default=0)


def term_vars(term: Term) -> frozenset[str]:
    if isinstance(term, Var):
        return frozenset((term.name,))
    out: frozenset[str] = frozenset()
    for a in term.args:
        out |= term_vars(a)
    return out


def check_term(term: Term, sig: Signature, varset: VarSet) -> None:
    """Validate symbols, arities, and variable membership; raise on failure."""
    if isinstance(term, Var):
        if term.name not in varset:
            raise MismatchError(f"variable {term.name} not in {varset}")
        return
    if not isinstance(term, OpApp):
        raise SignatureError(f"not a term: {term!r}")
    arity = sig.op_arity(term.op)
    if arity is None:
        raise SignatureError(f"unknown operation {term.op}")
    if arity != len(term.args):
        raise SignatureError(f"operation {term.op} expects {arity} arguments, got {len(term.args)}")
    for a in term.args:
        check_term(a, sig, varset)


# --- tokenizer shared by the term and formula parsers ---

_SYMBOLS = ("->", ":=", "(", ")", ",", "=", ".", "&", "|", "!", "{", "}")


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """Split text into (kind, value, offset) tokens; kind is 'name' or the symbol itself."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append((sym, sym, i))
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", position=i)
    return tokens


class TokenStream:
    """Cursor over a token list with one-token lookahead."""

    def __init__(self, tokens: list[tuple[str, str, int]], length: int):
        self.tokens = tokens
        self.pos = 0
        self.length = length

    def peek(self) -> Optional[tuple[str, str, int]]:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", position=self.length)
        self.pos += 1
        return tok

    def expect(self, kind: str) -> tuple[str, str, int]:
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", position=tok[2])
        return tok

    def match(self, kind: str) -> bool:
        tok = self.peek()
        if tok is not None and tok[0] == kind:
            self.pos += 1
            return True
        return False

    def done(self) -> bool:
        return self.pos >= len(self.tokens)

    def require_done(self) -> None:
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"trailing input {tok[1]!r}", position=tok[2])


def parse_term_stream(ts: TokenStream, sig: Signature, varset: VarSet) -> Term:
    """Parse one term from the stream.  Variables shadow nullary operations."""
    kind, name, pos = ts.next()
    if kind != "name":
        raise ParseError(f"expected a term, found {name!r}", position=pos)
    nxt = ts.peek()
    if nxt is not None and nxt[0] == "(":
        arity = sig.op_arity(name)
        if arity is None:
            raise ParseError(f"unknown operation {name}", position=pos)
        ts.expect("(")
        args = [parse_term_stream(ts, sig, varset)]
        while ts.match(","):
            args.append(parse_term_stream(ts, sig, varset))
        ts.expect(")")
        if len(args) != arity:
            raise ParseError(f"operation {name} expects {arity} arguments, got {len(args)}", position=pos)
        return OpApp(name, tuple(args))
    if name in varset:
        return Var(name)
    arity = sig.op_arity(name)
    if arity == 0:
        return OpApp(name, ())
    if arity is not None:
        raise ParseError(f"operation {name} expects {arity} arguments, got 0", position=pos)
    raise ParseError(f"unknown term symbol {name}", position=pos)


def parse_term(text: str, sig: Signature, varset: VarSet) -> Term:
    """Parse a full term; the entire text must be consumed."""
    ts = TokenStream(tokenize(text), len(text))
    term = parse_term_stream(ts, sig, varset)
    ts.require_done()
    return term


@dataclass(frozen=True)
class Substitution:
    """A map from source variables to terms over the target variable set.

    Images are stored in source order, so two substitutions are equal exactly
    when they agree on every source variable.
    """

    source: VarSet
    target: VarSet
    images: tuple[Term, ...]

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if len(images) != len(self.source):
            raise MismatchError(
                f"substitution needs {len(self.source)} images, got {len(images)}")
        for term in images:
            extra = term_vars(term) - set(self.target.names)
            if extra:
                raise MismatchError(
                    f"image {term} uses variables {sorted(extra)} outside {self.target}")

    @classmethod
    def of(cls, source: VarSet, target: VarSet, mapping: Mapping[str, Term]) -> "Substitution":
        try:
            images = tuple(mapping[name] for name in source.names)
        except KeyError as exc:
            raise MismatchError(f"no image for variable {exc.args[0]}") from None
        return cls(source, target, images)

    @classmethod
    def identity(cls, varset: VarSet) -> "Substitution":
        return cls(varset, varset, tuple(Var(n) for n in varset.names))

    @classmethod
    def renaming(cls, source: VarSet, target: VarSet, mapping: Mapping[str, str]) -> "Substitution":
        return cls(source, target, tuple(Var(mapping[n]) for n in source.names))

    def image_of(self, name: str) -> Term:
        return self.images[self.source.index(name)]

    def apply_to_term(self, term: Term) -> Term:
        if isinstance(term, Var):
            return self.image_of(term.name)
        return OpApp(term.op, tuple(self.apply_to_term(a) for a in term.args))

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and all(
            isinstance(t, Var) and t.name == n for n, t in zip(self.source.names, self.images))

    def as_renaming(self) -> Optional[dict[str, str]]:
        """The variable bijection this substitution performs, or None."""
        mapping: dict[str, str] = {}
        for name, term in zip(self.source.names, self.images):
            if not isinstance(term, Var):
                return None
            mapping[name] = term.name
        if len(set(mapping.values())) != len(self.target):
            return None
        return mapping

    def inverted(self) -> "Substitution":
        """Inverse of a renaming; raises MismatchError otherwise."""
        mapping = self.as_renaming()
        if mapping is None:
            raise MismatchError(f"substitution {self} is not an invertible renaming")
        inverse = {v: k for k, v in mapping.items()}
        return Substitution.renaming(self.target, self.source, inverse)

    def __str__(self) -> str:
        inner = ", ".join(f"{n} := {t}" for n, t in zip(self.source.names, self.images))
        return "{" + inner + "}"


def compose_subst(first: Substitution, second: Substitution) -> Substitution:
    """The substitution doing `first` then `second`; first: X->Y, second: Y->Z."""
    if first.target != second.source:
        raise MismatchError(
            f"cannot compose: first targets {first.target}, second starts at {second.source}")
    images = tuple(second.apply_to_term(t) for t in first.images)
    return Substitution(first.source, second.target, images)


class Model:
    """A finite model: carrier, total operation tables, and relation tables.

    Carrier elements are opaque hashable labels ordered by their position in
    the carrier tuple.  Operation tables must be total and closed; relation
    tables default to empty.
    """

    def __init__(self, sig: Signature, carrier, op_tables=None, rel_tables=None):
        self.sig = sig
        self.carrier = tuple(carrier)
        if not self.carrier:
            raise ModelError("carrier must be nonempty")
        if len(set(self.carrier)) != len(self.carrier):
            raise ModelError("carrier elements must be distinct")
        self._index = {e: i for i, e in enumerate(self.carrier)}
        elems = set(self.carrier)

        op_tables = dict(op_tables or {})
        self.op_tables: dict[str, dict[tuple, object]] = {}
        for name, arity in sig.ops:
            raw = op_tables.pop(name, None)
            if raw is None:
                raise ModelError(f"op {name} has no table")
            table = {tuple(k): v for k, v in raw.items()}
            for key, value in table.items():
                if len(key) != arity:
                    raise ModelError(f"op {name} row {key} has wrong arity")
                if any(e not in elems for e in key) or value not in elems:
                    raise ModelError(f"op {name} row {key} -> {value} leaves the carrier")
            if len(table) != len(self.carrier) ** arity:
                raise ModelError(f"op {name} not total")
            self.op_tables[name] = table
        if op_tables:
            raise ModelError(f"table for undeclared op {sorted(op_tables)[0]}")

        rel_tables = dict(rel_tables or {})
        self.rel_tables: dict[str, frozenset] = {}
        for name, arity in sig.rels:
            raw = rel_tables.pop(name, ())
            rows = frozenset(tuple(r) for r in raw)
            for row in rows:
                if len(row) != arity:
                    raise ModelError(f"rel {name} row {row} has wrong arity")
                if any(e not in elems for e in row):
                    raise ModelError(f"rel {name} row {row} leaves the carrier")
            self.rel_tables[name] = rows
        if rel_tables:
            raise ModelError(f"table for undeclared rel {sorted(rel_tables)[0]}")

    def element_index(self, element) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise ModelError(f"element {element!r} not in carrier") from None

    def op_table(self, name: str) -> dict:
        return self.op_tables[name]

    def rel_table(self, name: str) -> frozenset:
        return self.rel_tables[name]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Model):
            return NotImplemented
        return (self.sig == other.sig and self.carrier == other.carrier
                and self.op_tables == other.op_tables and self.rel_tables == other.rel_tables)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Model(carrier={self.carrier!r}, ops={[n for n, _ in self.sig.ops]}, rels={[n for n, _ in self.sig.rels]})"


def eval_term(term: Term, env: Mapping[str, object], model: Model):
    """Value of a term under a variable assignment."""
    if isinstance(term, Var):
        return env[term.name]
    table = model.op_tables[term.op]
    return table[tuple(eval_term(a, env, model) for a in term.args)]


def _preserves_structure(source: Model, target: Model, images: tuple) -> bool:
    lookup = dict(zip(source.carrier, images))
    for name, _ in source.sig.ops:
        table = source.op_tables[name]
        target_table = target.op_tables[name]
        for key, value in table.items():
            if target_table[tuple(lookup[e] for e in key)] != lookup[value]:
                return False
    for name, _ in source.sig.rels:
        rows = source.rel_tables[name]
        target_rows = target.rel_tables[name]
        mapped = frozenset(tuple(lookup[e] for e in row) for row in rows)
        if mapped != target_rows:
            return False
    return True


class ModelMap:
    """A carrier bijection between models that preserves every table both ways."""

    def __init__(self, source: Model, target: Model, images):
        if source.sig != target.sig:
            raise MismatchError("models have different signatures")
        images = tuple(images)
        if len(images) != len(source.carrier) or set(images) != set(target.carrier):
            raise ModelError("images do not form a bijection onto the target carrier")
        if not _preserves_structure(source, target, images):
            raise ModelError("map does not preserve the interpretation tables")
        self.source = source
        self.target = target
        self.images = images
        self._map = dict(zip(source.carrier, images))

    def apply(self, element):
        return self._map[element]

    def apply_values(self, values: tuple) -> tuple:
        return tuple(self._map[v] for v in values)

    def describe(self) -> str:
        return " ".join(f"{a}->{b}" for a, b in zip(self.source.carrier, self.images))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.images == other.images)

    __hash__ = None

    def __repr__(self) -> str:
        return f"ModelMap({self.describe()})"


def model_isomorphisms(source: Model, target: Model) -> list[ModelMap]:
    """All isomorphisms source -> target, in lexicographic carrier order."""
    if source.sig != target.sig:
        raise MismatchError("models have different signatures")
    if len(source.carrier) != len(target.carrier):
        return []
    found = []
    for images in itertools.permutations(target.carrier):
        if _preserves_structure(source, target, images):
            found.append(ModelMap(source, target, images))
    return found


@dataclass(frozen=True)
class TermFunction:
    """A pointwise function table over the assignment space, with a witness term."""

    values: tuple
    witness: Term

    def __str__(self) -> str:
        return f"{self.witness}: {self.values}"


@dataclass(frozen=True)
class TermFunctionSet:
    """Term-definable functions found by closure rounds; saturated means complete."""

    functions: tuple[TermFunction, ...]
    saturated: bool


def term_functions(model: Model, varset: VarSet, max_term_depth: Optional[int] = None,
                   max_points: int = DEFAULT_MAX_POINTS) -> TermFunctionSet:
    """Close the projections under the model's operations.

    Functions are found in rounds; the round number equals the depth of the
    witness term, and the first witness for a table wins.  With a finite
    ``max_term_depth`` the closure stops after that many rounds and reports
    saturation by probing one further round.
    """
    npoints = len(model.carrier) ** len(varset)
    if npoints > max_points:
        raise BoundError(f"{npoints} assignments exceed the bound {max_points}")
    points = list(itertools.product(model.carrier, repeat=len(varset)))

    funcs: list[TermFunction] = []
    depths: list[int] = []
    seen: dict[tuple, int] = {}
    for i, name in enumerate(varset.names):
        values = tuple(p[i] for p in points)
        if values not in seen:
            seen[values] = len(funcs)
            funcs.append(TermFunction(values, Var(name)))
            depths.append(0)

    def round_candidates(target_depth: int):
        base = len(funcs)
        for op, arity in model.sig.ops:
            table = model.op_tables[op]
            for combo in itertools.product(range(base), repeat=arity):
                if max((depths[k] for k in combo), default=0) != target_depth - 1:
                    continue
                values = tuple(table[tuple(funcs[k].values[p] for k in combo)]
                               for p in range(npoints))
                witness = OpApp(op, tuple(funcs[k].witness for k in combo))
                yield values, witness

    saturated = True
    depth = 0
    while True:
        depth += 1
        if max_term_depth is not None and depth > max_term_depth:
            saturated = all(values in seen for values, _ in round_candidates(depth))
            break
        added = False
        for values, witness in round_candidates(depth):
            if values not in seen:
                seen[values] = len(funcs)
                funcs.append(TermFunction(values, witness))
                depths.append(depth)
                added = True
        if not added:
            break
    return TermFunctionSet(tuple(funcs), saturated)


def enumerate_terms(sig: Signature, varset: VarSet, max_depth: int) -> list[Term]:
    """All terms of depth <= max_depth, ordered by depth then construction order."""
    layers: list[list[Term]] = [[Var(n) for n in varset.names]]
    flat: list[Term] = list(layers[0])
    for depth in range(1, max_depth + 1):
        layer: list[Term] = []
        for op, arity in sig.ops:
            for combo in itertools.product(flat, repeat=arity):
                if max((term_depth(t) for t in combo), default=0) != depth - 1:
                    continue
                layer.append(OpApp(op, combo))
        layers.append(layer)
        flat.extend(layer)
    return flat


def enumerate_substitutions(sig: Signature, source: VarSet, target: VarSet,
                            max_depth: int) -> list[Substitution]:
    """All substitutions whose images have depth <= max_depth, lexicographic in term order."""
    terms = enumerate_terms(sig, target, max_depth)
    subs = []
    for images in itertools.product(terms, repeat=len(source)):
        subs.append(Substitution(source, target, images))
    return subs
