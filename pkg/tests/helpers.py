"""Fixture models and independent brute-force oracles shared by the tests.

The oracles here deliberately avoid the library's bitmask worklist: definable
families are grown as frozensets of assignment rows with a plain fixpoint
loop, and term functions are closed pointwise.  Agreement between the two
implementations is what the lattice and acceptance tests check.
"""

import itertools

from kbgeo import Model, Signature


def model_eq() -> Model:
    return Model(Signature((), ()), (0, 1))


def model_p() -> Model:
    return Model(Signature((), (("P", 1),)), (0, 1), None, {"P": [(1,)]})


def model_p0() -> Model:
    return Model(Signature((), (("P", 1),)), (0, 1), None, {"P": []})


def model_pq1() -> Model:
    return Model(Signature((), (("P", 1), ("Q", 1))), (0, 1), None,
                 {"P": [(1,)], "Q": []})


def model_pq2() -> Model:
    return Model(Signature((), (("P", 1), ("Q", 1))), (0, 1), None,
                 {"P": [], "Q": [(1,)]})


def model_neg() -> Model:
    return Model(Signature((("neg", 1),), (("P", 1),)), (0, 1),
                 {"neg": {(0,): 1, (1,): 0}}, {"P": [(1,)]})


def model_p_relabeled() -> Model:
    """The P model with carrier renamed 0 -> a, 1 -> b."""
    return Model(Signature((), (("P", 1),)), ("a", "b"), None, {"P": [("b",)]})


def all_fixtures() -> list:
    return [
        ("m_eq", model_eq()),
        ("m_p", model_p()),
        ("m_p0", model_p0()),
        ("m_pq1", model_pq1()),
        ("m_pq2", model_pq2()),
        ("m_neg", model_neg()),
    ]


def brute_rows(model: Model, k: int) -> list:
    """All assignment rows for k variables, one tuple per point."""
    return list(itertools.product(model.carrier, repeat=k))


def brute_term_functions(model: Model, k: int, depth: int = 2) -> set:
    """Pointwise term functions over k variables as value tuples per row."""
    rows = brute_rows(model, k)
    funcs = {tuple(row[i] for row in rows) for i in range(k)}
    for _ in range(depth):
        new = set(funcs)
        for name, arity in model.sig.ops:
            table = model.op_tables[name]
            for combo in itertools.product(sorted(funcs), repeat=arity):
                new.add(tuple(table[tuple(f[j] for f in combo)]
                              for j in range(len(rows))))
        if new == funcs:
            break
        funcs = new
    return funcs


def brute_definable_family(model: Model, k: int, depth: int = 2) -> set:
    """Every definable subset of the k-variable space, as frozensets of rows.

    Grown by a fixpoint loop over complement, union, and coordinate
    projection, starting from relation and equality atoms applied to term
    functions.
    """
    rows = brute_rows(model, k)
    all_rows = frozenset(rows)
    funcs = sorted(brute_term_functions(model, k, depth))
    family = {frozenset(), all_rows}
    for name, arity in model.sig.rels:
        table = model.rel_tables[name]
        for combo in itertools.product(funcs, repeat=arity):
            family.add(frozenset(row for j, row in enumerate(rows)
                                 if tuple(f[j] for f in combo) in table))
    if model.sig.with_equality:
        for f, g in itertools.product(funcs, repeat=2):
            family.add(frozenset(row for j, row in enumerate(rows)
                                 if f[j] == g[j]))

    def project(member, i):
        kept = set()
        for row in rows:
            for value in model.carrier:
                if row[:i] + (value,) + row[i + 1:] in member:
                    kept.add(row)
                    break
        return frozenset(kept)

    while True:
        additions = set()
        members = sorted(family, key=sorted)
        for member in members:
            additions.add(all_rows - member)
            for i in range(k):
                additions.add(project(member, i))
        for a, b in itertools.combinations(members, 2):
            additions.add(a | b)
        if additions <= family:
            return family
        family |= additions


def brute_closure(model: Model, k: int, subset, family=None) -> frozenset:
    """Least definable superset of a set of rows."""
    subset = frozenset(subset)
    if family is None:
        family = brute_definable_family(model, k)
    result = frozenset(brute_rows(model, k))
    for member in family:
        if subset <= member:
            result &= member
    return result
