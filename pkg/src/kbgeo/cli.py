"""Command line surface: model files, queries, and equivalence reports.

Model files are line oriented with '#' comments:

    carrier: 0 1
    flag with_equality on
    op neg 1
    rel P 1
    op neg: 0 -> 1
    op neg: 1 -> 0
    rel P: 1

Subcommands: eval, closure, lattice, duality, functor, equiv.  Exit codes:
0 pass/witnessed, 1 failure/inequivalent, 2 unknown, 64 usage error, 65
bad input data.  The KBGEO_MAX_POINTS environment variable overrides the
point-space bound.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from dataclasses import dataclass, replace
from typing import Optional

from .core import (
    DEFAULT_MAX_POINTS,
    BoundError,
    MismatchError,
    Model,
    ModelError,
    ParseError,
    Signature,
    SignatureError,
    VarSet,
)
from .formulas import FormulaContext, formula_to_text, parse_formula
from .lattice import (
    DefinabilityError,
    build_filter_lattice,
    closure,
    generate_definable_algebra,
    lattice_profile,
)
from .semantics import PointSet, enumerate_points, satisfying_points
from .categories import Report, check_duality, verify_push_functoriality
from .equivalence import (
    EquivReport,
    FormulaAutomorphism,
    check_automorphic_equivalence,
    check_informational_equivalence,
    check_isomorphic,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_DATA = 65


class UsageError(Exception):
    """Bad command line; exits with code 64."""


class DataError(Exception):
    """Unreadable or invalid input data; exits with code 65."""


@dataclass(frozen=True)
class RunConfig:
    """Defaults shared by all subcommands; flags override per run."""

    n_max: int = 2
    depth: int = 2
    max_term_depth: Optional[int] = None
    max_points: int = DEFAULT_MAX_POINTS
    fmt: str = "text"

    @classmethod
    def from_env(cls, environ=None) -> "RunConfig":
        environ = os.environ if environ is None else environ
        raw = environ.get("KBGEO_MAX_POINTS")
        if raw is None:
            return cls()
        try:
            bound = int(raw)
            if bound < 1:
                raise ValueError
        except ValueError:
            raise DataError(f"KBGEO_MAX_POINTS must be a positive integer, got {raw!r}") from None
        return cls(max_points=bound)


# --- model files ---


def load_model_text(text: str, origin: str = "<model>") -> Model:
    """Parse and validate the line-oriented model format."""
    carrier: Optional[tuple[str, ...]] = None
    with_equality = True
    ops: list[tuple[str, int]] = []
    rels: list[tuple[str, int]] = []
    op_rows: dict[str, dict[tuple, str]] = {}
    rel_rows: dict[str, list[tuple]] = {}

    def fail(lineno: int, message: str):
        raise DataError(f"{origin}:{lineno}: {message}")

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("carrier:"):
            if carrier is not None:
                fail(lineno, "carrier declared twice")
            elems = tuple(line[len("carrier:"):].split())
            if not elems:
                fail(lineno, "carrier must list at least one element")
            carrier = elems
            continue
        if line.startswith("flag "):
            parts = line.split()
            if len(parts) != 3 or parts[1] != "with_equality" or parts[2] not in ("on", "off"):
                fail(lineno, f"unrecognized flag line {line!r}")
            with_equality = parts[2] == "on"
            continue
        if line.startswith(("op ", "rel ")):
            head, sep, rest = line.partition(":")
            kind_name = head.split()
            if not sep:
                if len(kind_name) != 3:
                    fail(lineno, f"expected '{kind_name[0]} NAME ARITY', got {line!r}")
                kind, name, arity_text = kind_name
                try:
                    arity = int(arity_text)
                except ValueError:
                    fail(lineno, f"arity {arity_text!r} is not an integer")
                if any(name == n for n, _ in ops) or any(name == n for n, _ in rels):
                    fail(lineno, f"symbol {name} declared twice")
                (ops if kind == "op" else rels).append((name, arity))
                continue
            if len(kind_name) != 2:
                fail(lineno, f"expected '{kind_name[0]} NAME: row', got {line!r}")
            kind, name = kind_name
            if kind == "op":
                left, arrow, right = rest.partition("->")
                if not arrow or not right.strip():
                    fail(lineno, "operation row needs 'args -> value'")
                args = tuple(t.strip() for t in left.split(",") if t.strip())
                row = op_rows.setdefault(name, {})
                if args in row:
                    fail(lineno, f"op {name} row {args} given twice")
                row[args] = right.strip()
            else:
                args = tuple(t.strip() for t in rest.split(",") if t.strip())
                if not args:
                    fail(lineno, "relation row needs at least one element")
                rel_rows.setdefault(name, []).append(args)
            continue
        fail(lineno, f"unrecognized line {line!r}")

    if carrier is None:
        raise DataError(f"{origin}: no carrier declared")
    try:
        sig = Signature(tuple(ops), tuple(rels), with_equality)
        return Model(sig, carrier, op_rows, rel_rows)
    except (SignatureError, ModelError) as exc:
        raise DataError(f"{origin}: {exc}") from None


def load_model(path: str) -> Model:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None
    return load_model_text(text, origin=path)


def print_model(model: Model) -> str:
    """Canonical text form; the output loads back to an equal model."""
    lines = ["carrier: " + " ".join(str(e) for e in model.carrier)]
    lines.append(f"flag with_equality {'on' if model.sig.with_equality else 'off'}")
    for name, arity in model.sig.ops:
        lines.append(f"op {name} {arity}")
    for name, arity in model.sig.rels:
        lines.append(f"rel {name} {arity}")
    for name, arity in model.sig.ops:
        table = model.op_tables[name]
        for key in itertools.product(model.carrier, repeat=arity):
            lines.append(f"op {name}: {','.join(str(e) for e in key)} -> {table[key]}")
    index = model.element_index
    for name, _ in model.sig.rels:
        for row in sorted(model.rel_tables[name], key=lambda r: tuple(index(e) for e in r)):
            lines.append(f"rel {name}: {','.join(str(e) for e in row)}")
    return "\n".join(lines) + "\n"


# --- small argument parsers ---


def parse_var_list(spec: str) -> VarSet:
    names = tuple(v.strip() for v in spec.split(",") if v.strip())
    if not names:
        raise UsageError("--vars needs a comma-separated list of variable names")
    try:
        return VarSet(names)
    except SignatureError as exc:
        raise UsageError(str(exc)) from None


def parse_point_rows(spec: str) -> list[tuple[str, ...]]:
    rows = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        rows.append(tuple(v.strip() for v in chunk.split(",")))
    return rows


def parse_phi_spec(spec: str, sig: Signature, n_max: int) -> FormulaAutomorphism:
    """One automorphism: 'identity', 'swaprel P Q [R S ...]', or
    'renamevars x1:x2,...' applied at every size the named variables fit."""
    tokens = spec.split()
    if tokens == ["identity"]:
        return FormulaAutomorphism.identity(sig)
    if tokens and tokens[0] == "swaprel":
        names = tokens[1:]
        if not names or len(names) % 2:
            raise UsageError("swaprel needs pairs of relation names")
        if len(set(names)) != len(names):
            raise UsageError("swaprel names must be distinct")
        mapping = {}
        for a, b in zip(names[::2], names[1::2]):
            mapping[a] = b
            mapping[b] = a
        try:
            return FormulaAutomorphism.relation_permutation(sig, mapping)
        except SignatureError as exc:
            raise UsageError(str(exc)) from None
    if tokens and tokens[0] == "renamevars":
        body = "".join(tokens[1:])
        mapping = {}
        for entry in body.split(","):
            entry = entry.strip()
            if not entry:
                continue
            name, sep, image = entry.partition(":")
            if not sep or not name or not image:
                raise UsageError(f"renamevars entry {entry!r} is not 'var:var'")
            mapping[name] = image
        if not mapping or sorted(mapping) != sorted(mapping.values()):
            raise UsageError("renamevars must describe a variable permutation")
        renamings = {}
        for n in range(1, n_max + 1):
            names = set(f"x{i}" for i in range(1, n + 1))
            if set(mapping) <= names:
                renamings[n] = tuple(mapping.get(f"x{i}", f"x{i}")
                                     for i in range(1, n + 1))
        if not renamings:
            raise UsageError(f"renamed variables do not fit within x1..x{n_max}")
        try:
            return FormulaAutomorphism.variable_renaming(sig, renamings)
        except SignatureError as exc:
            raise UsageError(str(exc)) from None
    raise UsageError(f"unrecognized phi spec {spec!r}")


# --- report rendering ---


def write_report(report, fmt: str) -> str:
    """Render a verification report or an equivalence report.  The machine
    format is flat 'key: value' lines with stable names."""
    if isinstance(report, Report):
        if fmt == "text":
            return report.render()
        lines = [f"report: {report.title}"]
        for key, value in report.entries:
            lines.append(f"{key}: {value}")
        lines.append(f"checked: {report.checked}")
        lines.append(f"failures: {len(report.failures)}")
        for i, failure in enumerate(report.failures, 1):
            lines.append(f"failure.{i}: {failure}")
        return "\n".join(lines)
    if isinstance(report, EquivReport):
        if fmt == "text":
            lines = [f"verdict: {report.verdict}", f"mode: {report.mode}"]
            if report.bounds:
                lines.append("bounds: " + " ".join(f"{k}={v}" for k, v in report.bounds))
            if report.witness is not None:
                lines.append("witness:")
                for key, value in report.witness:
                    lines.append(f"  {key}: {value}")
            if report.refutation is not None:
                lines.append("refutation:")
                for key, value in report.refutation:
                    lines.append(f"  {key}: {value}")
            for note in report.notes:
                lines.append(f"note: {note}")
            return "\n".join(lines)
        lines = [f"verdict: {report.verdict}", f"mode: {report.mode}"]
        for key, value in report.bounds:
            lines.append(f"bounds.{key}: {value}")
        if report.witness is not None:
            for key, value in report.witness:
                lines.append(f"witness.{key}: {value}")
        if report.refutation is not None:
            for key, value in report.refutation:
                lines.append(f"refutation.{key}: {value}")
        for i, note in enumerate(report.notes, 1):
            lines.append(f"note.{i}: {note}")
        return "\n".join(lines)
    raise TypeError(f"not a report: {report!r}")


# --- subcommands ---


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="kbgeo",
                     description="definable point geometry and knowledge-base "
                                 "equivalence over finite models")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("text", "machine"), default=None,
                       help="output format (default text)")
        p.add_argument("--max-points", type=int, default=None,
                       help="point-space enumeration bound")
        p.add_argument("--max-term-depth", type=int, default=None,
                       help="cap term closure depth (marks results partial)")

    p = sub.add_parser("eval", help="points satisfying a formula")
    p.add_argument("model")
    p.add_argument("--vars", required=True, help="comma-separated variable names")
    p.add_argument("--formula", required=True)
    add_common(p)

    p = sub.add_parser("closure", help="least definable superset of a point set")
    p.add_argument("model")
    p.add_argument("--vars", required=True)
    p.add_argument("--points", required=True,
                   help="semicolon-separated rows of comma-separated values; empty for {}")
    add_common(p)

    p = sub.add_parser("lattice", help="profile of the filter lattice")
    p.add_argument("model")
    p.add_argument("--vars", required=True)
    p.add_argument("--dump", action="store_true", help="list every definable set")
    add_common(p)

    p = sub.add_parser("duality", help="verify the description/content duality")
    p.add_argument("model")
    p.add_argument("--max-vars", type=int, default=None)
    p.add_argument("--depth", type=int, default=1)
    add_common(p)

    p = sub.add_parser("functor", help="verify pushforward identity and composition laws")
    p.add_argument("model")
    p.add_argument("--max-vars", type=int, default=None)
    p.add_argument("--depth", type=int, default=None)
    add_common(p)

    p = sub.add_parser("equiv", help="decide a knowledge-base equivalence")
    p.add_argument("model1")
    p.add_argument("model2")
    p.add_argument("--mode", choices=("iso", "lae", "info"), default="info")
    p.add_argument("--phi", default=None,
                   help="pin one automorphism: identity | swaprel P Q ... | renamevars x1:x2,...")
    p.add_argument("--max-vars", type=int, default=None)
    p.add_argument("--depth", type=int, default=None)
    add_common(p)

    return parser


def _apply_config(args, config: RunConfig) -> RunConfig:
    updates = {}
    if getattr(args, "max_points", None) is not None:
        if args.max_points < 1:
            raise UsageError("--max-points must be positive")
        updates["max_points"] = args.max_points
    if getattr(args, "max_term_depth", None) is not None:
        if args.max_term_depth < 0:
            raise UsageError("--max-term-depth must be nonnegative")
        updates["max_term_depth"] = args.max_term_depth
    if getattr(args, "format", None) is not None:
        updates["fmt"] = args.format
    if getattr(args, "max_vars", None) is not None:
        if args.max_vars < 1:
            raise UsageError("--max-vars must be positive")
        updates["n_max"] = args.max_vars
    if getattr(args, "depth", None) is not None:
        if args.depth < 0:
            raise UsageError("--depth must be nonnegative")
        updates["depth"] = args.depth
    return replace(config, **updates)


def _run_eval(args, config: RunConfig) -> tuple[int, str]:
    model = load_model(args.model)
    varset = parse_var_list(args.vars)
    try:
        f = parse_formula(args.formula, FormulaContext(model.sig, varset))
        points = satisfying_points(f, model, varset, config.max_points)
    except (ParseError, SignatureError, MismatchError, BoundError) as exc:
        raise DataError(str(exc)) from None
    lines = [
        f"formula: {formula_to_text(f)}",
        f"vars: {', '.join(varset.names)}",
        f"count: {points.cardinality}",
        f"points: {points}",
    ]
    return EXIT_PASS, "\n".join(lines)


def _run_closure(args, config: RunConfig) -> tuple[int, str]:
    model = load_model(args.model)
    varset = parse_var_list(args.vars)
    try:
        space = enumerate_points(model, varset, config.max_points)
        pset = PointSet.of_rows(space, parse_point_rows(args.points))
        algebra = generate_definable_algebra(model, varset, config.max_term_depth,
                                             config.max_points)
        closed = closure(pset, algebra)
    except (MismatchError, BoundError) as exc:
        raise DataError(str(exc)) from None
    lines = [
        f"vars: {', '.join(varset.names)}",
        f"input: {pset}",
        f"closure: {closed.points}",
        f"cardinality: {closed.points.cardinality}",
        f"witness: {formula_to_text(closed.witness)}",
        f"saturated: {'yes' if algebra.saturated else 'no'}",
    ]
    return EXIT_PASS, "\n".join(lines)


def _run_lattice(args, config: RunConfig) -> tuple[int, str]:
    model = load_model(args.model)
    varset = parse_var_list(args.vars)
    try:
        lattice = build_filter_lattice(model, varset, config.max_term_depth,
                                       config.max_points)
    except BoundError as exc:
        raise DataError(str(exc)) from None
    size, height, degrees = lattice_profile(lattice)
    lines = [
        f"vars: {', '.join(varset.names)}",
        f"size: {size}",
        f"height: {height}",
        f"degrees: {','.join(str(d) for d in degrees)}",
        f"saturated: {'yes' if lattice.saturated else 'no'}",
    ]
    if args.dump:
        lines.append("members:")
        lines.extend(lattice.algebra.dump_lines())
    return EXIT_PASS, "\n".join(lines)


def _run_duality(args, config: RunConfig) -> tuple[int, str]:
    model = load_model(args.model)
    try:
        report = check_duality(model, config.n_max, args.depth,
                               config.max_term_depth, config.max_points)
    except BoundError as exc:
        raise DataError(str(exc)) from None
    return (EXIT_PASS if report.passed else EXIT_FAIL), write_report(report, config.fmt)


def _run_functor(args, config: RunConfig) -> tuple[int, str]:
    model = load_model(args.model)
    try:
        report = verify_push_functoriality(model, config.depth, config.n_max,
                                           config.max_term_depth, config.max_points)
    except BoundError as exc:
        raise DataError(str(exc)) from None
    return (EXIT_PASS if report.passed else EXIT_FAIL), write_report(report, config.fmt)


def _run_equiv(args, config: RunConfig) -> tuple[int, str]:
    model1 = load_model(args.model1)
    model2 = load_model(args.model2)
    if args.mode == "iso":
        if args.phi is not None:
            raise UsageError("--phi applies to modes lae and info only")
        try:
            report = check_isomorphic(model1, model2)
        except MismatchError as exc:
            raise DataError(str(exc)) from None
        return report.exit_code, write_report(report, config.fmt)
    phis = None
    if args.phi is not None:
        phis = [parse_phi_spec(args.phi, model1.sig, config.n_max)]
    try:
        if args.mode == "lae" or phis is not None:
            report = check_automorphic_equivalence(
                model1, model2, phis, config.n_max, config.depth,
                config.max_term_depth, config.max_points)
            if args.mode == "info":
                report = replace(report, mode="informational")
        else:
            report = check_informational_equivalence(
                model1, model2, config.n_max, config.depth,
                config.max_term_depth, config.max_points)
    except MismatchError as exc:
        raise DataError(str(exc)) from None
    except BoundError as exc:
        raise DataError(str(exc)) from None
    return report.exit_code, write_report(report, config.fmt)


_RUNNERS = {
    "eval": _run_eval,
    "closure": _run_closure,
    "lattice": _run_lattice,
    "duality": _run_duality,
    "functor": _run_functor,
    "equiv": _run_equiv,
}


def run_command(argv, config: Optional[RunConfig] = None) -> tuple[int, str]:
    """Run one subcommand; returns (exit code, output text)."""
    if config is None:
        config = RunConfig.from_env()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _apply_config(args, config)
        return _RUNNERS[args.command](args, config)
    except UsageError as exc:
        return EXIT_USAGE, f"usage error: {exc}"
    except DataError as exc:
        return EXIT_DATA, f"error: {exc}"
    except DefinabilityError as exc:
        return EXIT_DATA, f"error: {exc}"


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        code, text = run_command(argv)
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    stream = sys.stderr if code >= EXIT_USAGE else sys.stdout
    print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
