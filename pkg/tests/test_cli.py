"""Model files, phi specs, report formats, and subcommand exit codes."""

import pathlib

import pytest

from kbgeo import Signature, VERDICT_WITNESSED
from kbgeo.cli import (
    DataError,
    EXIT_DATA,
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_UNKNOWN,
    EXIT_USAGE,
    RunConfig,
    UsageError,
    load_model,
    load_model_text,
    parse_phi_spec,
    parse_point_rows,
    parse_var_list,
    print_model,
    run_command,
)
from helpers import all_fixtures, model_neg, model_p

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def fixture(name: str) -> str:
    return str(FIXTURES / name)


def test_load_fixture_files_match_programmatic_models():
    by_name = dict(all_fixtures())
    for name, expected in by_name.items():
        loaded = load_model(fixture(f"{name}.kbm"))
        assert loaded.sig == expected.sig
        assert tuple(str(e) for e in expected.carrier) == loaded.carrier


def test_model_text_round_trip():
    m = load_model(fixture("m_neg.kbm"))
    again = load_model_text(print_model(m), "round-trip")
    assert again == m
    assert print_model(again) == print_model(m)


def test_loader_reports_line_numbers():
    with pytest.raises(DataError) as info:
        load_model_text("carrier: 0 1\nwhatever\n", "bad.kbm")
    assert "bad.kbm:2" in str(info.value)
    with pytest.raises(DataError) as info:
        load_model_text("rel P 1\n", "nocarrier.kbm")
    assert "nocarrier.kbm" in str(info.value)
    with pytest.raises(DataError) as info:
        load_model_text("carrier: 0 1\nflag with_equality maybe\n", "flag.kbm")
    assert "flag.kbm:2" in str(info.value)


def test_loader_validates_tables():
    text = "carrier: 0 1\nop neg 1\nop neg: 0 -> 1\n"
    with pytest.raises(DataError) as info:
        load_model_text(text, "partial.kbm")
    assert "neg" in str(info.value) and "partial.kbm" in str(info.value)
    with pytest.raises(DataError):
        load_model_text("carrier: 0 1\nrel P 1\nrel P: 7\n", "outside.kbm")
    with pytest.raises(DataError):
        load_model_text("carrier: 0 1\nrel P 1\nrel P 1\n", "twice.kbm")


def test_loader_flag_off_and_comments():
    text = "# heading\ncarrier: 0 1  # trailing\nflag with_equality off\n"
    m = load_model_text(text)
    assert not m.sig.with_equality
    assert m.carrier == ("0", "1")


def test_missing_file_is_data_error():
    with pytest.raises(DataError):
        load_model(fixture("no_such.kbm"))


def test_parse_var_list():
    assert parse_var_list("x, y").names == ("x", "y")
    with pytest.raises(UsageError):
        parse_var_list(" , ")
    with pytest.raises(UsageError):
        parse_var_list("x,x")


def test_parse_point_rows():
    assert parse_point_rows("1,0;0,1") == [("1", "0"), ("0", "1")]
    assert parse_point_rows("") == []
    assert parse_point_rows("1") == [("1",)]


def test_parse_phi_specs():
    sig = Signature((), (("P", 1), ("Q", 1)))
    assert parse_phi_spec("identity", sig, 2).is_identity
    swap = parse_phi_spec("swaprel P Q", sig, 2)
    assert swap.describe() == "swap P Q"
    ren = parse_phi_spec("renamevars x1:x2,x2:x1", sig, 2)
    assert ren.describe() == "renamevars[2] x1:x2,x2:x1"
    with pytest.raises(UsageError):
        parse_phi_spec("swaprel P", sig, 2)
    with pytest.raises(UsageError):
        parse_phi_spec("swaprel P R", sig, 2)
    with pytest.raises(UsageError):
        parse_phi_spec("renamevars x1:x9", sig, 2)
    with pytest.raises(UsageError):
        parse_phi_spec("sideways", sig, 2)


def test_eval_subcommand_pinned_output():
    code, text = run_command(["eval", fixture("m_p.kbm"),
                              "--vars", "x,y", "--formula", "P(x) & !P(y)"])
    assert code == EXIT_PASS
    assert "points: {(1,0)}" in text
    assert "count: 1" in text


def test_eval_rejects_bad_formula():
    code, text = run_command(["eval", fixture("m_p.kbm"),
                              "--vars", "x", "--formula", "Q(x)"])
    assert code == EXIT_DATA
    assert text.startswith("error:")


def test_closure_subcommand():
    code, text = run_command(["closure", fixture("m_p.kbm"),
                              "--vars", "x1,x2", "--points", "1,0"])
    assert code == EXIT_PASS
    assert "closure: {(1,0)}" in text
    code, text = run_command(["closure", fixture("m_eq.kbm"),
                              "--vars", "x1,x2", "--points", "0,0"])
    assert code == EXIT_PASS
    assert "closure: {(0,0), (1,1)}" in text


def test_lattice_subcommand():
    code, text = run_command(["lattice", fixture("m_p.kbm"), "--vars", "x1"])
    assert code == EXIT_PASS
    assert "size: 4" in text
    code, text = run_command(["lattice", fixture("m_p.kbm"), "--vars", "x1", "--dump"])
    assert "members:" in text and "0x" in text


def test_duality_and_functor_subcommands():
    code, text = run_command(["duality", fixture("m_eq.kbm"), "--max-vars", "2"])
    assert code == EXIT_PASS
    assert "failures: none" in text
    code, text = run_command(["functor", fixture("m_neg.kbm"),
                              "--max-vars", "2", "--depth", "1"])
    assert code == EXIT_PASS


def test_equiv_pinned_witness_output():
    code, text = run_command(["equiv", fixture("m_pq1.kbm"), fixture("m_pq2.kbm")])
    assert code == EXIT_PASS
    assert "phi: swap P Q" in text
    assert "verdict: EQUIVALENT_WITNESSED" in text


def test_equiv_pinned_refutation_output():
    code, text = run_command(["equiv", fixture("m_p.kbm"), fixture("m_p0.kbm"),
                              "--max-vars", "1"])
    assert code == EXIT_FAIL
    assert "lattice size 4 vs 2 at X={x1}" in text
    assert "4 vs 2 at |X|=1" in text


def test_equiv_modes_and_phi():
    code, text = run_command(["equiv", fixture("m_pq1.kbm"), fixture("m_pq2.kbm"),
                              "--mode", "iso"])
    assert code == EXIT_FAIL
    code, text = run_command(["equiv", fixture("m_pq1.kbm"), fixture("m_pq2.kbm"),
                              "--mode", "lae"])
    assert code == EXIT_PASS and "swap P Q" in text
    code, text = run_command(["equiv", fixture("m_pq1.kbm"), fixture("m_pq2.kbm"),
                              "--phi", "identity"])
    assert code == EXIT_UNKNOWN
    assert "verdict: UNKNOWN" in text
    code, text = run_command(["equiv", fixture("m_pq1.kbm"), fixture("m_pq2.kbm"),
                              "--mode", "iso", "--phi", "identity"])
    assert code == EXIT_USAGE


def test_machine_format_is_flat_and_deterministic():
    argv = ["equiv", fixture("m_pq1.kbm"), fixture("m_pq2.kbm"), "--format", "machine"]
    code, first = run_command(argv)
    _, second = run_command(argv)
    assert code == EXIT_PASS
    assert first == second
    lines = dict(line.split(": ", 1) for line in first.splitlines())
    assert lines["verdict"] == VERDICT_WITNESSED
    assert lines["bounds.n_max"] == "2"
    assert lines["bounds.depth"] == "2"
    assert lines["witness.phi"] == "swap P Q"
    argv = ["equiv", fixture("m_p.kbm"), fixture("m_p0.kbm"),
            "--max-vars", "1", "--format", "machine"]
    _, refuted = run_command(argv)
    lines = dict(line.split(": ", 1) for line in refuted.splitlines())
    assert lines["refutation.values"] == "4 vs 2 at |X|=1"
    code, report = run_command(["duality", fixture("m_eq.kbm"), "--format", "machine"])
    assert "failures: 0" in report


def test_usage_errors_exit_above_two():
    code, text = run_command(["equiv", fixture("m_p.kbm")])
    assert code == EXIT_USAGE and code > 2
    code, _ = run_command(["equiv", fixture("m_p.kbm"), fixture("m_p0.kbm"),
                           "--mode", "upside"])
    assert code == EXIT_USAGE
    code, _ = run_command(["lattice", fixture("m_p.kbm"), "--vars", "x1",
                           "--max-points", "0"])
    assert code == EXIT_USAGE
    code, _ = run_command(["eval", fixture("m_p.kbm"), "--vars", "x",
                           "--formula", "P(x"])
    assert code == EXIT_DATA


def test_point_bound_env_override():
    config = RunConfig.from_env({"KBGEO_MAX_POINTS": "2"})
    assert config.max_points == 2
    code, text = run_command(["eval", fixture("m_p.kbm"), "--vars", "x1,x2",
                              "--formula", "true"], config)
    assert code == EXIT_DATA
    with pytest.raises(DataError):
        RunConfig.from_env({"KBGEO_MAX_POINTS": "soon"})
    assert RunConfig.from_env({}).max_points == RunConfig().max_points


def test_signature_mismatch_is_data_error():
    code, text = run_command(["equiv", fixture("m_p.kbm"), fixture("m_eq.kbm")])
    assert code == EXIT_DATA
