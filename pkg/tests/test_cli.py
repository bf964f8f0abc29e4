import json
import pathlib

import jsonschema

from heapinv.cli import EXIT_DISAGREE, EXIT_ERROR, EXIT_OK, main
from heapinv.corpus import corpus_by_name

SCHEMA = json.loads(
    (pathlib.Path(__file__).parent.parent / "docs" / "report-schema.json")
    .read_text(encoding="utf-8"))


def corpus_path(name):
    import importlib.resources as resources
    entry = corpus_by_name()[name]
    return str(resources.files("heapinv.corpus_data").joinpath(entry.file))


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def validate(payload):
    jsonschema.validate(payload, SCHEMA)


def test_run_dump_schema(capsys):
    code, out, _ = run_cli(capsys, "run", corpus_path("single-cell-roundtrip"),
                           "--in", "1")
    assert code == EXIT_OK
    payload = json.loads(out)
    validate(payload)
    assert payload["outcome"] == {"kind": "top"}
    assert payload["heapLen"] == 1


def test_run_bot_outcome(capsys):
    code, out, _ = run_cli(capsys, "run", corpus_path("trivially-false"))
    assert code == EXIT_OK
    payload = json.loads(out)
    validate(payload)
    assert payload["outcome"]["kind"] == "bot"
    assert payload["outcome"]["pred"] == "F"


def test_run_fuel_zero_heap_op(capsys):
    code, out, _ = run_cli(capsys, "run", corpus_path("single-cell-roundtrip"),
                           "--heap-op-fuel", "0")
    payload = json.loads(out)
    validate(payload)
    assert payload["outcome"] == {"kind": "undefined", "reason": "fuel_exhausted"}


def test_run_with_bundled_invariant(capsys, tmp_path):
    import importlib.resources as resources
    from heapinv.encode import enc_r
    from heapinv.lang import parse_and_check, pretty_print
    entry = corpus_by_name()["list-build-traverse"]
    enc = enc_r(entry.load())
    enc_file = tmp_path / "encoded.up"
    enc_file.write_text(pretty_print(enc.program))
    fixture = str(resources.files("heapinv.fixtures")
                  .joinpath("list_invariant.json"))
    code, out, _ = run_cli(capsys, "run", str(enc_file), "--in", "1",
                           "--last-addr", "1", "--interp", fixture)
    assert code == EXIT_OK
    payload = json.loads(out)
    validate(payload)
    assert payload["outcome"]["kind"] in ("top", "undefined")


def test_fixpoint_report_schema(capsys):
    code, out, _ = run_cli(capsys, "fixpoint", corpus_path("write-read-false"),
                           "--format", "json")
    assert code == EXIT_OK
    payload = json.loads(out)
    validate(payload)
    assert payload["verdict"] == "unsafe"
    assert payload["witnesses"]


def test_equisafe_agree_exit_zero(capsys):
    code, out, _ = run_cli(capsys, "equisafe",
                           corpus_path("single-cell-roundtrip"),
                           "--enc", "r", "--format", "json")
    assert code == EXIT_OK
    payload = json.loads(out)
    validate(payload)
    assert payload["agree"] is True


def test_equisafe_cosim_report(capsys):
    code, out, _ = run_cli(capsys, "equisafe", corpus_path("two-cells-copy"),
                           "--enc", "r", "--cosim", "--format", "json")
    assert code == EXIT_OK
    payload = json.loads(out)
    validate(payload)
    assert payload["cosim"]["ok"] is True


def test_equisafe_disagree_exit_one(capsys, tmp_path):
    # the functional-safety variant on a program outside its precondition
    code, out, _ = run_cli(capsys, "equisafe", corpus_path("rwfun-gap-witness"),
                           "--enc", "rwfun", "--assume-memsafe",
                           "--format", "json")
    assert code == EXIT_DISAGREE
    payload = json.loads(out)
    validate(payload)
    assert payload["agree"] is False


def test_encode_output_reparses(capsys, tmp_path):
    out_file = tmp_path / "enc.up"
    code, _, _ = run_cli(capsys, "encode", corpus_path("write-read-false"),
                         "--enc", "rw", "-o", str(out_file))
    assert code == EXIT_OK
    from heapinv.lang import parse_and_check
    parse_and_check(out_file.read_text())


def test_emit_chc_and_solve_with_stub(capsys, tmp_path):
    import stat
    smt = tmp_path / "out.smt2"
    code, _, _ = run_cli(capsys, "emit-chc", corpus_path("trivially-false"),
                         "--enc", "r", "--native-havoc", "-o", str(smt))
    assert code == EXIT_OK
    assert smt.read_text().startswith("(set-logic HORN)")
    stub = tmp_path / "stub"
    stub.write_text("#!/bin/sh\necho unsat\n")
    stub.chmod(stub.stat().st_mode | stat.S_IEXEC)
    code, out, _ = run_cli(capsys, "solve", str(smt),
                           "--solver", f"{stub} {{file}}")
    assert code == EXIT_OK and out.strip() == "unsat"


def test_solve_tool_error_exit_two(capsys, tmp_path):
    smt = tmp_path / "x.smt2"
    smt.write_text("(set-logic HORN)\n(check-sat)\n")
    code, _, err = run_cli(capsys, "solve", str(smt),
                           "--solver", "/missing/bin {file}")
    assert code == EXIT_ERROR and "error" in err


def test_parse_error_reported_with_position(capsys, tmp_path):
    bad = tmp_path / "bad.up"
    bad.write_text("prog { var x Int; }")
    code, _, err = run_cli(capsys, "run", str(bad))
    assert code == EXIT_ERROR
    assert f"{bad}:1:" in err


def test_type_error_reported_on_stderr(capsys, tmp_path):
    bad = tmp_path / "bad.up"
    bad.write_text("prog { var p: Addr; p := p + 1; }")
    code, _, err = run_cli(capsys, "run", str(bad))
    assert code == EXIT_ERROR
    assert "arithmetic on Addr" in err


def test_corpus_filter_runs_subset(capsys):
    code, out, _ = run_cli(capsys, "corpus", "--filter", "cell-pair",
                           "--enc", "r,rw", "--format", "json")
    assert code == EXIT_OK
    payload = json.loads(out)
    validate(payload)
    assert payload["ok"] is True
    assert len(payload["entries"]) == 2


def test_corpus_empty_filter_usage_error(capsys):
    code, _, err = run_cli(capsys, "corpus", "--filter", "")
    assert code == EXIT_ERROR
    assert "filter" in err


def test_corpus_unknown_variant(capsys):
    code, _, err = run_cli(capsys, "corpus", "--enc", "bogus")
    assert code == EXIT_ERROR
    assert "unknown corpus variant" in err


def test_run_all_inputs_jsonl(capsys):
    code, out, _ = run_cli(capsys, "run", corpus_path("no-heap-arith"),
                           "--all-inputs")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert len(lines) == 7  # input values only; seed collapses (unused)
    for line in lines:
        payload = json.loads(line)
        validate(payload)
        assert payload["outcome"] == {"kind": "top"}
