"""Command line interface: subcommands, exit codes, output formats."""

import json

import jsonschema
import pytest

from partialhorn.cli import main

pytestmark = pytest.mark.usefixtures("corpus")


@pytest.fixture(scope="module")
def schema(corpus):
    return json.loads((corpus / "schema" / "cli_output.schema.json").read_text())


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, schema, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    payload = json.loads(out)
    jsonschema.validate(payload, schema)
    return code, payload, err


def test_check_models_and_hom(corpus, capsys):
    code, out, _ = run(
        capsys, "check",
        "--theory", corpus / "theories" / "ladder.pht",
        corpus / "models" / "ladder_M.pm",
        corpus / "models" / "ladder_T.pm",
        "--hom", corpus / "homs" / "ladder_bang.phom",
        "--from", corpus / "models" / "ladder_M.pm",
        "--to", corpus / "models" / "ladder_T.pm",
    )
    assert code == 0
    assert "model ladder_M: ok" in out and "hom bang: ok" in out


def test_check_rejects_non_model(corpus, tmp_path, capsys):
    bad = tmp_path / "bad.pm"
    bad.write_text("model bad of ladder {\n  elem s : e1;\n  a = e1;\n}\n")
    code, out, _ = run(capsys, "check", "--theory", corpus / "theories" / "ladder.pht", bad)
    assert code == 1
    assert "model bad: FAIL at ax1" in out


def test_free_prints_the_two_element_model(corpus, capsys):
    code, out, _ = run(
        capsys, "free",
        "--theory", corpus / "theories" / "ladder.pht",
        "--formula", "a = c",
    )
    assert code == 0
    assert "2 elements" in out
    assert "a = 0" in out and "b = 0" in out and "c = 0" in out and "d = 3" in out


def test_prove_exit_codes(corpus, capsys):
    theory = corpus / "theories" / "ladder.pht"
    code, out, _ = run(capsys, "prove", "--theory", theory, "--sequent", "[] a = c |- d !")
    assert code == 0 and "Valid" in out
    code, out, _ = run(capsys, "prove", "--theory", theory, "--sequent", "[] top |- a = b")
    assert code == 1 and "Invalid" in out


def test_prove_unknown_exits_three(tmp_path, capsys):
    th = tmp_path / "growing.pht"
    th.write_text(
        "theory growing {\n  sort s;\n  func k : s;\n  func f : s -> s;\n"
        "  axiom [] top |- k !;\n  axiom [x: s] top |- f(x) !;\n}\n"
    )
    code, out, _ = run(capsys, "prove", "--theory", th, "--sequent", "[] top |- k = f(k)",
                       "--max-elements", "20")
    assert code == 3 and "Unknown" in out


def test_decnum_text_and_json(corpus, capsys, schema):
    args = (
        "decnum",
        "--theory", corpus / "theories" / "ladder.pht",
        "--from", corpus / "models" / "ladder_M.pm",
        "--to", corpus / "models" / "ladder_T.pm",
        "--hom", corpus / "homs" / "ladder_bang.phom",
    )
    code, out, _ = run(capsys, *args)
    assert code == 0 and out.strip() == "3"
    code, payload, _ = run_json(capsys, schema, *args)
    assert code == 0
    assert payload["command"] == "decnum"
    assert payload["result"]["decnum"] == 3


def test_decnum_infers_unique_hom(corpus, capsys):
    code, out, _ = run(
        capsys, "decnum",
        "--theory", corpus / "theories" / "ladder.pht",
        "--from", corpus / "models" / "ladder_M.pm",
        "--to", corpus / "models" / "ladder_T.pm",
    )
    assert code == 0 and out.strip() == "3"


def test_decnum_refuses_ambiguous_hom(corpus, capsys):
    code, _, err = run(
        capsys, "decnum",
        "--theory", corpus / "theories" / "ladder.pht",
        "--from", corpus / "models" / "ladder_free1.pm",
        "--to", corpus / "models" / "ladder_M.pm",
    )
    assert code == 2
    assert "hom" in err


def test_decompose_trace_and_dot(corpus, tmp_path, capsys, schema):
    dot = tmp_path / "trace.dot"
    args = (
        "decompose",
        "--theory", corpus / "theories" / "ladder.pht",
        "--from", corpus / "models" / "ladder_M.pm",
        "--to", corpus / "models" / "ladder_T.pm",
        "--dot", dot,
    )
    code, payload, _ = run_json(capsys, schema, *args)
    assert code == 0
    result = payload["result"]
    assert result["decnum"] == 3 and result["status"] == "Stabilized"
    assert [s["elements"] for s in result["steps"]] == [2, 2, 1]
    text = dot.read_text()
    assert text.startswith("digraph")
    assert text.count("->") == 3


def test_decompose_truncated_exits_three(corpus, capsys):
    code, out, _ = run(
        capsys, "decompose",
        "--theory", corpus / "theories" / "ladder.pht",
        "--from", corpus / "models" / "ladder_M.pm",
        "--to", corpus / "models" / "ladder_T.pm",
        "--max-steps", "1",
    )
    assert code == 3 and "NotStabilized" in out


def test_decompose_with_scale_file(corpus, capsys):
    code, out, _ = run(
        capsys, "decompose",
        "--theory", corpus / "theories" / "ladder.pht",
        "--from", corpus / "models" / "ladder_M.pm",
        "--to", corpus / "models" / "ladder_T.pm",
        "--scale", corpus / "scales" / "eq_s.scale",
    )
    assert code == 0 and "decnum 3" in out  # trace text names the result


def test_image_factorization(corpus, capsys):
    code, out, _ = run(
        capsys, "image",
        "--theory", corpus / "theories" / "ladder.pht",
        "--from", corpus / "models" / "ladder_M.pm",
        "--to", corpus / "models" / "ladder_T.pm",
    )
    assert code == 0
    assert "epi" in out and "mono" in out


def test_gauge_check_builtin_toy(capsys, schema):
    code, payload, _ = run_json(capsys, schema, "gauge-check", "--rules", "builtin:toy",
                                "--depth", "1", "--vars", "0")
    assert code == 0
    result = payload["result"]
    assert result["certified"] is True
    assert result["gamma"] == 3  # max sharp 2, plus 1
    sharps = {row["term"]: row["sharp"] for row in result["terms"]}
    assert sharps == {"a": 0, "b": 0, "c": 1, "d": 2}


def test_gauge_check_single_term_ncat(capsys, schema):
    code, payload, _ = run_json(capsys, schema, "gauge-check", "--rules", "builtin:ncat",
                                "-n", "2", "--term", "comp2(v1, v2)", "--vars", "2")
    assert code == 0
    assert payload["result"]["certified"] is True


def test_gauge_check_pinned_term_infers_context(capsys, schema):
    # a pinned term supplies its own variables; no --vars needed
    code, payload, _ = run_json(capsys, schema, "gauge-check", "--rules", "builtin:ncat",
                                "-n", "2", "--term", "comp1(x, y)")
    assert code == 0
    assert payload["result"]["certified"] is True
    assert payload["result"]["terms"][0]["sharp"] == 1


def test_gauge_check_requires_theory_for_file_rules(capsys):
    code, _, err = run(capsys, "gauge-check", "--rules", "nosuch.json")
    assert code == 2 and "error" in err


def test_ncat_normalize(capsys, schema):
    code, out, _ = run(capsys, "ncat-normalize", "-n", "2", "comp1(comp2(x, y), z)")
    assert code == 0
    assert "comp2(comp1(x, z), comp1(y, d2(z)))" in out
    code, payload, _ = run_json(capsys, schema, "ncat-normalize", "-n", "2",
                                "comp1(comp2(x, y), z)")
    assert payload["result"]["normal"] == "comp2(comp1(x, z), comp1(y, d2(z)))"


def test_ncat_normalize_rejects_garbage(capsys):
    code, _, err = run(capsys, "ncat-normalize", "-n", "2", "comp9(x)")
    assert code == 2 and "error" in err


def test_topdec(capsys, schema):
    code, payload, _ = run_json(capsys, schema, "topdec", "--lambda", "2")
    assert code == 0
    result = payload["result"]
    assert result["lambda"] == 2
    assert result["stabilizationIndex"] == 4
    assert result["status"] == "Stabilized"
    assert len(result["steps"]) == 4


def test_gat_rank(corpus, capsys, schema):
    code, payload, _ = run_json(capsys, schema, "gat-rank", corpus / "gats" / "ncat2.gat")
    assert code == 0
    assert payload["result"]["bound"] == 4
    code, _, _ = run(capsys, "gat-rank", corpus / "gats" / "nondescending_violation.gat")
    assert code == 1


def test_examples_all_pass(corpus, capsys, schema):
    code, payload, _ = run_json(capsys, schema, "examples", "--corpus", corpus)
    assert code == 0
    records = payload["result"]["records"]
    assert len(records) == 26
    assert all(r["status"] == "PASS" for r in records)


def test_examples_filters(corpus, capsys):
    code, out, _ = run(capsys, "examples", "--corpus", corpus, "--filter", "toy")
    assert code == 0
    assert len([l for l in out.splitlines() if l.endswith(" PASS")]) == 2
    code, out, _ = run(capsys, "examples", "--corpus", corpus, "--filter", "koizumi")
    assert code == 0
    assert len([l for l in out.splitlines() if l.endswith(" PASS")]) == 3


def test_examples_json_is_deterministic(corpus, capsys):
    _, out1, _ = run(capsys, "examples", "--corpus", corpus, "--format", "json")
    _, out2, _ = run(capsys, "examples", "--corpus", corpus, "--format", "json")
    assert out1 == out2


def test_usage_errors_exit_two(corpus, capsys):
    code, _, err = run(capsys, "free", "--theory", "missing.pht")
    assert code == 2 and "error" in err
    code, _, err = run(capsys, "prove", "--theory", corpus / "theories" / "ladder.pht",
                       "--sequent", "[] oops |-")
    assert code == 2
