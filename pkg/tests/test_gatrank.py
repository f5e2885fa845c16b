"""Dependency ranks of generalized algebraic signatures."""

import pytest

from partialhorn import (
    analyze,
    decnum_bound,
    dependency_rank,
    gat_from_json,
    gat_to_json,
    gat_to_text,
    load_gat,
    parse_gat,
)

CAT = """
gat cat {
  sort Ob;
  sort Mor ctx(Ob, Ob);
  op id ctx(Ob) : Mor;
  op comp ctx(Ob, Ob, Ob, Mor, Mor) : Mor;
  axiom ctx(Ob, Ob, Ob, Ob, Mor, Mor, Mor) : Mor;
}
"""


def test_ranks():
    spec = parse_gat(CAT)
    assert dependency_rank(spec) == {"Ob": 0, "Mor": 1}
    three = parse_gat("gat t { sort A; sort B ctx(A); sort C ctx(A, B); }")
    assert dependency_rank(three) == {"A": 0, "B": 1, "C": 2}


def test_rank_zero_needs_empty_context():
    spec = parse_gat("gat t { sort A; sort B ctx(A); }")
    assert dependency_rank(spec)["A"] == 0
    assert dependency_rank(spec)["B"] == 1


def test_cyclic_sorts_rejected():
    with pytest.raises(ValueError):
        dependency_rank(parse_gat("gat t { sort A ctx(B); sort B ctx(A); }"))


def test_undeclared_and_duplicate_sorts_rejected():
    # the parser stays syntactic; the analyzer owns the checks
    with pytest.raises(ValueError):
        dependency_rank(parse_gat("gat t { sort A ctx(B); }"))
    with pytest.raises(ValueError):
        dependency_rank(parse_gat("gat t { sort A; sort A; }"))
    with pytest.raises(ValueError):
        analyze(parse_gat("gat t { sort A; op f : B; }"))
    with pytest.raises(ValueError):
        analyze(parse_gat("gat t { sort A; axiom ctx(A) : B; }"))
    with pytest.raises(ValueError):
        analyze(parse_gat("gat t { sort A; op f ctx(B) : A; }"))


def test_non_descending_analysis_of_cat():
    report = analyze(parse_gat(CAT))
    assert report.non_descending
    assert report.violations == ()
    assert report.bound == 3  # max rank 1, plus 2


def test_op_violation():
    spec = parse_gat("gat t { sort X; sort Y ctx(X); op drop ctx(Y) : X; }")
    report = analyze(spec)
    assert not report.non_descending
    assert report.bound is None
    (v,) = report.violations
    assert (v.kind, v.name, v.ctx_rank, v.sort_rank) == ("op", "drop", 1, 0)


def test_axiom_violation():
    spec = parse_gat("gat t { sort X; sort Y ctx(X); axiom ctx(X, Y, Y) : X; }")
    report = analyze(spec)
    (v,) = report.violations
    assert v.kind == "axiom" and v.ctx_rank == 1 and v.sort_rank == 0


def test_corpus_bounds(corpus):
    expected = {
        "cat": 3,
        "ncat1": 3,
        "ncat2": 4,
        "ncat3": 5,
        "moncat": 3,
        "multicat": 3,
        "dblcat": 4,
        "set": 2,
    }
    for name, bound in expected.items():
        spec = load_gat(str(corpus / "gats" / f"{name}.gat"))
        assert decnum_bound(spec) == bound, name
    bad = load_gat(str(corpus / "gats" / "nondescending_violation.gat"))
    report = analyze(bad)
    assert not report.non_descending
    assert report.bound is None
    assert {v.kind for v in report.violations} == {"axiom"}


def test_text_round_trip(corpus):
    for name in ("cat", "ncat3", "dblcat", "nondescending_violation"):
        text = (corpus / "gats" / f"{name}.gat").read_text()
        spec = parse_gat(text)
        assert gat_to_text(spec) == text
        assert parse_gat(gat_to_text(spec)) == spec


def test_json_round_trip():
    spec = parse_gat(CAT)
    assert gat_from_json(gat_to_json(spec)) == spec
