"""Canonical decompositions along scales and decomposition numbers."""

import pytest

from partialhorn import (
    BUDGET_EXCEEDED,
    NOT_STABILIZED,
    STABILIZED,
    ChaseBudget,
    Hom,
    canonical_decomposition,
    compose_hom,
    decnum,
    equational_scale,
    find_isomorphism,
    image_factorization,
    is_hom,
    is_model,
    ladder_theory,
    load_hom,
    parse_scale,
    scale_step,
    scale_to_text,
)

LADDER = ladder_theory()


def bang(corpus, ladder_models):
    M, T = ladder_models["ladder_M"], ladder_models["ladder_T"]
    _, h = load_hom(str(corpus / "homs" / "ladder_bang.phom"), M, T)
    return h


def test_equational_scale_has_one_entry_per_sort():
    scale = equational_scale(LADDER.signature)
    assert [e.label for e in scale.entries] == ["eq:s"]
    entry = scale.entries[0]
    assert entry.context.names() == ("z1", "z2")


def test_scale_step_merges_elements_equal_at_the_image(corpus, ladder_models):
    f = bang(corpus, ladder_models)
    step = scale_step(LADDER, equational_scale(LADDER.signature), f)
    assert step.f_prime is not None
    # both M elements map to t, so the step merges them; ax2 then defines c
    A1 = step.e.target
    assert A1.size() == 2
    assert find_isomorphism(A1, ladder_models["ladder_A1"].structure) is not None
    assert compose_hom(step.f_prime, step.e).mapping == f.mapping
    fired = {label for label, _ in step.fired}
    assert fired == {"eq:s"}


def test_canonical_decomposition_of_the_terminal_map(corpus, ladder_models):
    f = bang(corpus, ladder_models)
    trace = canonical_decomposition(LADDER, equational_scale(LADDER.signature), f)
    assert trace.status == STABILIZED
    assert trace.claimed_decnum == 3
    assert trace.stabilization_index == 3
    sizes = [s.e.target.size() for s in trace.steps]
    assert sizes == [2, 2, 1]
    for name, step in zip(("ladder_A1", "ladder_A2", "ladder_T"), trace.steps):
        other = ladder_models[name].structure
        assert find_isomorphism(step.e.target, other) is not None
        assert is_model(step.e.target, LADDER)
    # the tower composes back to f
    epi = Hom(f.source, f.source, {e: e for e in f.source.elements()})
    for step in trace.steps:
        epi = compose_hom(step.e, epi)
    assert compose_hom(trace.steps[-1].f_prime, epi).mapping == f.mapping


def test_decnum_shortcut(corpus, ladder_models):
    f = bang(corpus, ladder_models)
    assert decnum(LADDER, equational_scale(LADDER.signature), f) == 3


def test_identity_has_decnum_zero(ladder_models):
    M = ladder_models["ladder_M"].structure
    ident = Hom(M, M, {e: e for e in M.elements()})
    trace = canonical_decomposition(LADDER, equational_scale(LADDER.signature), ident)
    assert trace.status == STABILIZED
    assert trace.claimed_decnum == 0
    assert trace.steps == ()


def test_truncated_decomposition_is_not_stabilized(corpus, ladder_models):
    f = bang(corpus, ladder_models)
    trace = canonical_decomposition(LADDER, equational_scale(LADDER.signature), f, max_steps=1)
    assert trace.status == NOT_STABILIZED
    assert trace.claimed_decnum is None
    assert trace.stabilization_index is None
    assert len(trace.steps) == 1


def test_budget_exceeded_propagates(corpus, ladder_models):
    f = bang(corpus, ladder_models)
    trace = canonical_decomposition(
        LADDER, equational_scale(LADDER.signature), f, ChaseBudget(max_elements=2)
    )
    assert trace.status == BUDGET_EXCEEDED
    assert trace.claimed_decnum is None


def test_image_factorization(corpus, ladder_models):
    f = bang(corpus, ladder_models)
    fact = image_factorization(LADDER, f)
    assert is_hom(fact.strong_epi) and is_hom(fact.mono)
    assert compose_hom(fact.mono, fact.strong_epi).mapping == f.mapping
    assert len(set(fact.mono.mapping.values())) == len(fact.mono.mapping)
    assert fact.trace.claimed_decnum == 3


def test_image_factorization_of_injective_map_is_trivial(ladder_models):
    M = ladder_models["ladder_M"].structure
    ident = Hom(M, M, {e: e for e in M.elements()})
    fact = image_factorization(LADDER, ident)
    assert fact.trace.claimed_decnum == 0
    assert fact.strong_epi.mapping == ident.mapping
    assert fact.mono.mapping == ident.mapping


def test_scale_file_round_trip(corpus):
    text = (corpus / "scales" / "eq_s.scale").read_text()
    scale = parse_scale(text, LADDER.signature)
    assert scale.name == "eq_s"
    assert scale.entries == equational_scale(LADDER.signature).entries
    assert scale_to_text(scale) == text


def test_parse_scale_rejects_bad_sorts():
    with pytest.raises(Exception):
        parse_scale("scale s { entry e [z: nosuch] z = z; }", LADDER.signature)
