"""End-to-end acceptance suite.

One test per headline result: the bundled worked examples reproduce
their exact integers (decomposition numbers, tower shapes, rank
bounds), and the randomized suites check the universal properties and
soundness claims the library rests on. Run with -v for one line each.
"""

import json
import random
import subprocess
import sys
import time

import pytest

from partialhorn import (
    COMPLETE,
    NOT_STABILIZED,
    STABILIZED,
    App,
    ChaseBudget,
    Context,
    Hom,
    HornFormula,
    PartialStructure,
    Presentation,
    analyze,
    canonical_decomposition,
    chase,
    check_gauge,
    decnum,
    decnum_bound,
    enumerate_homs,
    equational_scale,
    find_isomorphism,
    holds,
    is_hom,
    is_light,
    is_monotone,
    koizumi_map,
    ladder_gauge_rules,
    load_gat,
    monotone_light_decomposition,
    ncat_is_normal,
    ncat_normalize,
    ncat_sharp,
    ncat_theory,
    parse_formula,
    parse_hom,
    parse_model,
    parse_theory,
    reduces,
    representing_model,
    scale_step,
)
from partialhorn.syntax import Var, free_vars

EMPTY = Context(())


def load_pair(corpus, theory, model_name, hom_name, target_name):
    src = parse_model((corpus / "models" / f"{model_name}.pm").read_text(), theory)
    tgt = parse_model((corpus / "models" / f"{target_name}.pm").read_text(), theory)
    _, h = parse_hom((corpus / "homs" / f"{hom_name}.phom").read_text(), src, tgt)
    return src, tgt, h


def corpus_theory(corpus, name):
    return parse_theory((corpus / "theories" / f"{name}.pht").read_text())


# ---------------------------------------------------------------------------
# 1. Ladder: the two-constant collapse has decomposition number 3.


def test_a01_ladder_bang_decnum_3(corpus, ladder, ladder_models):
    M, T = ladder_models["ladder_M"], ladder_models["ladder_T"]
    _, bang = parse_hom((corpus / "homs" / "ladder_bang.phom").read_text(), M, T)
    trace = canonical_decomposition(ladder, equational_scale(ladder.signature), bang)
    assert trace.status == STABILIZED
    assert trace.claimed_decnum == 3
    assert [st.e.target.size() for st in trace.steps] == [2, 2, 1]
    for st, name in zip(trace.steps, ("ladder_A1", "ladder_A2", "ladder_T")):
        assert find_isomorphism(st.e.target, ladder_models[name].structure) is not None, name


# ---------------------------------------------------------------------------
# 2. Ladder gauge: certificates pin the sharps, and every hom between the
#    bundled models stays within the certified bound.


def test_a02_ladder_gauge_certified_and_bound_respected(ladder, ladder_models):
    rules = ladder_gauge_rules()
    expected = {
        "a": (0, ()),
        "b": (0, ()),
        "c": (1, (("eq:s", ("a", "b")),)),
        "d": (2, (("eq:s", ("a", "c")),)),
    }
    for name, (sharp, defining) in expected.items():
        cert = check_gauge(rules, EMPTY, App(name, ()))
        assert cert.certified, name
        row = cert.rows[0]
        assert row.sharp == sharp
        got = tuple((e.scale_label, tuple(t.func for t in e.args)) for e in row.entries)
        assert got == defining
    assert check_gauge(rules, EMPTY, App("d", ())).bound == 3

    scale = equational_scale(ladder.signature)
    checked = 0
    for A in ladder_models.values():
        for B in ladder_models.values():
            for h in enumerate_homs(A.structure, B.structure):
                d = decnum(ladder, scale, h)
                assert d is not None and d <= 3
                checked += 1
    assert checked >= 21


# ---------------------------------------------------------------------------
# 3. Merging two objects of a category forces a fresh composite first and
#    only then identifies it: decomposition number 2.


def test_a03_category_merge_decnum_2(corpus):
    th = corpus_theory(corpus, "ncat1")
    src, tgt, phi = load_pair(corpus, th, "cat_merge_src", "cat_merge_phi", "cat_merge_tgt")
    step1 = parse_model((corpus / "models" / "cat_merge_step1.pm").read_text(), th)
    trace = canonical_decomposition(th, equational_scale(th.signature), phi)
    assert trace.status == STABILIZED
    assert trace.claimed_decnum == 2
    assert [st.e.target.size() for st in trace.steps] == [7, 6]
    assert find_isomorphism(trace.steps[0].e.target, step1.structure) is not None
    assert find_isomorphism(trace.steps[1].e.target, tgt.structure) is not None

    # step 1 creates the composite as a fresh cell, distinct from h
    e0 = trace.steps[0].e
    gf = e0.target.funcs["comp1"].get((e0.mapping[src.id_of("g")], e0.mapping[src.id_of("f")]))
    assert gf is not None and gf != e0.mapping[src.id_of("h")]

    # step 2 only merges: its mediating leg is an isomorphism onto the target
    last = trace.steps[-1].f_prime
    assert last.source.size() == last.target.size() == len(set(last.mapping.values()))
    assert is_hom(Hom(last.target, last.source, {v: k for k, v in last.mapping.items()}))


# ---------------------------------------------------------------------------
# 4. The two-level analogue needs one more step: decomposition number 3,
#    and every intermediate matches the bundled tower model for model.


def test_a04_two_cat_merge_decnum_3(corpus):
    th = corpus_theory(corpus, "ncat2")
    src, tgt, F = load_pair(corpus, th, "twocat_src", "twocat_F", "twocat_tgt")
    towers = [
        parse_model((corpus / "models" / name).read_text(), th).structure
        for name in ("twocat_step1.pm", "twocat_step2.pm", "twocat_tgt.pm")
    ]
    started = time.monotonic()
    trace = canonical_decomposition(
        th, equational_scale(th.signature), F, budget=ChaseBudget(20000, 200)
    )
    elapsed = time.monotonic() - started
    assert trace.status == STABILIZED
    assert trace.claimed_decnum == 3
    assert [st.e.target.size() for st in trace.steps] == [15, 14, 13]
    for st, want in zip(trace.steps, towers):
        assert find_isomorphism(st.e.target, want) is not None
    assert elapsed < 60.0


# ---------------------------------------------------------------------------
# 5. Bidirectional chain with m+1 rungs: decomposition number m+1.


def test_a05_bidirectional_chain_decnums(corpus):
    th = corpus_theory(corpus, "chain_bidir")
    scale = equational_scale(th.signature)
    for m in range(7):
        _, _, bang = load_pair(
            corpus, th, f"chain_bidir_M{m}", f"chain_bidir_bang{m}", "chain_bidir_T"
        )
        assert decnum(th, scale, bang) == m + 1, f"m={m}"


# ---------------------------------------------------------------------------
# 6. Forward-only chain: no stabilization within 7 steps; the truncated
#    theory stabilizes at 9 when allowed to run on.


def test_a06_forward_chain_slow_stabilization(corpus):
    th = corpus_theory(corpus, "chain_fwd")
    scale = equational_scale(th.signature)
    _, _, bang = load_pair(corpus, th, "chain_fwd_A0", "chain_fwd_bang", "chain_fwd_T")
    short = canonical_decomposition(th, scale, bang, max_steps=7)
    assert short.status == NOT_STABILIZED
    assert short.claimed_decnum is None
    assert len(short.steps) == 7
    full = canonical_decomposition(th, scale, bang)
    assert full.status == STABILIZED
    assert full.claimed_decnum == 9


# ---------------------------------------------------------------------------
# 7. Staircase spaces: the monotone-light tower of the fold map stabilizes
#    at exactly 2*lam, and every step kernel follows the closed form.


def test_a07_staircase_monotone_light_towers():
    for lam in (1, 2, 3):
        trace = monotone_light_decomposition(koizumi_map(lam))
        assert trace.status == STABILIZED, f"lam={lam}"
        assert trace.stabilization_index == 2 * lam
        for st in trace.steps:
            assert is_monotone(st.e)
        assert is_light(trace.steps[-1].f_prime)
        for s, kernel in enumerate(trace.kernels, start=1):
            beta, k = divmod(s, 2)
            a_class = frozenset((alpha, "a") for alpha in range(-1, beta + k))
            b_class = frozenset((alpha, "b") for alpha in range(-1, beta))
            expected = {cls for cls in (a_class, b_class) if len(cls) > 1}
            assert {cls for cls in kernel if len(cls) > 1} == expected, f"lam={lam} step={s}"
            assert sum(len(c) for c in kernel) == 2 * (lam + 1)


# ---------------------------------------------------------------------------
# 8. Dependency-rank bounds for the bundled algebraic signatures, and the
#    deliberate non-descending violation is flagged.


def test_a08_gat_dependency_bounds(corpus):
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
    report = analyze(load_gat(str(corpus / "gats" / "nondescending_violation.gat")))
    assert not report.non_descending
    assert report.bound is None
    assert report.violations


# ---------------------------------------------------------------------------
# Randomized suites. All seeded; the helpers below build small models of a
# one-sort theory whose only axiom creates f-values under the relation R.

REP_THEORY = parse_theory(
    """
    theory rep {
      sort s;
      func f : s -> s;
      func k : s;
      rel R : s, s;
      axiom [x: s, y: s] R(x, y) |- f(x) !;
    }
    """
)


def random_base(rng: random.Random, n: int) -> PartialStructure:
    sig = REP_THEORY.signature
    elems = tuple(range(n))
    funcs: dict = {"f": {}, "k": {}}
    for e in elems:
        if rng.random() < 0.35:
            funcs["f"][(e,)] = rng.choice(elems)
    if rng.random() < 0.5:
        funcs["k"][()] = rng.choice(elems)
    pairs = frozenset(
        (a, b) for a in elems for b in elems if rng.random() < 0.3
    )
    return PartialStructure(sig, {"s": elems}, funcs, {"R": pairs})


def model_pool(rng: random.Random, count: int, max_size: int) -> list[PartialStructure]:
    pool: list[PartialStructure] = []
    while len(pool) < count:
        result = chase(REP_THEORY, Presentation(random_base(rng, rng.randint(1, 3))))
        assert result.status == COMPLETE
        if 1 <= result.model.size() <= max_size:
            pool.append(result.model)
    return pool


def random_rep_formula(rng: random.Random, names: list[str]) -> str:
    def term(depth: int) -> str:
        pool = list(names) + ["k"]
        if depth > 0 and rng.random() < 0.4:
            return f"f({term(depth - 1)})"
        return rng.choice(pool)

    atoms = []
    for _ in range(rng.randint(0, 3)):
        kind = rng.choice(["rel", "eq", "def"])
        if kind == "rel":
            atoms.append(f"R({term(1)}, {term(1)})")
        elif kind == "eq":
            atoms.append(f"{term(1)} = {term(1)}")
        else:
            atoms.append(f"{term(2)} !")
    return " & ".join(atoms) if atoms else "top"


# 9a. The chased generic context represents its formula: maps out of it
#     correspond exactly to satisfying assignments in any model.


def test_a09a_representing_model_universal_property():
    rng = random.Random(417)
    sig = REP_THEORY.signature
    targets = model_pool(rng, 6, 4)
    cases = 0
    for _ in range(60):
        if cases >= 100:
            break
        nv = rng.randint(0, 2)
        names = ["x", "y"][:nv]
        ctx = Context(tuple((v, "s") for v in names))
        phi = parse_formula(sig, random_rep_formula(rng, names))
        result, generic = representing_model(REP_THEORY, ctx, phi)
        assert result.status == COMPLETE
        R = result.model
        for B in targets:
            for combo in _assignments(names, B):
                if not holds(B, combo, phi):
                    continue
                matching = [
                    h
                    for h in enumerate_homs(R, B)
                    if all(h.mapping[generic[v]] == combo[v] for v in names)
                ]
                assert len(matching) == 1, (phi, combo)
                cases += 1
    assert cases >= 100


def _assignments(names, B: PartialStructure):
    if not names:
        return [{}]
    carrier = B.carriers["s"]
    out = []

    def rec(i: int, acc: dict):
        if i == len(names):
            out.append(dict(acc))
            return
        for e in carrier:
            acc[names[i]] = e
            rec(i + 1, acc)

    rec(0, {})
    return out


# 9b. One canonical step quotients by the equalities f identifies, and that
#     quotient is a coequalizer: maps killing those equalities factor once.


def test_a09b_scale_step_coequalizer_property():
    rng = random.Random(733)
    scale = equational_scale(REP_THEORY.signature)
    pool = model_pool(rng, 6, 5)
    cases = 0
    for _ in range(400):
        if cases >= 50:
            break
        A, X = rng.choice(pool), rng.choice(pool)
        homs = enumerate_homs(A, X)
        if not homs:
            continue
        f = rng.choice(homs)
        step = scale_step(REP_THEORY, scale, f)
        assert step.result.status == COMPLETE
        e = step.e
        forced = [(dict(items)["z1"], dict(items)["z2"]) for _, items in step.fired]
        for U in pool:
            for u in enumerate_homs(A, U):
                if any(u.mapping[a] != u.mapping[b] for a, b in forced):
                    continue
                mediators = [
                    m
                    for m in enumerate_homs(e.target, U)
                    if all(m.mapping[e.mapping[x]] == u.mapping[x] for x in A.elements())
                ]
                assert len(mediators) == 1
                cases += 1
    assert cases >= 50


# 9c. Normalization soundness: the rewrite is derivable. For 200 random
#     cell terms the theory proves "t defined |- t = normalize(t)", the
#     normal form is recognized as normal, and sharp never increases.
#     Composition arguments keep disjoint variables and at least the
#     composition's own level, so every proof obligation has a finite
#     free model within budget.


def _gen_cell_term(n: int, rng: random.Random, depth: int, vars_avail, need_dim: int = 0):
    if depth == 0 or rng.random() < 0.25:
        return Var(rng.choice(vars_avail))
    choices = ["bound", "bound", "comp"]
    if len(vars_avail) < 2:
        choices = ["bound", "bound"]
    kind = rng.choice(choices)
    if kind == "bound":
        lo = need_dim + 1
        if lo > n:
            return Var(rng.choice(vars_avail))
        k = rng.randint(lo, n)
        side = rng.choice("dc")
        return App(f"{side}{k}", (_gen_cell_term(n, rng, depth - 1, vars_avail, need_dim),))
    k_lo = max(need_dim, 1) if n < 3 else max(need_dim, 2)
    k = rng.randint(k_lo, n)
    cut = rng.randint(1, len(vars_avail) - 1)
    pool = list(vars_avail)
    rng.shuffle(pool)
    left, right = pool[:cut], pool[cut:]
    return App(
        f"comp{k}",
        (
            _gen_cell_term(n, rng, depth - 1, left, k),
            _gen_cell_term(n, rng, depth - 1, right, k),
        ),
    )


def test_a09c_normalization_soundness_200_terms():
    theories = {n: ncat_theory(n) for n in (1, 2, 3)}
    rng = random.Random(90)
    budget = ChaseBudget(max_elements=30000, max_rounds=60)
    checked = 0
    for i in range(200):
        n = rng.choice([1, 1, 2, 2, 3])
        nv = rng.randint(1, 3) if n < 3 else rng.randint(1, 2)
        names = ["x", "y", "z"][:nv]
        t = _gen_cell_term(n, rng, 4, names)
        used = sorted(free_vars(t))
        ctx = Context(tuple((v, "*") for v in used) or (("x", "*"),))
        nf = ncat_normalize(n, ctx, t)
        assert ncat_is_normal(nf), (i, t, nf)
        assert ncat_sharp(t) >= ncat_sharp(nf), (i, t, nf)
        assert reduces(theories[n], ctx, t, nf, budget) is True, (i, t, nf)
        checked += 1
    assert checked == 200


# 9d. Homomorphisms preserve satisfaction of positive formulas.

PLAIN_THEORY = parse_theory(
    """
    theory plain {
      sort s;
      func g : s -> s;
      rel P : s;
      rel Q : s, s;
    }
    """
)


def random_plain_structure(rng: random.Random, n: int) -> PartialStructure:
    sig = PLAIN_THEORY.signature
    elems = tuple(range(n))
    g = {(e,): rng.choice(elems) for e in elems}
    p = frozenset((e,) for e in elems if rng.random() < 0.5)
    q = frozenset((a, b) for a in elems for b in elems if rng.random() < 0.4)
    return PartialStructure(sig, {"s": elems}, {"g": g}, {"P": p, "Q": q})


def random_plain_formula(rng: random.Random, names: list[str]) -> str:
    def term() -> str:
        t = rng.choice(names)
        for _ in range(rng.randint(0, 2)):
            t = f"g({t})"
        return t

    atoms = []
    for _ in range(rng.randint(1, 3)):
        kind = rng.choice(["P", "Q", "eq", "def"])
        if kind == "P":
            atoms.append(f"P({term()})")
        elif kind == "Q":
            atoms.append(f"Q({term()}, {term()})")
        elif kind == "eq":
            atoms.append(f"{term()} = {term()}")
        else:
            atoms.append(f"{term()} !")
    return " & ".join(atoms)


def test_a09d_homs_preserve_horn_satisfaction():
    rng = random.Random(551)
    sig = PLAIN_THEORY.signature
    point = PartialStructure(
        sig, {"s": (0,)}, {"g": {(0,): 0}}, {"P": frozenset({(0,)}), "Q": frozenset({(0, 0)})}
    )
    pool = [random_plain_structure(rng, rng.randint(1, 3)) for _ in range(9)] + [point]
    cases = 0
    for _ in range(5000):
        if cases >= 200:
            break
        A, B = rng.choice(pool), rng.choice(pool)
        homs = enumerate_homs(A, B)
        if not homs:
            continue
        h = rng.choice(homs)
        names = ["x", "y"][: rng.randint(1, 2)]
        phi = parse_formula(sig, random_plain_formula(rng, names))
        asg = {v: rng.choice(A.carriers["s"]) for v in names}
        if not holds(A, asg, phi):
            continue
        assert holds(B, {v: h.mapping[e] for v, e in asg.items()}, phi), (phi, asg)
        cases += 1
    assert cases >= 200


# 9e. The bundled example runner is deterministic across processes:
#     three fresh runs emit byte-identical JSON, every record PASS.


def test_a09e_example_runner_byte_identical(corpus):
    cmd = [
        sys.executable,
        "-m",
        "partialhorn.cli",
        "examples",
        "--format",
        "json",
        "--corpus",
        str(corpus),
    ]
    outputs = []
    for _ in range(3):
        proc = subprocess.run(cmd, capture_output=True, timeout=600)
        assert proc.returncode == 0, proc.stderr.decode()
        outputs.append(proc.stdout)
    assert outputs[0] == outputs[1] == outputs[2]
    records = json.loads(outputs[0])["result"]["records"]
    assert len(records) == 26
    assert all(r["status"] == "PASS" for r in records)
