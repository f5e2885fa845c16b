"""Gauges: per-term complexity measures with certified defining sets.

A gauge assigns every term a natural number (its sharp) and a defining
set of scale instances on strictly simpler terms such that the term is
defined exactly when all instances hold.  Certifying a gauge bounds the
decomposition number of every hom along the scale.  The built-in gauges
cover a four-constant ladder theory and the one-sorted theory of strict
n-categories, whose normalizer rewrites every term to an iterated
boundary of a left-associated composition chain.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence

from .chase import ChaseBudget, prove_sequent
from .decompose import Scale, equational_scale
from .syntax import (
    App,
    Atom,
    Context,
    Def,
    Eq,
    FuncDecl,
    HornFormula,
    RawTerm,
    Sequent,
    Signature,
    Theory,
    Var,
    check_term,
    parse_term,
    substitute_formula,
)


@dataclass(frozen=True)
class GaugeEntry:
    scale_label: str
    args: tuple[RawTerm, ...]


class GaugeRules:
    """Sharp measure plus defining sets against a scale for a theory."""

    theory: Theory
    scale: Scale

    def sharp(self, term: RawTerm) -> int:
        raise NotImplementedError

    def defining_set(self, ctx: Context, term: RawTerm) -> tuple[GaugeEntry, ...]:
        raise NotImplementedError


class TableGaugeRules(GaugeRules):
    """Data-driven rules: base sharps per symbol, defining sets per symbol."""

    def __init__(
        self,
        theory: Theory,
        sharps: dict[str, int],
        defining: dict[str, tuple[GaugeEntry, ...]],
        scale: Optional[Scale] = None,
    ) -> None:
        self.theory = theory
        self.scale = scale if scale is not None else equational_scale(theory.signature)
        self.sharps = dict(sharps)
        self.defining = dict(defining)

    def sharp(self, term: RawTerm) -> int:
        if isinstance(term, Var):
            return 0
        return max([self.sharps.get(term.func, 0)] + [self.sharp(a) for a in term.args])

    def defining_set(self, ctx: Context, term: RawTerm) -> tuple[GaugeEntry, ...]:
        if isinstance(term, Var):
            return ()
        out: list[GaugeEntry] = []
        for a in term.args:
            for entry in self.defining_set(ctx, a):
                if entry not in out:
                    out.append(entry)
        for entry in self.defining.get(term.func, ()):
            if entry not in out:
                out.append(entry)
        return tuple(out)


def load_gauge_rules(path: str, theory: Theory) -> TableGaugeRules:
    """JSON rules: {"sharp": {sym: n}, "defining": {sym: [{"scale": label, "args": [term]}]}}."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    sharps = {str(k): int(v) for k, v in data.get("sharp", {}).items()}
    defining: dict[str, tuple[GaugeEntry, ...]] = {}
    for sym, entries in data.get("defining", {}).items():
        defining[sym] = tuple(
            GaugeEntry(e["scale"], tuple(parse_term(theory.signature, t) for t in e["args"]))
            for e in entries
        )
    return TableGaugeRules(theory, sharps, defining)


# ---------------------------------------------------------------------------
# Certification


@dataclass(frozen=True)
class GaugeRow:
    term: RawTerm
    sharp: int
    entries: tuple[GaugeEntry, ...]
    sharp_ok: bool
    forward: str
    backward: str

    @property
    def ok(self) -> bool:
        return self.sharp_ok and self.forward == "Valid" and self.backward == "Valid"


@dataclass(frozen=True)
class GaugeCertificate:
    term: RawTerm
    rows: tuple[GaugeRow, ...]
    certified: bool
    bound: int  # decomposition numbers of homs over this gauge stay <= bound
    global_bound: int


def _defining_formula(rules: GaugeRules, entries: Sequence[GaugeEntry]) -> HornFormula:
    atoms: list[Atom] = []
    by_label = {e.label: e for e in rules.scale.entries}
    for entry in entries:
        scale_entry = by_label[entry.scale_label]
        mapping = dict(zip(scale_entry.context.names(), entry.args))
        for atom in substitute_formula(scale_entry.formula, mapping).atoms:
            if atom not in atoms:
                atoms.append(atom)
        for arg in entry.args:
            d = Def(arg)
            if d not in atoms:
                atoms.append(d)
    return HornFormula(tuple(atoms))


def check_gauge(
    rules: GaugeRules,
    ctx: Context,
    term: RawTerm,
    budget: Optional[ChaseBudget] = None,
) -> GaugeCertificate:
    """Certify the gauge at a term and, transitively, at its defining args.

    Each row re-proves the bisequent: the term is defined iff all its
    defining instances hold and their arguments are defined.
    """
    rows: list[GaugeRow] = []
    seen: list[RawTerm] = []
    queue: list[RawTerm] = [term]
    while queue:
        tau = queue.pop(0)
        if tau in seen:
            continue
        seen.append(tau)
        entries = rules.defining_set(ctx, tau)
        s = rules.sharp(tau)
        sharp_ok = all(rules.sharp(a) < s for e in entries for a in e.args)
        phi = _defining_formula(rules, entries)
        fwd = prove_sequent(
            rules.theory, Sequent(ctx, HornFormula((Def(tau),)), phi, label="gauge.fwd"), budget
        )
        bwd = prove_sequent(
            rules.theory, Sequent(ctx, phi, HornFormula((Def(tau),)), label="gauge.bwd"), budget
        )
        rows.append(GaugeRow(tau, s, entries, sharp_ok, fwd.verdict, bwd.verdict))
        for e in entries:
            for a in e.args:
                if a not in seen and a not in queue:
                    queue.append(a)
    certified = all(r.ok for r in rows)
    bound = rules.sharp(term) + 1
    return GaugeCertificate(term, tuple(rows), certified, bound, bound + 1)


def enumerate_terms(sig: Signature, ctx: Context, depth: int) -> list[RawTerm]:
    """All terms over the context up to the given application depth."""
    seen: list[RawTerm] = [Var(n) for n, _ in ctx.vars]
    sort_of: dict[RawTerm, str] = {t: check_term(sig, ctx, t) for t in seen}
    for _ in range(depth):
        new: list[RawTerm] = []
        for f in sig.funcs:
            pools = [[t for t in seen if sort_of[t] == s] for s in f.arg_sorts]
            for combo in itertools.product(*pools):
                t = App(f.name, tuple(combo))
                if t not in sort_of:
                    sort_of[t] = f.result_sort
                    new.append(t)
        seen.extend(new)
        if not new:
            break
    return seen


# ---------------------------------------------------------------------------
# Built-in: the ladder theory (four constants, conditional definedness)


def ladder_theory() -> Theory:
    """a, b total; c defined iff a = b; d defined iff a = c."""
    sig = Signature(
        ("s",),
        tuple(FuncDecl(x, (), "s") for x in ("a", "b", "c", "d")),
    )
    a, b, c, d = (App(x, ()) for x in ("a", "b", "c", "d"))
    empty = Context(())
    seqs = (
        Sequent(empty, HornFormula(()), HornFormula((Eq(a, a), Eq(b, b))), label="ax1"),
        Sequent(empty, HornFormula((Eq(a, b),)), HornFormula((Eq(c, c),)), label="ax2.fwd"),
        Sequent(empty, HornFormula((Eq(c, c),)), HornFormula((Eq(a, b),)), label="ax2.bwd"),
        Sequent(empty, HornFormula((Eq(a, c),)), HornFormula((Eq(d, d),)), label="ax3.fwd"),
        Sequent(empty, HornFormula((Eq(d, d),)), HornFormula((Eq(a, c),)), label="ax3.bwd"),
    )
    return Theory("ladder", sig, seqs)


def ladder_gauge_rules() -> TableGaugeRules:
    theory = ladder_theory()
    a, b, c = App("a", ()), App("b", ()), App("c", ())
    return TableGaugeRules(
        theory,
        sharps={"a": 0, "b": 0, "c": 1, "d": 2},
        defining={
            "c": (GaugeEntry("eq:s", (a, b)),),
            "d": (GaugeEntry("eq:s", (a, c)),),
        },
    )


# ---------------------------------------------------------------------------
# Built-in: strict n-categories, one-sorted


def ncat_theory(n: int) -> Theory:
    """One sort of cells; dk/ck boundaries and compk composition, k = 1..n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    funcs: list[FuncDecl] = []
    for k in range(1, n + 1):
        funcs.append(FuncDecl(f"d{k}", ("*",), "*"))
        funcs.append(FuncDecl(f"c{k}", ("*",), "*"))
    for k in range(1, n + 1):
        funcs.append(FuncDecl(f"comp{k}", ("*", "*"), "*"))
    sig = Signature(("*",), tuple(funcs))

    x, y, z, w = Var("x"), Var("y"), Var("z"), Var("w")
    cx = Context((("x", "*"),))
    cxy = Context((("x", "*"), ("y", "*")))
    cxyz = Context((("x", "*"), ("y", "*"), ("z", "*")))
    cxyzw = Context((("x", "*"), ("y", "*"), ("z", "*"), ("w", "*")))

    def d(k: int, t: RawTerm) -> App:
        return App(f"d{k}", (t,))

    def c(k: int, t: RawTerm) -> App:
        return App(f"c{k}", (t,))

    def cp(k: int, a: RawTerm, b: RawTerm) -> App:
        return App(f"comp{k}", (a, b))

    def chain_eq(*terms: RawTerm) -> tuple[Atom, ...]:
        return tuple(Eq(terms[i], terms[i + 1]) for i in range(len(terms) - 1))

    top = HornFormula(())
    seqs: list[Sequent] = []
    for k in range(1, n + 1):
        seqs.append(Sequent(cx, top, HornFormula(chain_eq(d(k, d(k, x)), d(k, x), c(k, d(k, x)))), label=f"idem.d{k}"))
        seqs.append(Sequent(cx, top, HornFormula(chain_eq(c(k, c(k, x)), c(k, x), d(k, c(k, x)))), label=f"idem.c{k}"))
        match = HornFormula((Eq(d(k, x), c(k, y)),))
        defined = HornFormula((Def(cp(k, x, y)),))
        seqs.append(Sequent(cxy, match, defined, label=f"comp{k}.total"))
        seqs.append(Sequent(cxy, defined, match, label=f"comp{k}.strict"))
        seqs.append(
            Sequent(
                cxy,
                match,
                HornFormula((Eq(d(k, cp(k, x, y)), d(k, y)), Eq(c(k, cp(k, x, y)), c(k, x)))),
                label=f"comp{k}.bounds",
            )
        )
        seqs.append(
            Sequent(
                cx,
                top,
                HornFormula((Eq(cp(k, x, d(k, x)), x), Eq(cp(k, c(k, x), x), x))),
                label=f"comp{k}.unit",
            )
        )
        seqs.append(
            Sequent(
                cxyz,
                HornFormula((Eq(d(k, x), c(k, y)), Eq(d(k, y), c(k, z)))),
                HornFormula((Eq(cp(k, cp(k, x, y), z), cp(k, x, cp(k, y, z))),)),
                label=f"comp{k}.assoc",
            )
        )
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            seqs.append(
                Sequent(
                    cx,
                    top,
                    HornFormula(
                        chain_eq(d(j, d(i, x)), d(i, d(j, x)), d(i, c(j, x)), c(j, d(i, x)), d(i, x))
                    ),
                    label=f"globular.d{i}.{j}",
                )
            )
            seqs.append(
                Sequent(
                    cx,
                    top,
                    HornFormula(
                        chain_eq(c(j, c(i, x)), c(i, c(j, x)), c(i, d(j, x)), d(j, c(i, x)), c(i, x))
                    ),
                    label=f"globular.c{i}.{j}",
                )
            )
            seqs.append(
                Sequent(
                    cxy,
                    HornFormula((Eq(d(i, x), c(i, y)),)),
                    HornFormula(
                        (
                            Eq(d(j, cp(i, x, y)), cp(i, d(j, x), d(j, y))),
                            Eq(c(j, cp(i, x, y)), cp(i, c(j, x), c(j, y))),
                        )
                    ),
                    label=f"whisker.{i}.{j}",
                )
            )
            seqs.append(
                Sequent(
                    cxyzw,
                    HornFormula(
                        (
                            Eq(d(i, x), c(i, y)),
                            Eq(d(i, z), c(i, w)),
                            Eq(d(j, x), c(j, z)),
                            Eq(d(j, y), c(j, w)),
                        )
                    ),
                    HornFormula(
                        (
                            Eq(
                                cp(j, cp(i, x, y), cp(i, z, w)),
                                cp(i, cp(j, x, z), cp(j, y, w)),
                            ),
                        )
                    ),
                    label=f"interchange.{i}.{j}",
                )
            )
    return Theory(f"ncat{n}", sig, tuple(seqs))


_D_RE = re.compile(r"^d([0-9]+)$")
_C_RE = re.compile(r"^c([0-9]+)$")
_COMP_RE = re.compile(r"^comp([0-9]+)$")


def _comp_level(term: RawTerm) -> Optional[int]:
    if isinstance(term, App):
        m = _COMP_RE.match(term.func)
        if m:
            return int(m.group(1))
    return None


def ncat_sharp(term: RawTerm) -> int:
    """Largest composition level occurring in the term (0 if none)."""
    if isinstance(term, Var):
        return 0
    own = 0
    m = _COMP_RE.match(term.func)
    if m:
        own = int(m.group(1))
    elif not (_D_RE.match(term.func) or _C_RE.match(term.func)):
        raise ValueError(f"not an n-category symbol: {term.func}")
    return max([own] + [ncat_sharp(a) for a in term.args])


def _chain(k: int, parts: Sequence[RawTerm]) -> RawTerm:
    return reduce(lambda acc, p: App(f"comp{k}", (acc, p)), parts)


def _flatten(k: int, term: RawTerm) -> list[RawTerm]:
    if _comp_level(term) == k:
        assert isinstance(term, App)
        return _flatten(k, term.args[0]) + [term.args[1]]
    return [term]


def _boundary_index(term: RawTerm) -> Optional[int]:
    if isinstance(term, App):
        m = _D_RE.match(term.func) or _C_RE.match(term.func)
        if m:
            return int(m.group(1))
    return None


def _norm_d(i: int, nu: RawTerm) -> RawTerm:
    if isinstance(nu, Var):
        return App(f"d{i}", (nu,))
    j = _boundary_index(nu)
    if j is not None:
        return nu if j <= i else App(f"d{i}", (nu.args[0],))
    k = _comp_level(nu)
    assert k is not None
    if i <= k:
        return _norm_d(i, _flatten(k, nu)[-1])
    return _chain(k, [_norm_d(i, c) for c in _flatten(k, nu)])


def _norm_c(i: int, nu: RawTerm) -> RawTerm:
    if isinstance(nu, Var):
        return App(f"c{i}", (nu,))
    j = _boundary_index(nu)
    if j is not None:
        return nu if j <= i else App(f"c{i}", (nu.args[0],))
    k = _comp_level(nu)
    assert k is not None
    if i <= k:
        return _norm_c(i, _flatten(k, nu)[0])
    return _chain(k, [_norm_c(i, c) for c in _flatten(k, nu)])


def _norm_comp(i: int, nu1: RawTerm, nu2: RawTerm) -> RawTerm:
    k1, k2 = ncat_sharp(nu1), ncat_sharp(nu2)
    m = max(k1, k2)
    if m < i:
        return _chain(i, [nu1, nu2])
    if m == i:
        return _chain(i, _flatten(i, nu1) + _flatten(i, nu2))
    if k1 >= k2:
        comps = _flatten(k1, nu1)
        rho = _norm_d(k1, nu2)
        parts = [_norm_comp(i, comps[0], nu2)] + [_norm_comp(i, c, rho) for c in comps[1:]]
    else:
        comps = _flatten(k2, nu2)
        rho = _norm_c(k2, nu1)
        parts = [_norm_comp(i, rho, c) for c in comps[:-1]] + [_norm_comp(i, nu1, comps[-1])]
    flat: list[RawTerm] = []
    for p in parts:
        flat.extend(_flatten(m, p))
    return _chain(m, flat)


def ncat_normalize(n: int, ctx: Context, term: RawTerm) -> RawTerm:
    """Rewrite a term to normal form under the n-category axioms.

    Normal terms are variables, boundaries of variables, or
    left-associated compk chains of normal components of lower sharp.
    Composites are assumed well-formed; normalization is purely
    syntactic and is justified by the boundary, unit, associativity,
    and interchange axioms.
    """
    check_term(ncat_theory(n).signature, ctx, term)
    return _normalize(term)


def _normalize(term: RawTerm) -> RawTerm:
    if isinstance(term, Var):
        return term
    j = _boundary_index(term)
    if j is not None:
        inner = _normalize(term.args[0])
        if _D_RE.match(term.func):
            return _norm_d(j, inner)
        return _norm_c(j, inner)
    k = _comp_level(term)
    if k is None:
        raise ValueError(f"not an n-category symbol: {term.func}")
    return _norm_comp(k, _normalize(term.args[0]), _normalize(term.args[1]))


def ncat_is_normal(term: RawTerm) -> bool:
    """Independent checker for the normal-form predicate."""
    if isinstance(term, Var):
        return True
    if _boundary_index(term) is not None:
        return isinstance(term.args[0], Var)
    k = _comp_level(term)
    if k is None:
        return False
    parts = _flatten(k, term)
    return len(parts) >= 2 and all(
        ncat_is_normal(p) and ncat_sharp(p) < k and _comp_level(p) != k for p in parts
    )


class NcatGaugeRules(GaugeRules):
    """Defining sets: each composite contributes the equation between the
    normalized boundary of its left part and co-boundary of its right part."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.theory = ncat_theory(n)
        self.scale = equational_scale(self.theory.signature)

    def sharp(self, term: RawTerm) -> int:
        return ncat_sharp(term)

    def defining_set(self, ctx: Context, term: RawTerm) -> tuple[GaugeEntry, ...]:
        if isinstance(term, Var):
            return ()
        if _boundary_index(term) is not None:
            return self.defining_set(ctx, term.args[0])
        k = _comp_level(term)
        if k is None:
            raise ValueError(f"not an n-category symbol: {term.func}")
        out: list[GaugeEntry] = []
        for part in (term.args[0], term.args[1]):
            for e in self.defining_set(ctx, part):
                if e not in out:
                    out.append(e)
        own = GaugeEntry(
            "eq:*",
            (_norm_d(k, _normalize(term.args[0])), _norm_c(k, _normalize(term.args[1]))),
        )
        if own not in out:
            out.append(own)
        return tuple(out)


def ncat_gauge_rules(n: int) -> NcatGaugeRules:
    return NcatGaugeRules(n)
