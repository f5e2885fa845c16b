"""Deterministic saturation of partial structures under Horn sequents.

From a presentation (a finite base structure plus forced ground atoms)
the chase freely completes the structure to a model of the theory:
premises are matched, conclusion subterms are materialized with fresh
strictly-increasing ids, and equations merge elements through a
least-id union-find kept congruence-closed.  Everything fires in a
fixed order (sequents by declaration, assignments lexicographically in
canonical ids), so results are bit-for-bit reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

from .structure import Hom, PartialStructure
from .syntax import (
    Atom,
    Context,
    Def,
    Eq,
    HornFormula,
    RawTerm,
    Rel,
    Sequent,
    Signature,
    Theory,
    Var,
    free_vars,
    normalized,
)

COMPLETE = "Complete"
BUDGET_EXCEEDED = "BudgetExceeded"
STOPPED = "Stopped"

AssignmentItems = tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class ChaseBudget:
    max_elements: int = 10000
    max_rounds: int = 1000


@dataclass(frozen=True)
class Presentation:
    """Base structure plus ground atoms (atom + base-id assignment) to force."""

    base: PartialStructure
    forced: tuple[tuple[Atom, AssignmentItems], ...] = ()


@dataclass(frozen=True)
class FreshEntry:
    """A fresh element: value of func at args (ids at creation time)."""

    elem: int
    func: str
    args: tuple[int, ...]
    term: RawTerm
    assignment: AssignmentItems


@dataclass(frozen=True)
class ChaseResult:
    model: PartialStructure
    quotient: dict[int, int]  # every id ever created -> canonical id
    fresh_log: tuple[FreshEntry, ...]
    status: str
    rounds: int
    merges: int


class _Budget(Exception):
    pass


class _ChaseState:
    def __init__(self, sig: Signature, budget: ChaseBudget) -> None:
        self.sig = sig
        self.budget = budget
        self.sort_of: dict[int, str] = {}
        self.live: set[int] = set()
        self.parent: dict[int, int] = {}
        self.funcs: dict[str, dict[tuple[int, ...], int]] = {f.name: {} for f in sig.funcs}
        self.rels: dict[str, set[tuple[int, ...]]] = {r.name: set() for r in sig.rels}
        self.next_id = 0
        self.created = 0
        self.version = 0
        self.merges = 0
        self.fresh_log: list[FreshEntry] = []

    # -- union-find (least id is the representative)

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        lo, hi = min(ra, rb), max(ra, rb)
        self.parent[hi] = lo
        self.live.discard(hi)
        self.merges += 1
        self.version += 1

    # -- elements

    def register(self, elem: int, sort: str) -> None:
        if self.created + 1 > self.budget.max_elements:
            raise _Budget
        self.sort_of[elem] = sort
        self.parent[elem] = elem
        self.live.add(elem)
        self.created += 1
        self.next_id = max(self.next_id, elem + 1)

    def add_element(self, sort: str) -> int:
        elem = self.next_id
        self.register(elem, sort)
        self.version += 1
        return elem

    def load(self, base: PartialStructure) -> None:
        for s in self.sig.sorts:
            for e in base.carriers.get(s, ()):
                self.register(e, s)
        for f, table in base.funcs.items():
            self.funcs[f] = dict(table)
        for r, tuples in base.rels.items():
            self.rels[r] = set(tuples)

    def carrier(self, sort: str) -> list[int]:
        return sorted(e for e in self.live if self.sort_of[e] == sort)

    # -- congruence closure: keep tables keyed by canonical ids

    def normalize(self) -> None:
        changed = True
        while changed:
            changed = False
            for f in self.funcs:
                rebuilt: dict[tuple[int, ...], int] = {}
                for args, val in sorted(self.funcs[f].items()):
                    cargs = tuple(self.find(a) for a in args)
                    cval = self.find(val)
                    old = rebuilt.get(cargs)
                    if old is None:
                        rebuilt[cargs] = cval
                    elif old != cval:
                        self.union(old, cval)
                        rebuilt[cargs] = self.find(cval)
                        changed = True
                self.funcs[f] = rebuilt
            for r in self.rels:
                self.rels[r] = {tuple(self.find(a) for a in tup) for tup in self.rels[r]}

    # -- evaluation / materialization

    def eval(self, term: RawTerm, asg: Mapping[str, int]) -> Optional[int]:
        if isinstance(term, Var):
            return self.find(asg[term.name])
        vals: list[int] = []
        for a in term.args:
            v = self.eval(a, asg)
            if v is None:
                return None
            vals.append(v)
        got = self.funcs[term.func].get(tuple(vals))
        return None if got is None else self.find(got)

    def materialize(self, term: RawTerm, asg: Mapping[str, int], items: AssignmentItems) -> int:
        if isinstance(term, Var):
            return self.find(asg[term.name])
        vals = tuple(self.materialize(a, asg, items) for a in term.args)
        got = self.funcs[term.func].get(vals)
        if got is not None:
            return self.find(got)
        fresh = self.add_element(self.sig.func(term.func).result_sort)
        self.funcs[term.func][vals] = fresh
        self.fresh_log.append(FreshEntry(fresh, term.func, vals, term, items))
        return fresh

    def enforce(self, atom: Atom, items: AssignmentItems) -> None:
        asg = {n: self.find(i) for n, i in items}
        if isinstance(atom, Def):
            self.materialize(atom.term, asg, items)
        elif isinstance(atom, Eq):
            l = self.materialize(atom.lhs, asg, items)
            r = self.materialize(atom.rhs, asg, items)
            if l != r:
                self.union(l, r)
                self.normalize()
        else:
            vals = tuple(self.find(self.materialize(a, asg, items)) for a in atom.args)
            if vals not in self.rels[atom.rel]:
                self.rels[atom.rel].add(vals)
                self.version += 1

    def holds_atom(self, atom: Atom, asg: Mapping[str, int]) -> bool:
        if isinstance(atom, Eq):
            l = self.eval(atom.lhs, asg)
            return l is not None and l == self.eval(atom.rhs, asg)
        if isinstance(atom, Rel):
            vals: list[int] = []
            for a in atom.args:
                v = self.eval(a, asg)
                if v is None:
                    return False
                vals.append(v)
            return tuple(vals) in self.rels[atom.rel]
        return self.eval(atom.term, asg) is not None

    # -- premise matching (join-based, lexicographic output)

    def match_premise(self, seq: Sequent) -> list[AssignmentItems]:
        sorts = dict(seq.context.vars)
        partials: list[dict[str, int]] = [{}]
        for atom in normalized(seq.premise).atoms:
            nxt: list[dict[str, int]] = []
            for asg in partials:
                nxt.extend(self._extend(atom, asg, sorts))
            partials = nxt
            if not partials:
                break
        names = seq.context.names()
        results: set[tuple[int, ...]] = set()
        for asg in partials:
            missing = [n for n in names if n not in asg]
            pools = [self.carrier(sorts[n]) for n in missing]
            for combo in itertools.product(*pools):
                full = dict(asg)
                full.update(zip(missing, combo))
                results.add(tuple(full[n] for n in names))
        return [tuple(zip(names, tup)) for tup in sorted(results)]

    def _extend(self, atom: Atom, asg: dict[str, int], sorts: Mapping[str, str]) -> list[dict[str, int]]:
        if isinstance(atom, Eq):
            ul = [v for v in free_vars(atom.lhs) if v not in asg]
            ur = [v for v in free_vars(atom.rhs) if v not in asg]
            if not ul and not ur:
                return [asg] if self.holds_atom(atom, asg) else []
            if not ul and len(ur) == 1:
                return self._match_eq_bound(atom.lhs, atom.rhs, ur[0], asg, sorts)
            if not ur and len(ul) == 1:
                return self._match_eq_bound(atom.rhs, atom.lhs, ul[0], asg, sorts)
            if ul == ur and len(ul) == 1:
                out = []
                for c in self.carrier(sorts[ul[0]]):
                    ext = dict(asg)
                    ext[ul[0]] = c
                    if self.holds_atom(atom, ext):
                        out.append(ext)
                return out
            if len(ul) == 1 and len(ur) == 1:
                return self._match_eq_join(atom.lhs, ul[0], atom.rhs, ur[0], asg, sorts)
            return self._match_fallback(atom, asg, sorts)
        if isinstance(atom, Rel):
            simple = all(
                (isinstance(a, Var) and a.name not in asg) or not [v for v in free_vars(a) if v not in asg]
                for a in atom.args
            )
            if not simple:
                return self._match_fallback(atom, asg, sorts)
            out = []
            for tup in sorted(self.rels[atom.rel]):
                ext: dict[str, int] = dict(asg)
                ok = True
                for term, tval in zip(atom.args, tup):
                    if isinstance(term, Var) and term.name not in asg:
                        if ext.get(term.name, tval) != tval:
                            ok = False
                            break
                        ext[term.name] = tval
                    else:
                        if self.eval(term, ext) != tval:
                            ok = False
                            break
                if ok:
                    out.append(ext)
            return out
        return self._match_fallback(atom, asg, sorts)  # Def is normalized away

    def _match_eq_bound(
        self,
        bound_side: RawTerm,
        open_side: RawTerm,
        var: str,
        asg: dict[str, int],
        sorts: Mapping[str, str],
    ) -> list[dict[str, int]]:
        value = self.eval(bound_side, asg)
        if value is None:
            return []
        if isinstance(open_side, Var):
            ext = dict(asg)
            ext[var] = value
            return [ext]
        out = []
        for c in self.carrier(sorts[var]):
            ext = dict(asg)
            ext[var] = c
            if self.eval(open_side, ext) == value:
                out.append(ext)
        return out

    def _match_eq_join(
        self,
        lhs: RawTerm,
        lvar: str,
        rhs: RawTerm,
        rvar: str,
        asg: dict[str, int],
        sorts: Mapping[str, str],
    ) -> list[dict[str, int]]:
        by_value: dict[int, list[int]] = {}
        for a in self.carrier(sorts[lvar]):
            ext = dict(asg)
            ext[lvar] = a
            v = self.eval(lhs, ext)
            if v is not None:
                by_value.setdefault(v, []).append(a)
        out = []
        for b in self.carrier(sorts[rvar]):
            ext = dict(asg)
            ext[rvar] = b
            v = self.eval(rhs, ext)
            if v is None:
                continue
            for a in by_value.get(v, ()):
                full = dict(asg)
                full[lvar] = a
                full[rvar] = b
                out.append(full)
        return out

    def _match_fallback(
        self, atom: Atom, asg: dict[str, int], sorts: Mapping[str, str]
    ) -> list[dict[str, int]]:
        unbound: list[str] = []
        for t in (atom.lhs, atom.rhs) if isinstance(atom, Eq) else (
            atom.args if isinstance(atom, Rel) else (atom.term,)
        ):
            for v in free_vars(t):
                if v not in asg and v not in unbound:
                    unbound.append(v)
        pools = [self.carrier(sorts[v]) for v in unbound]
        out = []
        for combo in itertools.product(*pools):
            ext = dict(asg)
            ext.update(zip(unbound, combo))
            if self.holds_atom(atom, ext):
                out.append(ext)
        return out

    # -- rounds

    def run_round(self, theory: Theory) -> bool:
        v0 = self.version
        self.normalize()
        for seq in theory.sequents:
            for items in self.match_premise(seq):
                for atom in seq.conclusion.atoms:
                    self.enforce(atom, items)
        return self.version != v0

    def snapshot(self) -> PartialStructure:
        return PartialStructure(
            self.sig,
            {s: tuple(self.carrier(s)) for s in self.sig.sorts},
            {f: dict(t) for f, t in self.funcs.items()},
            {r: frozenset(t) for r, t in self.rels.items()},
        )


def chase(
    theory: Theory,
    presentation: Presentation,
    budget: Optional[ChaseBudget] = None,
    stop: Optional[Callable[[_ChaseState], bool]] = None,
) -> ChaseResult:
    """Saturate the presentation under the theory's sequents."""
    budget = budget or ChaseBudget()
    state = _ChaseState(theory.signature, budget)
    status = COMPLETE
    rounds = 0
    try:
        state.load(presentation.base)
        for atom, items in presentation.forced:
            state.enforce(atom, items)
        state.normalize()
        if stop is not None and stop(state):
            status = STOPPED
        else:
            while True:
                if rounds >= budget.max_rounds:
                    status = BUDGET_EXCEEDED
                    break
                changed = state.run_round(theory)
                rounds += 1
                if stop is not None and stop(state):
                    status = STOPPED
                    break
                if not changed:
                    status = COMPLETE
                    break
    except _Budget:
        status = BUDGET_EXCEEDED
    model = state.snapshot()
    quotient = {i: state.find(i) for i in sorted(state.parent)}
    return ChaseResult(model, quotient, tuple(state.fresh_log), status, rounds, state.merges)


# ---------------------------------------------------------------------------
# Representing models and the bounded prover


def representing_model(
    theory: Theory,
    ctx: Context,
    phi: HornFormula,
    budget: Optional[ChaseBudget] = None,
) -> tuple[ChaseResult, dict[str, int]]:
    """Chase the generic context; the generic assignment lands in the model."""
    sig = theory.signature
    carriers: dict[str, list[int]] = {s: [] for s in sig.sorts}
    items: list[tuple[str, int]] = []
    for i, (name, sort) in enumerate(ctx.vars):
        carriers[sort].append(i)
        items.append((name, i))
    base = PartialStructure(
        sig,
        {s: tuple(es) for s, es in carriers.items()},
        {f.name: {} for f in sig.funcs},
        {r.name: frozenset() for r in sig.rels},
    )
    base_items = tuple(items)
    presentation = Presentation(base, tuple((atom, base_items) for atom in phi.atoms))
    result = chase(theory, presentation, budget)
    generic = {name: result.quotient[i] for name, i in base_items}
    return result, generic


VALID = "Valid"
INVALID = "Invalid"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ProveResult:
    verdict: str
    rounds: int
    elements: int
    merges: int


def prove_sequent(theory: Theory, seq: Sequent, budget: Optional[ChaseBudget] = None) -> ProveResult:
    """Bounded derivability: chase the premise, watch for the conclusion.

    Valid as soon as the conclusion holds at the generic assignment;
    Invalid only when the chase completes without it; Unknown on budget.
    """
    sig = theory.signature
    carriers: dict[str, list[int]] = {s: [] for s in sig.sorts}
    items: list[tuple[str, int]] = []
    for i, (name, sort) in enumerate(seq.context.vars):
        carriers[sort].append(i)
        items.append((name, i))
    base = PartialStructure(
        sig,
        {s: tuple(es) for s, es in carriers.items()},
        {f.name: {} for f in sig.funcs},
        {r.name: frozenset() for r in sig.rels},
    )
    base_items = tuple(items)
    presentation = Presentation(base, tuple((atom, base_items) for atom in seq.premise.atoms))
    conclusion = normalized(seq.conclusion)

    def stop(state: _ChaseState) -> bool:
        asg = {name: state.find(i) for name, i in base_items}
        return all(state.holds_atom(atom, asg) for atom in conclusion.atoms)

    result = chase(theory, presentation, budget, stop=stop)
    if result.status == STOPPED:
        verdict = VALID
    elif result.status == COMPLETE:
        verdict = INVALID
    else:
        verdict = UNKNOWN
    return ProveResult(verdict, result.rounds, result.model.size(), result.merges)


def reduces(
    theory: Theory,
    ctx: Context,
    sigma: RawTerm,
    tau: RawTerm,
    budget: Optional[ChaseBudget] = None,
) -> Optional[bool]:
    """sigma reduces to tau: defined sigma forces sigma = tau (None on budget)."""
    seq = Sequent(ctx, HornFormula((Def(sigma),)), HornFormula((Eq(sigma, tau),)), label="reduces")
    res = prove_sequent(theory, seq, budget)
    if res.verdict == VALID:
        return True
    if res.verdict == INVALID:
        return False
    return None


def term_equivalent(
    theory: Theory,
    ctx: Context,
    sigma: RawTerm,
    tau: RawTerm,
    budget: Optional[ChaseBudget] = None,
) -> Optional[bool]:
    a = reduces(theory, ctx, sigma, tau, budget)
    b = reduces(theory, ctx, tau, sigma, budget)
    if a is None or b is None:
        return None
    return a and b


# ---------------------------------------------------------------------------
# Quotients with a universal property


def coequalizer(
    theory: Theory, f: Hom, g: Hom, budget: Optional[ChaseBudget] = None
) -> tuple[ChaseResult, Hom]:
    """Coequalizer of f, g : A -> B in models: force f(a) = g(a), chase."""
    if f.source != g.source or f.target != g.target:
        raise ValueError("parallel pair required")
    B = f.target
    forced = tuple(
        (Eq(Var("u"), Var("v")), (("u", f.mapping[a]), ("v", g.mapping[a])))
        for a in sorted(f.mapping)
    )
    result = chase(theory, Presentation(B, forced), budget)
    q = Hom(B, result.model, {b: result.quotient[b] for b in B.elements()})
    return result, q


def induced_hom(result: ChaseResult, base_map: Mapping[int, int], target: PartialStructure) -> Hom:
    """Extend a base-id map along the chase: old classes take the base
    value (must be constant on classes), fresh classes evaluate their
    creating function entry in the target (must be defined)."""
    values: dict[int, int] = {}
    for b, t in sorted(base_map.items()):
        c = result.quotient[b]
        if values.setdefault(c, t) != t:
            raise ValueError(f"map not constant on the class of {b}")
    for entry in result.fresh_log:
        c = result.quotient[entry.elem]
        targs = tuple(values[result.quotient[a]] for a in entry.args)
        v = target.funcs.get(entry.func, {}).get(targs)
        if v is None:
            raise ValueError(f"{entry.func}{targs} undefined in the target")
        if values.setdefault(c, v) != v:
            raise ValueError(f"inconsistent values on class {c}")
    return Hom(result.model, target, {e: values[e] for e in result.model.elements()})
