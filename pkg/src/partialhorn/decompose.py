"""Canonical regular decompositions of model homomorphisms.

A scale is a family of labeled formulas-in-context.  One canonical step
along a scale factors f : A -> X through the quotient A -> A' that
forces every scale instance already true at the image, freely completed
by the chase.  Iterating until a step changes nothing yields the
canonical decomposition; the number of non-identity steps is the
decomposition number of f along the scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .chase import (
    BUDGET_EXCEEDED,
    COMPLETE,
    AssignmentItems,
    ChaseBudget,
    ChaseResult,
    Presentation,
    chase,
    induced_hom,
)
from .structure import Hom, PartialStructure, compose_hom, holds, is_hom
from .syntax import (
    Atom,
    Context,
    Eq,
    HornFormula,
    Signature,
    Theory,
    TokenStream,
    Var,
    _parse_formula,
    check_context,
    check_formula,
    formula_to_text,
)

STABILIZED = "Stabilized"
NOT_STABILIZED = "NotStabilized"


@dataclass(frozen=True)
class ScaleEntry:
    label: str
    context: Context
    formula: HornFormula


@dataclass(frozen=True)
class Scale:
    name: str
    entries: tuple[ScaleEntry, ...]


def equational_scale(sig: Signature) -> Scale:
    """One entry per sort: the bare equation between two generic elements."""
    entries = tuple(
        ScaleEntry(
            f"eq:{s}",
            Context((("z1", s), ("z2", s))),
            HornFormula((Eq(Var("z1"), Var("z2")),)),
        )
        for s in sig.sorts
    )
    return Scale("equational", entries)


@dataclass(frozen=True)
class StepResult:
    e: Hom
    f_prime: Optional[Hom]  # None when the chase ran out of budget
    result: ChaseResult
    fired: tuple[tuple[str, AssignmentItems], ...]


def scale_step(
    theory: Theory, scale: Scale, f: Hom, budget: Optional[ChaseBudget] = None
) -> StepResult:
    """One canonical step: force every scale instance true at the image."""
    A, X = f.source, f.target
    fired: list[tuple[str, AssignmentItems]] = []
    forced: list[tuple[Atom, AssignmentItems]] = []
    for entry in scale.entries:
        names = entry.context.names()
        pools = [A.carriers.get(s, ()) for _, s in entry.context.vars]
        for combo in itertools.product(*pools):
            u = dict(zip(names, combo))
            image = {n: f.mapping[v] for n, v in u.items()}
            if holds(X, image, entry.formula):
                items = tuple(zip(names, combo))
                fired.append((entry.label, items))
                for atom in entry.formula.atoms:
                    forced.append((atom, items))
    result = chase(theory, Presentation(A, tuple(forced)), budget)
    e = Hom(A, result.model, {a: result.quotient[a] for a in A.elements()})
    if result.status != COMPLETE:
        return StepResult(e, None, result, tuple(fired))
    f_prime = induced_hom(result, f.mapping, X)
    for h, tag in ((e, "quotient"), (f_prime, "mediating")):
        rep = is_hom(h)
        if not rep:
            raise RuntimeError(f"{tag} leg is not a homomorphism: {rep.reason}")
    if compose_hom(f_prime, e).mapping != f.mapping:
        raise RuntimeError("canonical step does not factor the given map")
    return StepResult(e, f_prime, result, tuple(fired))


@dataclass(frozen=True)
class DecompositionTrace:
    steps: tuple[StepResult, ...]
    stabilization_index: Optional[int]
    claimed_decnum: Optional[int]
    status: str


def _is_identity_step(step: StepResult, source: PartialStructure) -> bool:
    return step.result.model == source and all(v == k for k, v in step.e.mapping.items())


def canonical_decomposition(
    theory: Theory,
    scale: Scale,
    f: Hom,
    budget: Optional[ChaseBudget] = None,
    max_steps: int = 64,
) -> DecompositionTrace:
    """Iterate canonical steps until one changes nothing (not appended)."""
    steps: list[StepResult] = []
    current = f
    for _ in range(max_steps):
        step = scale_step(theory, scale, current, budget)
        if step.result.status != COMPLETE:
            return DecompositionTrace(tuple(steps), None, None, BUDGET_EXCEEDED)
        if _is_identity_step(step, current.source):
            n = len(steps)
            return DecompositionTrace(tuple(steps), n, n, STABILIZED)
        steps.append(step)
        current = step.f_prime
    return DecompositionTrace(tuple(steps), None, None, NOT_STABILIZED)


def decnum(
    theory: Theory,
    scale: Scale,
    f: Hom,
    budget: Optional[ChaseBudget] = None,
    max_steps: int = 64,
) -> Optional[int]:
    return canonical_decomposition(theory, scale, f, budget, max_steps).claimed_decnum


@dataclass(frozen=True)
class ImageFactorization:
    strong_epi: Hom
    mono: Hom
    trace: DecompositionTrace


def image_factorization(
    theory: Theory, f: Hom, budget: Optional[ChaseBudget] = None, max_steps: int = 64
) -> ImageFactorization:
    """Strong epi / mono factorization along the equational scale."""
    trace = canonical_decomposition(theory, equational_scale(f.source.signature), f, budget, max_steps)
    if trace.status != STABILIZED:
        raise RuntimeError(f"decomposition did not stabilize: {trace.status}")
    epi = Hom(f.source, f.source, {e: e for e in f.source.elements()})
    for step in trace.steps:
        epi = compose_hom(step.e, epi)
    mono = trace.steps[-1].f_prime if trace.steps else f
    epi = Hom(f.source, mono.source, epi.mapping)
    if len(set(mono.mapping.values())) != len(mono.mapping):
        raise RuntimeError("final leg of a stabilized equational decomposition must be injective")
    if compose_hom(mono, epi).mapping != f.mapping:
        raise RuntimeError("factorization does not compose to the given map")
    return ImageFactorization(epi, mono, trace)


# ---------------------------------------------------------------------------
# Scale files


def parse_scale(text: str, sig: Signature) -> Scale:
    """``scale NAME { entry LABEL [ctx] formula; ... }`` (labels may contain ':')."""
    ts = TokenStream(text)
    ts.expect("scale")
    name = ts.expect_ident().text
    ts.expect("{")
    entries: list[ScaleEntry] = []
    while not ts.at("}"):
        ts.expect("entry")
        label = ts.expect_ident().text
        while ts.at(":"):
            ts.next()
            label += ":" + ts.expect_ident().text
        ts.expect("[")
        pairs: list[tuple[str, str]] = []
        if not ts.at("]"):
            while True:
                vname = ts.expect_ident().text
                ts.expect(":")
                vsort = ts.expect_ident().text
                pairs.append((vname, vsort))
                if ts.at(","):
                    ts.next()
                    continue
                break
        ts.expect("]")
        ctx = Context(tuple(pairs))
        phi = _parse_formula(ts, sig)
        ts.expect(";")
        check_context(sig, ctx)
        check_formula(sig, ctx, phi)
        entries.append(ScaleEntry(label, ctx, phi))
    ts.expect("}")
    ts.expect_eof()
    return Scale(name, tuple(entries))


def scale_to_text(scale: Scale) -> str:
    lines = [f"scale {scale.name} {{"]
    for entry in scale.entries:
        ctx = ", ".join(f"{n}: {s}" for n, s in entry.context.vars)
        lines.append(f"  entry {entry.label} [{ctx}] {formula_to_text(entry.formula)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
