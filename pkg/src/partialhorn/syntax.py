"""Syntax for finitary partial Horn theories.

Multi-sorted signatures of partial function symbols and relation symbols,
raw terms, Horn formulas (finite conjunctions of atoms), sequents in
context, theories, and the surface-syntax parser/printer.

Definedness atoms ``t !`` are kept as their own atom kind for printing
fidelity and normalized to ``t = t`` before any semantic use.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Mapping, Union


class ParseError(Exception):
    """Surface-syntax error with 1-based line/column."""

    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class SortError(Exception):
    """Ill-sorted term, formula, or declaration."""


# ---------------------------------------------------------------------------
# Abstract syntax


@dataclass(frozen=True)
class FuncDecl:
    name: str
    arg_sorts: tuple[str, ...]
    result_sort: str


@dataclass(frozen=True)
class RelDecl:
    name: str
    arg_sorts: tuple[str, ...]


@dataclass(frozen=True)
class Signature:
    sorts: tuple[str, ...]
    funcs: tuple[FuncDecl, ...] = ()
    rels: tuple[RelDecl, ...] = ()

    def func(self, name: str) -> FuncDecl:
        for f in self.funcs:
            if f.name == name:
                return f
        raise SortError(f"undeclared function symbol {name!r}")

    def rel(self, name: str) -> RelDecl:
        for r in self.rels:
            if r.name == name:
                return r
        raise SortError(f"undeclared relation symbol {name!r}")

    def has_func(self, name: str) -> bool:
        return any(f.name == name for f in self.funcs)

    def has_rel(self, name: str) -> bool:
        return any(r.name == name for r in self.rels)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    func: str
    args: tuple["RawTerm", ...] = ()


RawTerm = Union[Var, App]


@dataclass(frozen=True)
class Eq:
    lhs: RawTerm
    rhs: RawTerm


@dataclass(frozen=True)
class Rel:
    rel: str
    args: tuple[RawTerm, ...]


@dataclass(frozen=True)
class Def:
    term: RawTerm


Atom = Union[Eq, Rel, Def]


@dataclass(frozen=True)
class HornFormula:
    """Finite conjunction of atoms; the empty conjunction is truth."""

    atoms: tuple[Atom, ...] = ()


TOP = HornFormula(())


@dataclass(frozen=True)
class Context:
    """Tuple of distinct typed variables (name, sort)."""

    vars: tuple[tuple[str, str], ...] = ()

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.vars)

    def sort_of(self, name: str) -> str:
        for n, s in self.vars:
            if n == name:
                return s
        raise SortError(f"variable {name!r} not in context")


@dataclass(frozen=True)
class Sequent:
    context: Context
    premise: HornFormula
    conclusion: HornFormula
    label: str = ""


@dataclass(frozen=True)
class Theory:
    name: str
    signature: Signature
    sequents: tuple[Sequent, ...]


# ---------------------------------------------------------------------------
# Structural helpers


def desugar_atom(atom: Atom) -> Union[Eq, Rel]:
    """Normalize a definedness atom t! to t = t."""
    if isinstance(atom, Def):
        return Eq(atom.term, atom.term)
    return atom


def normalized(phi: HornFormula) -> HornFormula:
    return HornFormula(tuple(desugar_atom(a) for a in phi.atoms))


def free_vars(term: RawTerm) -> tuple[str, ...]:
    """Variables of a term in first-occurrence order."""
    out: list[str] = []

    def walk(t: RawTerm) -> None:
        if isinstance(t, Var):
            if t.name not in out:
                out.append(t.name)
        else:
            for a in t.args:
                walk(a)

    walk(term)
    return tuple(out)


def free_vars_formula(phi: HornFormula) -> tuple[str, ...]:
    out: list[str] = []
    for atom in phi.atoms:
        for t in atom_terms(atom):
            for v in free_vars(t):
                if v not in out:
                    out.append(v)
    return tuple(out)


def atom_terms(atom: Atom) -> tuple[RawTerm, ...]:
    if isinstance(atom, Eq):
        return (atom.lhs, atom.rhs)
    if isinstance(atom, Def):
        return (atom.term,)
    return atom.args


def substitute(term: RawTerm, mapping: Mapping[str, RawTerm]) -> RawTerm:
    if isinstance(term, Var):
        return mapping.get(term.name, term)
    return App(term.func, tuple(substitute(a, mapping) for a in term.args))


def substitute_atom(atom: Atom, mapping: Mapping[str, RawTerm]) -> Atom:
    if isinstance(atom, Eq):
        return Eq(substitute(atom.lhs, mapping), substitute(atom.rhs, mapping))
    if isinstance(atom, Def):
        return Def(substitute(atom.term, mapping))
    return Rel(atom.rel, tuple(substitute(a, mapping) for a in atom.args))


def substitute_formula(phi: HornFormula, mapping: Mapping[str, RawTerm]) -> HornFormula:
    return HornFormula(tuple(substitute_atom(a, mapping) for a in phi.atoms))


# ---------------------------------------------------------------------------
# Sort checking


def check_term(sig: Signature, ctx: Context, term: RawTerm) -> str:
    """Return the sort of a well-sorted term; raise SortError otherwise."""
    if isinstance(term, Var):
        return ctx.sort_of(term.name)
    decl = sig.func(term.func)
    if len(term.args) != len(decl.arg_sorts):
        raise SortError(
            f"{term.func} expects {len(decl.arg_sorts)} arguments, got {len(term.args)}"
        )
    for arg, want in zip(term.args, decl.arg_sorts):
        got = check_term(sig, ctx, arg)
        if got != want:
            raise SortError(f"argument of {term.func}: expected {want}, got {got}")
    return decl.result_sort


def check_atom(sig: Signature, ctx: Context, atom: Atom) -> None:
    if isinstance(atom, Eq):
        ls = check_term(sig, ctx, atom.lhs)
        rs = check_term(sig, ctx, atom.rhs)
        if ls != rs:
            raise SortError(f"equation between sorts {ls} and {rs}")
    elif isinstance(atom, Def):
        check_term(sig, ctx, atom.term)
    else:
        decl = sig.rel(atom.rel)
        if len(atom.args) != len(decl.arg_sorts):
            raise SortError(
                f"{atom.rel} expects {len(decl.arg_sorts)} arguments, got {len(atom.args)}"
            )
        for arg, want in zip(atom.args, decl.arg_sorts):
            got = check_term(sig, ctx, arg)
            if got != want:
                raise SortError(f"argument of {atom.rel}: expected {want}, got {got}")


def check_formula(sig: Signature, ctx: Context, phi: HornFormula) -> None:
    for atom in phi.atoms:
        check_atom(sig, ctx, atom)


def check_context(sig: Signature, ctx: Context) -> None:
    seen: set[str] = set()
    for name, sort in ctx.vars:
        if name in seen:
            raise SortError(f"duplicate context variable {name!r}")
        if sig.has_func(name):
            raise SortError(f"context variable {name!r} shadows a function symbol")
        if sort not in sig.sorts:
            raise SortError(f"undeclared sort {sort!r}")
        seen.add(name)


def check_sequent(sig: Signature, seq: Sequent) -> None:
    check_context(sig, seq.context)
    check_formula(sig, seq.context, seq.premise)
    check_formula(sig, seq.context, seq.conclusion)


def check_theory(theory: Theory) -> None:
    sig = theory.signature
    seen: set[str] = set()
    for s in sig.sorts:
        if s in seen:
            raise SortError(f"duplicate sort {s!r}")
        seen.add(s)
    for f in sig.funcs:
        for s in f.arg_sorts + (f.result_sort,):
            if s not in sig.sorts:
                raise SortError(f"function {f.name}: undeclared sort {s!r}")
    for r in sig.rels:
        for s in r.arg_sorts:
            if s not in sig.sorts:
                raise SortError(f"relation {r.name}: undeclared sort {s!r}")
    names = [f.name for f in sig.funcs] + [r.name for r in sig.rels]
    if len(names) != len(set(names)):
        raise SortError("duplicate function/relation symbol")
    for seq in theory.sequents:
        check_sequent(sig, seq)


# ---------------------------------------------------------------------------
# Tokenizer (shared by the theory, model, hom, and scale parsers)

RESERVED = {
    "theory", "sort", "func", "rel", "axiom", "top",
    "model", "of", "elem", "hom", "scale", "entry",
}

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+|\#[^\n]*)
    | (?P<op>-\|\|-|\|->|\|-|->|[{}\[\]():;,=&!*])
    | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "op" | "ident" | "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup or ""
        tok = m.group()
        if kind != "ws":
            # a lone '*' acts as an identifier (sort of n-categories)
            if tok == "*":
                kind = "ident"
            tokens.append(Token(kind, tok, line, m.start() - line_start + 1))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + tok.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class TokenStream:
    def __init__(self, text: str) -> None:
        self.tokens = tokenize(text)
        self.index = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def next(self) -> Token:
        tok = self.tokens[self.index]
        if tok.kind != "eof":
            self.index += 1
        return tok

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            raise self.error(f"expected {text!r}, got {tok.text!r}")
        return self.next()

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.error(f"expected identifier, got {tok.text!r}")
        if tok.text in RESERVED:
            raise self.error(f"reserved word {tok.text!r} used as identifier")
        return self.next()

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind != "eof"

    def expect_eof(self) -> None:
        tok = self.peek()
        if tok.kind != "eof":
            raise self.error(f"trailing input {tok.text!r}")


# ---------------------------------------------------------------------------
# Parser


def _parse_term(ts: TokenStream, sig: Signature) -> RawTerm:
    name = ts.expect_ident().text
    if ts.at("("):
        ts.next()
        args: list[RawTerm] = []
        if not ts.at(")"):
            args.append(_parse_term(ts, sig))
            while ts.at(","):
                ts.next()
                args.append(_parse_term(ts, sig))
        ts.expect(")")
        return App(name, tuple(args))
    if sig.has_func(name):
        return App(name, ())
    return Var(name)


def _parse_atom(ts: TokenStream, sig: Signature) -> Atom:
    term = _parse_term(ts, sig)
    if isinstance(term, App) and sig.has_rel(term.func):
        raise ts.error(f"relation symbol {term.func!r} used as a term")
    if ts.at("="):
        ts.next()
        rhs = _parse_term(ts, sig)
        return Eq(term, rhs)
    if ts.at("!"):
        ts.next()
        return Def(term)
    raise ts.error("expected '=' or '!' after term")


def _parse_atom_or_rel(ts: TokenStream, sig: Signature) -> Atom:
    tok = ts.peek()
    if tok.kind == "ident" and sig.has_rel(tok.text):
        ts.next()
        ts.expect("(")
        args: list[RawTerm] = []
        if not ts.at(")"):
            args.append(_parse_term(ts, sig))
            while ts.at(","):
                ts.next()
                args.append(_parse_term(ts, sig))
        ts.expect(")")
        return Rel(tok.text, tuple(args))
    return _parse_atom(ts, sig)


def _parse_formula(ts: TokenStream, sig: Signature) -> HornFormula:
    if ts.at("top"):
        ts.next()
        return TOP
    atoms = [_parse_atom_or_rel(ts, sig)]
    while ts.at("&"):
        ts.next()
        atoms.append(_parse_atom_or_rel(ts, sig))
    return HornFormula(tuple(atoms))


def _parse_context(ts: TokenStream) -> Context:
    ts.expect("[")
    pairs: list[tuple[str, str]] = []
    if not ts.at("]"):
        while True:
            name = ts.expect_ident().text
            ts.expect(":")
            sort = ts.expect_ident().text
            pairs.append((name, sort))
            if ts.at(","):
                ts.next()
                continue
            break
    ts.expect("]")
    return Context(tuple(pairs))


def _parse_axiom(ts: TokenStream, sig: Signature, index: int) -> tuple[Sequent, ...]:
    ctx = _parse_context(ts)
    premise = _parse_formula(ts, sig)
    tok = ts.peek()
    if tok.text == "|-":
        ts.next()
        conclusion = _parse_formula(ts, sig)
        return (Sequent(ctx, premise, conclusion, label=f"ax{index}"),)
    if tok.text == "-||-":
        ts.next()
        conclusion = _parse_formula(ts, sig)
        # bisequent: expands to the forward, then the backward sequent
        return (
            Sequent(ctx, premise, conclusion, label=f"ax{index}.fwd"),
            Sequent(ctx, conclusion, premise, label=f"ax{index}.bwd"),
        )
    raise ts.error(f"expected '|-' or '-||-', got {tok.text!r}")


def parse_theory(text: str) -> Theory:
    """Parse a theory file; sort-check everything before returning."""
    ts = TokenStream(text)
    ts.expect("theory")
    name = ts.expect_ident().text
    ts.expect("{")
    sorts: list[str] = []
    funcs: list[FuncDecl] = []
    rels: list[RelDecl] = []
    sequents: list[Sequent] = []
    axiom_index = 0
    while not ts.at("}"):
        tok = ts.peek()
        if tok.text == "sort":
            ts.next()
            sorts.append(ts.expect_ident().text)
            ts.expect(";")
        elif tok.text == "func":
            ts.next()
            fname = ts.expect_ident().text
            ts.expect(":")
            first = ts.expect_ident().text
            if ts.at("->") or ts.at(","):
                args = [first]
                while ts.at(","):
                    ts.next()
                    args.append(ts.expect_ident().text)
                ts.expect("->")
                result = ts.expect_ident().text
                funcs.append(FuncDecl(fname, tuple(args), result))
            else:
                funcs.append(FuncDecl(fname, (), first))
            ts.expect(";")
        elif tok.text == "rel":
            ts.next()
            rname = ts.expect_ident().text
            ts.expect(":")
            args = [ts.expect_ident().text]
            while ts.at(","):
                ts.next()
                args.append(ts.expect_ident().text)
            rels.append(RelDecl(rname, tuple(args)))
            ts.expect(";")
        elif tok.text == "axiom":
            ts.next()
            axiom_index += 1
            sig = Signature(tuple(sorts), tuple(funcs), tuple(rels))
            sequents.extend(_parse_axiom(ts, sig, axiom_index))
            ts.expect(";")
        else:
            raise ts.error(f"expected declaration, got {tok.text!r}")
    ts.expect("}")
    ts.expect_eof()
    theory = Theory(name, Signature(tuple(sorts), tuple(funcs), tuple(rels)), tuple(sequents))
    check_theory(theory)
    return theory


def parse_term(sig: Signature, text: str) -> RawTerm:
    ts = TokenStream(text)
    term = _parse_term(ts, sig)
    ts.expect_eof()
    return term


def parse_formula(sig: Signature, text: str) -> HornFormula:
    ts = TokenStream(text)
    phi = _parse_formula(ts, sig)
    ts.expect_eof()
    return phi


def parse_sequent(sig: Signature, text: str) -> tuple[Sequent, ...]:
    """Parse ``[ctx] premise |- conclusion`` (or ``-||-``, expanding to two)."""
    ts = TokenStream(text)
    seqs = _parse_axiom(ts, sig, 0)
    ts.expect_eof()
    out = []
    for i, seq in enumerate(seqs):
        seq = Sequent(seq.context, seq.premise, seq.conclusion, label=f"goal{i}")
        check_sequent(sig, seq)
        out.append(seq)
    return tuple(out)


# ---------------------------------------------------------------------------
# Printer (round-trips through parse_theory)


def term_to_text(term: RawTerm) -> str:
    if isinstance(term, Var):
        return term.name
    if not term.args:
        return term.func
    return f"{term.func}({', '.join(term_to_text(a) for a in term.args)})"


def atom_to_text(atom: Atom) -> str:
    if isinstance(atom, Eq):
        return f"{term_to_text(atom.lhs)} = {term_to_text(atom.rhs)}"
    if isinstance(atom, Def):
        return f"{term_to_text(atom.term)} !"
    return f"{atom.rel}({', '.join(term_to_text(a) for a in atom.args)})"


def formula_to_text(phi: HornFormula) -> str:
    if not phi.atoms:
        return "top"
    return " & ".join(atom_to_text(a) for a in phi.atoms)


def context_to_text(ctx: Context) -> str:
    return "[" + ", ".join(f"{n}:{s}" for n, s in ctx.vars) + "]"


def sequent_to_text(seq: Sequent) -> str:
    return f"{context_to_text(seq.context)} {formula_to_text(seq.premise)} |- {formula_to_text(seq.conclusion)}"


def theory_to_text(theory: Theory) -> str:
    lines = [f"theory {theory.name} {{"]
    for s in theory.signature.sorts:
        lines.append(f"  sort {s};")
    for f in theory.signature.funcs:
        if f.arg_sorts:
            lines.append(f"  func {f.name} : {', '.join(f.arg_sorts)} -> {f.result_sort};")
        else:
            lines.append(f"  func {f.name} : {f.result_sort};")
    for r in theory.signature.rels:
        lines.append(f"  rel {r.name} : {', '.join(r.arg_sorts)};")
    for seq in theory.sequents:
        lines.append(f"  axiom {sequent_to_text(seq)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON mirror


def term_to_json(term: RawTerm) -> dict:
    if isinstance(term, Var):
        return {"var": term.name}
    return {"app": term.func, "args": [term_to_json(a) for a in term.args]}


def term_from_json(data: dict) -> RawTerm:
    if "var" in data:
        return Var(data["var"])
    return App(data["app"], tuple(term_from_json(a) for a in data["args"]))


def atom_to_json(atom: Atom) -> dict:
    if isinstance(atom, Eq):
        return {"eq": [term_to_json(atom.lhs), term_to_json(atom.rhs)]}
    if isinstance(atom, Def):
        return {"def": term_to_json(atom.term)}
    return {"rel": atom.rel, "args": [term_to_json(a) for a in atom.args]}


def atom_from_json(data: dict) -> Atom:
    if "eq" in data:
        return Eq(term_from_json(data["eq"][0]), term_from_json(data["eq"][1]))
    if "def" in data:
        return Def(term_from_json(data["def"]))
    return Rel(data["rel"], tuple(term_from_json(a) for a in data["args"]))


def formula_to_json(phi: HornFormula) -> list:
    return [atom_to_json(a) for a in phi.atoms]


def formula_from_json(data: list) -> HornFormula:
    return HornFormula(tuple(atom_from_json(a) for a in data))


def theory_to_json(theory: Theory) -> dict:
    sig = theory.signature
    return {
        "theory": theory.name,
        "sorts": list(sig.sorts),
        "funcs": [
            {"name": f.name, "args": list(f.arg_sorts), "result": f.result_sort}
            for f in sig.funcs
        ],
        "rels": [{"name": r.name, "args": list(r.arg_sorts)} for r in sig.rels],
        "axioms": [
            {
                "label": seq.label,
                "context": [[n, s] for n, s in seq.context.vars],
                "premise": formula_to_json(seq.premise),
                "conclusion": formula_to_json(seq.conclusion),
            }
            for seq in theory.sequents
        ],
    }


def theory_from_json(data: dict) -> Theory:
    sig = Signature(
        tuple(data["sorts"]),
        tuple(FuncDecl(f["name"], tuple(f["args"]), f["result"]) for f in data["funcs"]),
        tuple(RelDecl(r["name"], tuple(r["args"])) for r in data["rels"]),
    )
    sequents = tuple(
        Sequent(
            Context(tuple((n, s) for n, s in ax["context"])),
            formula_from_json(ax["premise"]),
            formula_from_json(ax["conclusion"]),
            label=ax.get("label", ""),
        )
        for ax in data["axioms"]
    )
    theory = Theory(data["theory"], sig, sequents)
    check_theory(theory)
    return theory


def load_theory(path: str) -> Theory:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json") or text.lstrip().startswith("{"):
        return theory_from_json(json.loads(text))
    return parse_theory(text)
