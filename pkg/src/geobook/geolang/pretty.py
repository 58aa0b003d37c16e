"""Canonical pretty printer.

``parse(pretty(p))`` is structurally equal to ``p`` for every valid
program, and ``pretty`` is idempotent: printing an already-canonical
program reproduces it byte for byte.  Parentheses are emitted only
where connective precedence requires them.
"""

from __future__ import annotations

from .ast import (
    And,
    Atom,
    Declaration,
    DefinitionDecl,
    Formula,
    GeoProgram,
    Iff,
    Implies,
    Not,
    Or,
    Term,
    Var,
)

# looser binds lower
_LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5, Atom: 6}
_OP = {Iff: "<=>", Implies: "=>", Or: "\\/", And: "/\\"}


def pretty_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    return f"{t.head}({', '.join(pretty_term(a) for a in t.args)})"


def pretty_formula(f: Formula, parent_level: int = 0) -> str:
    level = _LEVEL[type(f)]
    if isinstance(f, Atom):
        text = f"{f.pred}({', '.join(pretty_term(a) for a in f.args)})"
    elif isinstance(f, Not):
        text = f"!{pretty_formula(f.body, level)}"
    elif isinstance(f, Implies):
        # right-associative: the left child needs a strictly tighter level
        lhs = pretty_formula(f.lhs, level + 1)
        rhs = pretty_formula(f.rhs, level)
        text = f"{lhs} => {rhs}"
    else:
        # left-associative chains print flat
        lhs = pretty_formula(f.lhs, level)
        rhs = pretty_formula(f.rhs, level + 1)
        text = f"{lhs} {_OP[type(f)]} {rhs}"
    if level < parent_level:
        return f"({text})"
    return text


def pretty_item(item) -> str:
    if isinstance(item, Declaration):
        return f"{item.name} := {pretty_term(item.ctor)};"
    if isinstance(item, DefinitionDecl):
        params = ", ".join(f"{n} :: {s}" for n, s in item.params)
        rname, rsort = item.result
        body = pretty_formula(item.body)
        return f"{item.symbol}({params}) ::= [{rname} :: {rsort} where {body}];"
    return f"{pretty_formula(item)};"


def pretty(program: GeoProgram) -> str:
    """Canonical source text, one item per line, trailing newline."""
    if not program.items:
        return ""
    return "\n".join(pretty_item(i) for i in program.items) + "\n"
