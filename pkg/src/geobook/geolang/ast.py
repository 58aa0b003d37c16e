"""AST node types for the formal geometry language.

Terms build geometric objects (points, lines, circles, ...), formulas
combine predicate atoms with the usual connectives, and a program is a
sequence of declarations, concept definitions, and formulas.  Every node
keeps the source location of the token that introduced it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Sort(enum.Enum):
    POINT = "Point"
    LINE = "Line"
    SEGMENT = "Segment"
    CIRCLE = "Circle"
    TRIANGLE = "Triangle"
    SCALAR = "Scalar"
    BOOL = "Bool"

    def __str__(self) -> str:
        return self.value


SORT_BY_NAME = {s.value: s for s in Sort}


@dataclass(frozen=True)
class Loc:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NOWHERE = Loc(0, 0)


# --- terms -------------------------------------------------------------


@dataclass
class Var:
    """A reference to a declared object or a definition parameter."""

    name: str
    loc: Loc = NOWHERE
    sort: Sort | None = None  # filled in by the typechecker

    def __str__(self) -> str:
        return self.name


@dataclass
class App:
    """A concept application such as ``foot(D, line(A, B))``."""

    head: str
    args: list["Term"]
    loc: Loc = NOWHERE
    sort: Sort | None = None

    def __str__(self) -> str:
        inner = ", ".join(str(a) for a in self.args)
        return f"{self.head}({inner})"


Term = Var | App


# --- formulas ----------------------------------------------------------


@dataclass
class Atom:
    """A predicate applied to terms, e.g. ``incident(A, l)``."""

    pred: str
    args: list[Term]
    loc: Loc = NOWHERE

    def __str__(self) -> str:
        inner = ", ".join(str(a) for a in self.args)
        return f"{self.pred}({inner})"


@dataclass
class Not:
    body: "Formula"
    loc: Loc = NOWHERE


@dataclass
class And:
    lhs: "Formula"
    rhs: "Formula"
    loc: Loc = NOWHERE


@dataclass
class Or:
    lhs: "Formula"
    rhs: "Formula"
    loc: Loc = NOWHERE


@dataclass
class Implies:
    lhs: "Formula"
    rhs: "Formula"
    loc: Loc = NOWHERE


@dataclass
class Iff:
    lhs: "Formula"
    rhs: "Formula"
    loc: Loc = NOWHERE


Formula = Atom | Not | And | Or | Implies | Iff


# --- program items -----------------------------------------------------


@dataclass
class Declaration:
    """``A := point();`` introduces a named object."""

    name: str
    ctor: Term
    loc: Loc = NOWHERE


@dataclass
class DefinitionDecl:
    """``midpoint(A :: Point, B :: Point) ::= [M :: Point where ...];``"""

    symbol: str
    params: list[tuple[str, Sort]]
    result: tuple[str, Sort]
    body: Formula
    loc: Loc = NOWHERE


Item = Declaration | DefinitionDecl | Formula


@dataclass
class GeoProgram:
    items: list[Item] = field(default_factory=list)

    @property
    def declarations(self) -> list[Declaration]:
        return [i for i in self.items if isinstance(i, Declaration)]

    @property
    def definitions(self) -> list[DefinitionDecl]:
        return [i for i in self.items if isinstance(i, DefinitionDecl)]

    @property
    def formulas(self) -> list[Formula]:
        return [
            i
            for i in self.items
            if not isinstance(i, (Declaration, DefinitionDecl))
        ]


# --- structural helpers ------------------------------------------------


def term_equal(a: Term, b: Term) -> bool:
    """Structural equality ignoring locations and sort annotations."""
    if isinstance(a, Var) and isinstance(b, Var):
        return a.name == b.name
    if isinstance(a, App) and isinstance(b, App):
        return (
            a.head == b.head
            and len(a.args) == len(b.args)
            and all(term_equal(x, y) for x, y in zip(a.args, b.args))
        )
    return False


def formula_equal(a: Formula, b: Formula) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Atom):
        assert isinstance(b, Atom)
        return (
            a.pred == b.pred
            and len(a.args) == len(b.args)
            and all(term_equal(x, y) for x, y in zip(a.args, b.args))
        )
    if isinstance(a, Not):
        assert isinstance(b, Not)
        return formula_equal(a.body, b.body)
    assert isinstance(a, (And, Or, Implies, Iff)) and isinstance(b, (And, Or, Implies, Iff))
    return formula_equal(a.lhs, b.lhs) and formula_equal(a.rhs, b.rhs)


def program_equal(a: GeoProgram, b: GeoProgram) -> bool:
    if len(a.items) != len(b.items):
        return False
    for x, y in zip(a.items, b.items):
        if isinstance(x, Declaration) and isinstance(y, Declaration):
            if x.name != y.name or not term_equal(x.ctor, y.ctor):
                return False
        elif isinstance(x, DefinitionDecl) and isinstance(y, DefinitionDecl):
            if (
                x.symbol != y.symbol
                or x.params != y.params
                or x.result != y.result
                or not formula_equal(x.body, y.body)
            ):
                return False
        elif not isinstance(x, (Declaration, DefinitionDecl)) and not isinstance(
            y, (Declaration, DefinitionDecl)
        ):
            if not formula_equal(x, y):
                return False
        else:
            return False
    return True


def walk_terms(f: Formula):
    """Yield every term appearing in a formula, outermost first."""
    if isinstance(f, Atom):
        stack = list(f.args)
        while stack:
            t = stack.pop(0)
            yield t
            if isinstance(t, App):
                stack = list(t.args) + stack
    elif isinstance(f, Not):
        yield from walk_terms(f.body)
    else:
        yield from walk_terms(f.lhs)
        yield from walk_terms(f.rhs)


def walk_atoms(f: Formula):
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from walk_atoms(f.body)
    else:
        yield from walk_atoms(f.lhs)
        yield from walk_atoms(f.rhs)


def flatten_conjunction(f: Formula) -> list[Formula]:
    """Split nested ``/\\`` into a flat list; other shapes stay whole."""
    if isinstance(f, And):
        return flatten_conjunction(f.lhs) + flatten_conjunction(f.rhs)
    return [f]


def symbols_used(program: GeoProgram) -> set[str]:
    """All concept symbols applied anywhere in the program.

    Includes constructor heads in declarations, term heads and predicate
    heads in formulas, and everything used inside definition bodies.
    """
    out: set[str] = set()

    def from_term(t: Term) -> None:
        if isinstance(t, App):
            out.add(t.head)
            for a in t.args:
                from_term(a)

    def from_formula(f: Formula) -> None:
        for atom in walk_atoms(f):
            out.add(atom.pred)
            for a in atom.args:
                from_term(a)

    for item in program.items:
        if isinstance(item, Declaration):
            from_term(item.ctor)
        elif isinstance(item, DefinitionDecl):
            from_formula(item.body)
        else:
            from_formula(item)
    return out
