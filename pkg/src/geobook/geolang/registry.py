"""Concept signature registry.

A signature fixes a concept's parameter sorts and result sort.  The
builtin registry ships the primitive constructors and predicates, the
tuple-like concepts with their projections, and a small library of
derived concepts carried as definition source text.  User definitions
are added with :func:`register_definition`, which also records the
dependency edges between symbols; a definition may only use symbols
registered before it, so the dependency graph is acyclic by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast import DefinitionDecl, Sort, symbols_used, GeoProgram
from .errors import DuplicateSymbol, UnknownBodySymbol

PRIMITIVE = "primitive"
PREDICATE = "predicate"
TUPLE = "tuple"
PROJECTION = "projection"
DEFINED = "defined"


@dataclass(frozen=True)
class ConceptSignature:
    symbol: str
    param_sorts: tuple[frozenset[Sort], ...]  # each entry: acceptable sorts
    result_sort: Sort
    primitive: bool
    kind: str = PRIMITIVE

    @property
    def arity(self) -> int:
        return len(self.param_sorts)

    def describe(self) -> str:
        ps = ", ".join(
            "|".join(sorted(s.value for s in p)) for p in self.param_sorts
        )
        return f"{self.symbol}({ps}) -> {self.result_sort}"


def _sig(symbol, params, result, kind):
    norm = tuple(
        frozenset(p) if isinstance(p, (set, frozenset, tuple, list)) else frozenset({p})
        for p in params
    )
    return ConceptSignature(
        symbol, norm, result, primitive=kind in (PRIMITIVE, PREDICATE), kind=kind
    )


P, L, S, C, T, B = (
    Sort.POINT,
    Sort.LINE,
    Sort.SEGMENT,
    Sort.CIRCLE,
    Sort.TRIANGLE,
    Sort.BOOL,
)

_BUILTIN_SIGS = [
    # primitive constructors
    _sig("point", [], P, PRIMITIVE),
    _sig("line", [P, P], L, PRIMITIVE),
    _sig("circle", [P, P], C, PRIMITIVE),  # center, through-point
    # primitive predicates
    _sig("incident", [P, {L, C}], B, PREDICATE),
    _sig("collinear", [P, P, P], B, PREDICATE),
    _sig("parallel", [L, L], B, PREDICATE),
    _sig("perpendicular", [L, L], B, PREDICATE),
    _sig("eqdist", [P, P, P, P], B, PREDICATE),
    _sig("equalp", [P, P], B, PREDICATE),
    # tuple-like concepts and their projections
    _sig("triangle", [P, P, P], T, TUPLE),
    _sig("segment", [P, P], S, TUPLE),
    _sig("vertex1", [T], P, PROJECTION),
    _sig("vertex2", [T], P, PROJECTION),
    _sig("vertex3", [T], P, PROJECTION),
    _sig("end1", [S], P, PROJECTION),
    _sig("end2", [S], P, PROJECTION),
]

# Derived concepts shipped with the language, as ordinary definition
# source.  These are also the definitions seeded into a fresh knowledge
# base, so the expander and the textbook corpus agree symbol by symbol.
BUILTIN_DEFINITION_SOURCES: dict[str, str] = {
    "intersection": (
        "intersection(l :: Line, m :: Line) ::= "
        "[P :: Point where incident(P, l) /\\ incident(P, m)];"
    ),
    "midpoint": (
        "midpoint(A :: Point, B :: Point) ::= "
        "[M :: Point where collinear(A, M, B) /\\ eqdist(M, A, M, B)];"
    ),
    "foot": (
        "foot(P :: Point, l :: Line) ::= "
        "[F :: Point where incident(F, l) /\\ perpendicular(line(P, F), l)];"
    ),
    "circumcircle": (
        "circumcircle(t :: Triangle) ::= "
        "[c :: Circle where incident(vertex1(t), c) /\\ incident(vertex2(t), c)"
        " /\\ incident(vertex3(t), c)];"
    ),
    "median": (
        "median(A :: Point, B :: Point, C :: Point) ::= "
        "[m :: Line where incident(A, m) /\\ incident(midpoint(B, C), m)];"
    ),
}


@dataclass
class Registry:
    signatures: dict[str, ConceptSignature] = field(default_factory=dict)
    definitions: dict[str, DefinitionDecl] = field(default_factory=dict)
    # symbol -> symbols its definition body uses
    dependencies: dict[str, frozenset[str]] = field(default_factory=dict)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.signatures

    def get(self, symbol: str) -> ConceptSignature | None:
        return self.signatures.get(symbol)

    def signature(self, symbol: str) -> ConceptSignature:
        return self.signatures[symbol]

    def definition(self, symbol: str) -> DefinitionDecl | None:
        return self.definitions.get(symbol)

    def copy(self) -> "Registry":
        return Registry(
            dict(self.signatures), dict(self.definitions), dict(self.dependencies)
        )

    def add_signature(self, sig: ConceptSignature) -> None:
        if sig.symbol in self.signatures:
            raise DuplicateSymbol(f"concept '{sig.symbol}' is already registered")
        self.signatures[sig.symbol] = sig


def signature_of_definition(d: DefinitionDecl) -> ConceptSignature:
    return ConceptSignature(
        d.symbol,
        tuple(frozenset({s}) for _, s in d.params),
        d.result[1],
        primitive=False,
        kind=DEFINED,
    )


def register_definition(defn: DefinitionDecl, registry: Registry) -> ConceptSignature:
    """Register a typed concept definition.

    The body may only use already-registered symbols, which keeps the
    definition dependency graph acyclic (a cycle would need a forward
    reference).  Raises :class:`DuplicateSymbol` or
    :class:`UnknownBodySymbol`.
    """
    if defn.symbol in registry.signatures:
        raise DuplicateSymbol(f"concept '{defn.symbol}' is already registered", defn.loc)
    used = symbols_used(GeoProgram([defn.body]))
    unknown = sorted(s for s in used if s not in registry.signatures)
    if unknown:
        raise UnknownBodySymbol(
            f"definition of '{defn.symbol}' uses unregistered symbol(s): "
            + ", ".join(unknown),
            defn.loc,
        )
    sig = signature_of_definition(defn)
    registry.signatures[defn.symbol] = sig
    registry.definitions[defn.symbol] = defn
    registry.dependencies[defn.symbol] = frozenset(used)
    return sig


def builtin_registry() -> Registry:
    """Fresh registry with the shipped primitives and derived concepts."""
    from .parser import parse
    from .typecheck import typecheck

    reg = Registry()
    for sig in _BUILTIN_SIGS:
        reg.signatures[sig.symbol] = sig
    for source in BUILTIN_DEFINITION_SOURCES.values():
        program = parse(source)
        typed = typecheck(program, reg)
        (defn,) = typed.program.definitions
        register_definition(defn, reg)
    return reg
