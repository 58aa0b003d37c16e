"""Sort checking and annotation for parsed programs.

``typecheck`` walks a program item by item, resolving every identifier
against the declarations seen so far and every applied symbol against
the registry, and annotates each term node with its sort.  Definitions
occurring inside the program are checked in their own parameter scope
and become available to later items of the same program without
mutating the caller's registry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast import (
    Atom,
    Declaration,
    DefinitionDecl,
    Formula,
    GeoProgram,
    Not,
    Sort,
    Term,
    Var,
)
from .errors import ArityMismatch, DuplicateSymbol, SortMismatch, UnknownSymbol
from .registry import Registry, signature_of_definition


@dataclass
class TypedProgram:
    program: GeoProgram
    registry: Registry  # includes definitions added by the program itself
    declaration_sorts: dict[str, Sort] = field(default_factory=dict)
    symbols: set[str] = field(default_factory=set)

    @property
    def declarations(self) -> list[Declaration]:
        return self.program.declarations

    @property
    def formulas(self) -> list[Formula]:
        return self.program.formulas


def typecheck(program: GeoProgram, registry: Registry) -> TypedProgram:
    """Check and annotate a program against a registry.

    Raises :class:`UnknownSymbol`, :class:`ArityMismatch`,
    :class:`SortMismatch`, or :class:`DuplicateSymbol`; each error names
    the offending source location.
    """
    reg = registry.copy()
    typed = TypedProgram(program, reg)
    scope: dict[str, Sort] = {}

    def term_sort(t: Term, local: dict[str, Sort]) -> Sort:
        if isinstance(t, Var):
            if t.name not in local:
                raise UnknownSymbol(f"undeclared identifier '{t.name}'", t.loc)
            t.sort = local[t.name]
            return t.sort
        sig = reg.get(t.head)
        if sig is None:
            raise UnknownSymbol(f"unknown concept '{t.head}'", t.loc)
        typed.symbols.add(t.head)
        if sig.result_sort is Sort.BOOL:
            raise SortMismatch(
                f"predicate '{t.head}' used in term position", t.loc
            )
        check_args(t.head, sig.param_sorts, t.args, t.loc, local)
        t.sort = sig.result_sort
        return t.sort

    def check_args(head, param_sorts, args, loc, local) -> None:
        if len(args) != len(param_sorts):
            raise ArityMismatch(
                f"'{head}' expects {len(param_sorts)} argument(s), got {len(args)}",
                loc,
            )
        for arg, acceptable in zip(args, param_sorts):
            got = term_sort(arg, local)
            if got not in acceptable:
                want = "|".join(sorted(s.value for s in acceptable))
                raise SortMismatch(
                    f"'{head}' argument has sort {got}, expected {want}",
                    arg.loc,
                )

    def check_formula(f: Formula, local: dict[str, Sort]) -> None:
        if isinstance(f, Atom):
            sig = reg.get(f.pred)
            if sig is None:
                raise UnknownSymbol(f"unknown predicate '{f.pred}'", f.loc)
            typed.symbols.add(f.pred)
            if sig.result_sort is not Sort.BOOL:
                raise SortMismatch(
                    f"'{f.pred}' is not a predicate", f.loc
                )
            check_args(f.pred, sig.param_sorts, f.args, f.loc, local)
        elif isinstance(f, Not):
            check_formula(f.body, local)
        else:
            check_formula(f.lhs, local)
            check_formula(f.rhs, local)

    def check_definition(d: DefinitionDecl) -> None:
        existing = reg.get(d.symbol)
        if existing is not None:
            # a verbatim restatement of a registered definition is fine;
            # anything conflicting is rejected.
            if signature_of_definition(d).param_sorts != existing.param_sorts or (
                d.result[1] is not existing.result_sort
            ):
                raise DuplicateSymbol(
                    f"concept '{d.symbol}' already registered with a "
                    f"different signature",
                    d.loc,
                )
        local: dict[str, Sort] = {}
        for name, sort in d.params:
            if name in local:
                raise DuplicateSymbol(
                    f"duplicate parameter '{name}' in definition of '{d.symbol}'",
                    d.loc,
                )
            local[name] = sort
        rname, rsort = d.result
        if rname in local:
            raise DuplicateSymbol(
                f"result variable '{rname}' shadows a parameter", d.loc
            )
        local[rname] = rsort
        check_formula(d.body, local)
        if existing is None:
            reg.signatures[d.symbol] = signature_of_definition(d)
            reg.definitions[d.symbol] = d

    for item in program.items:
        if isinstance(item, Declaration):
            if item.name in scope:
                raise DuplicateSymbol(
                    f"'{item.name}' declared twice", item.loc
                )
            if item.name in reg.signatures:
                raise DuplicateSymbol(
                    f"'{item.name}' collides with a concept symbol", item.loc
                )
            scope[item.name] = term_sort(item.ctor, scope)
            typed.declaration_sorts[item.name] = scope[item.name]
        elif isinstance(item, DefinitionDecl):
            check_definition(item)
        else:
            check_formula(item, scope)

    return typed
