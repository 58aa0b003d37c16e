"""Formal geometry language: lexer, parser, typechecker, pretty printer."""

from .ast import (
    And,
    App,
    Atom,
    Declaration,
    DefinitionDecl,
    Formula,
    GeoProgram,
    Iff,
    Implies,
    Loc,
    Not,
    Or,
    Sort,
    Term,
    Var,
    flatten_conjunction,
    formula_equal,
    program_equal,
    symbols_used,
    term_equal,
    walk_atoms,
    walk_terms,
)
from .errors import (
    ArityMismatch,
    DuplicateSymbol,
    GeoLangError,
    GeoSyntaxError,
    SortMismatch,
    UnknownBodySymbol,
    UnknownSymbol,
)
from .parser import parse, tokenize
from .pretty import pretty, pretty_formula, pretty_term
from .registry import (
    BUILTIN_DEFINITION_SOURCES,
    ConceptSignature,
    Registry,
    builtin_registry,
    register_definition,
    signature_of_definition,
)
from .typecheck import TypedProgram, typecheck

__all__ = [
    "And", "App", "Atom", "Declaration", "DefinitionDecl", "Formula",
    "GeoProgram", "Iff", "Implies", "Loc", "Not", "Or", "Sort", "Term", "Var",
    "flatten_conjunction", "formula_equal", "program_equal", "symbols_used",
    "term_equal", "walk_atoms", "walk_terms",
    "ArityMismatch", "DuplicateSymbol", "GeoLangError", "GeoSyntaxError",
    "SortMismatch", "UnknownBodySymbol", "UnknownSymbol",
    "parse", "tokenize", "pretty", "pretty_formula", "pretty_term",
    "BUILTIN_DEFINITION_SOURCES", "ConceptSignature", "Registry",
    "builtin_registry", "register_definition", "signature_of_definition",
    "TypedProgram", "typecheck",
]
