from __future__ import annotations

import random

import pytest

from geobook.geolang import (
    App,
    ArityMismatch,
    Atom,
    Declaration,
    DefinitionDecl,
    DuplicateSymbol,
    GeoSyntaxError,
    GeoProgram,
    Iff,
    Implies,
    And,
    Or,
    Not,
    Sort,
    SortMismatch,
    UnknownSymbol,
    Var,
    builtin_registry,
    parse,
    pretty,
    program_equal,
    register_definition,
    typecheck,
)

SIMSON = (
    "A := point(); B := point(); C := point(); D := point();\n"
    "incident(D, circumcircle(triangle(A, B, C))) <=> "
    "collinear(foot(D, line(A, B)), foot(D, line(B, C)), foot(D, line(A, C)));"
)


# --- parsing ----------------------------------------------------------------


def test_single_declaration():
    p = parse("A := point();")
    assert len(p.items) == 1
    decl = p.items[0]
    assert isinstance(decl, Declaration)
    assert decl.name == "A"
    assert isinstance(decl.ctor, App) and decl.ctor.head == "point"
    assert decl.ctor.args == []


def test_empty_program():
    assert parse("").items == []
    assert parse("   \n# only a comment\n").items == []


def test_simson_shape():
    p = parse(SIMSON)
    assert len(p.declarations) == 4
    (formula,) = p.formulas
    assert isinstance(formula, Iff)
    left, right = formula.lhs, formula.rhs
    assert isinstance(left, Atom) and left.pred == "incident"
    assert isinstance(left.args[1], App) and left.args[1].head == "circumcircle"
    assert isinstance(right, Atom) and right.pred == "collinear"
    assert all(
        isinstance(a, App) and a.head == "foot" for a in right.args
    )
    assert len(right.args) == 3


def test_syntax_error_location_and_expectations():
    with pytest.raises(GeoSyntaxError) as exc:
        parse("A := point(;")
    assert exc.value.line == 1
    assert exc.value.col == 12
    assert exc.value.expected


def test_connective_precedence():
    f = parse("incident(A, l) \\/ incident(B, l) /\\ incident(C, l);")
    # /\ binds tighter than \/
    (formula,) = parse(
        "incident(A, l) \\/ incident(B, l) /\\ incident(C, l);"
    ).formulas
    assert isinstance(formula, Or)
    assert isinstance(formula.rhs, And)
    del f


def test_implies_right_associative():
    (formula,) = parse("p0(A) => p1(A) => p2(A);").formulas
    assert isinstance(formula, Implies)
    assert isinstance(formula.rhs, Implies)
    assert isinstance(formula.lhs, Atom)


def test_not_and_parens():
    (formula,) = parse("!(incident(A, l) /\\ incident(B, l));").formulas
    assert isinstance(formula, Not)
    assert isinstance(formula.body, And)


def test_definition_parses():
    src = "intersection(l :: Line, m :: Line) ::= [P :: Point where incident(P, l) /\\ incident(P, m)];"
    p = parse(src)
    (d,) = p.items
    assert isinstance(d, DefinitionDecl)
    assert d.symbol == "intersection"
    assert d.params == [("l", Sort.LINE), ("m", Sort.LINE)]
    assert d.result == ("P", Sort.POINT)


def test_parse_is_total_on_garbage():
    for bad in ["(((", "A :=", "1234", "::=", "foo(,)", "A := point() ;;", "\x00\x01"]:
        with pytest.raises(GeoSyntaxError):
            parse(bad)


def test_fuzz_totality():
    # totality: value or located syntax error, never another exception
    rng = random.Random(20240713)
    alphabet = "ABCz(),;:=<>/\\![] \n\tpointlinewhere"
    for _ in range(100_000):
        s = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 24)))
        try:
            parse(s)
        except GeoSyntaxError:
            pass


# --- typechecking ------------------------------------------------------------


def test_simson_typechecks_with_expected_symbols(registry):
    typed = typecheck(parse(SIMSON), registry)
    assert typed.symbols == {
        "point",
        "line",
        "triangle",
        "circumcircle",
        "foot",
        "incident",
        "collinear",
    }
    (formula,) = typed.program.formulas
    foot_term = formula.rhs.args[0]
    assert foot_term.sort is Sort.POINT


def test_collinear_arity(registry):
    with pytest.raises(ArityMismatch):
        typecheck(parse("A := point(); B := point(); collinear(A, B);"), registry)


def test_incident_sort_mismatch(registry):
    src = "A := point(); B := point(); C := point(); incident(line(A, B), C);"
    with pytest.raises(SortMismatch):
        typecheck(parse(src), registry)


def test_unknown_symbol(registry):
    with pytest.raises(UnknownSymbol):
        typecheck(parse("A := gizmo();"), registry)
    with pytest.raises(UnknownSymbol):
        typecheck(parse("A := point(); incident(A, l);"), registry)


def test_duplicate_declaration(registry):
    with pytest.raises(DuplicateSymbol):
        typecheck(parse("A := point(); A := point();"), registry)


def test_define_before_use_any_interleaving(registry):
    src = (
        "A := point(); B := point(); incident(A, line(A, B));\n"
        "C := point(); collinear(A, B, C);"
    )
    typed = typecheck(parse(src), registry)
    assert len(typed.program.formulas) == 2


def test_register_definition_duplicate(registry):
    reg = registry.copy()
    src = "intersection(l :: Line, m :: Line) ::= [P :: Point where incident(P, l) /\\ incident(P, m)];"
    (defn,) = parse(src).definitions
    with pytest.raises(DuplicateSymbol):
        register_definition(defn, reg)


def test_register_definition_unknown_body_symbol(registry):
    from geobook.geolang import UnknownBodySymbol

    reg = registry.copy()
    src = "gadget(A :: Point) ::= [G :: Point where frobnicate(G, A)];"
    (defn,) = parse(src).definitions
    with pytest.raises(UnknownBodySymbol):
        register_definition(defn, reg)


def test_concept_restatement_is_allowed(registry):
    # a stored definition may restate a shipped one verbatim
    src = "foot(P :: Point, l :: Line) ::= [F :: Point where incident(F, l) /\\ perpendicular(line(P, F), l)];"
    typed = typecheck(parse(src), registry)
    assert typed.program.definitions[0].symbol == "foot"


def test_conflicting_redefinition_rejected(registry):
    src = "foot(P :: Point) ::= [F :: Point where incident(F, line(P, P))];"
    with pytest.raises(DuplicateSymbol):
        typecheck(parse(src), registry)


# --- pretty printing -----------------------------------------------------------


def test_pretty_canonicalizes_whitespace():
    assert pretty(parse("A:=point( ) ;")) == "A := point();\n"


def test_pretty_simson_round_trip():
    p = parse(SIMSON)
    assert program_equal(parse(pretty(p)), p)


def test_pretty_idempotent_on_simson():
    text = pretty(parse(SIMSON))
    assert pretty(parse(text)) == text


def test_pretty_parenthesizes_only_when_needed():
    src = "(p0(A) \\/ p1(A)) /\\ p2(A);"
    out = pretty(parse(src))
    assert out == "(p0(A) \\/ p1(A)) /\\ p2(A);\n"
    src2 = "p0(A) \\/ p1(A) /\\ p2(A);"
    assert pretty(parse(src2)) == "p0(A) \\/ p1(A) /\\ p2(A);\n"


# --- random program generator: 200-program round trip ---------------------------


_SORTS = [Sort.POINT, Sort.LINE, Sort.CIRCLE]


def _random_term(rng: random.Random, points: list[str], depth: int):
    if depth <= 0 or rng.random() < 0.4:
        return Var(rng.choice(points))
    head = rng.choice(["line", "midpoint", "foot", "circumcircle", "triangle"])
    if head == "line":
        return App("line", [_random_term(rng, points, 0), _random_term(rng, points, 0)])
    if head == "midpoint":
        return App(
            "midpoint", [_random_term(rng, points, 0), _random_term(rng, points, 0)]
        )
    if head == "foot":
        return App(
            "foot",
            [
                _random_term(rng, points, 0),
                App("line", [Var(rng.choice(points)), Var(rng.choice(points))]),
            ],
        )
    if head == "circumcircle":
        return App(
            "circumcircle",
            [App("triangle", [Var(rng.choice(points)) for _ in range(3)])],
        )
    return App("triangle", [Var(rng.choice(points)) for _ in range(3)])


def _random_atom(rng: random.Random, points: list[str]) -> Atom:
    pred = rng.choice(["incident", "collinear", "parallel", "eqdist", "equalp"])
    line = lambda: App(  # noqa: E731
        "line", [Var(rng.choice(points)), Var(rng.choice(points))]
    )
    pt = lambda: _random_term(rng, points, 1)  # noqa: E731
    if pred == "incident":
        return Atom("incident", [pt(), line()])
    if pred == "collinear":
        return Atom("collinear", [pt(), pt(), pt()])
    if pred == "parallel":
        return Atom("parallel", [line(), line()])
    if pred == "eqdist":
        return Atom("eqdist", [pt(), pt(), pt(), pt()])
    return Atom("equalp", [pt(), pt()])


def _random_formula(rng: random.Random, points: list[str], depth: int):
    if depth <= 0 or rng.random() < 0.45:
        return _random_atom(rng, points)
    kind = rng.choice([And, Or, Implies, Iff, Not])
    if kind is Not:
        return Not(_random_formula(rng, points, depth - 1))
    return kind(
        _random_formula(rng, points, depth - 1),
        _random_formula(rng, points, depth - 1),
    )


def _random_program(rng: random.Random) -> GeoProgram:
    n_points = rng.randint(2, 5)
    points = [f"P{i}" for i in range(n_points)]
    items: list = [Declaration(p, App("point", [])) for p in points]
    for _ in range(rng.randint(1, 4)):
        items.append(_random_formula(rng, points, rng.randint(0, 3)))
    return GeoProgram(items)


def test_round_trip_200_random_programs():
    rng = random.Random(987654)
    for _ in range(200):
        program = _random_program(rng)
        text = pretty(program)
        reparsed = parse(text)
        assert program_equal(reparsed, program)
        # idempotence: canonical text is a fixpoint
        assert pretty(reparsed) == text


def test_parse_pretty_parse_identity_on_random_programs():
    rng = random.Random(13579)
    for _ in range(50):
        source = pretty(_random_program(rng))
        once = parse(source)
        again = parse(pretty(once))
        assert program_equal(once, again)
