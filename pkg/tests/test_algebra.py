from __future__ import annotations

import pytest

from geobook.backends.algebra import (
    AlgebraError,
    UnsupportedAtom,
    algebraize,
)
from geobook.backends.poly import Poly
from geobook.expand import expand, prover_core
from geobook.geolang import parse, typecheck


@pytest.fixture(scope="module")
def core():
    return prover_core()


def _problem(src, registry, core, direction="forward"):
    stmt = expand(typecheck(parse(src), registry), core)
    return algebraize(stmt, direction)


def _sympy_poly(problem, p):
    sympy = pytest.importorskip("sympy")
    syms = sympy.symbols(" ".join(problem.var_names)) if problem.var_names else ()
    if len(problem.var_names) == 1:
        syms = (syms,)
    expr = sympy.Integer(0)
    for mono, coeff in p.terms.items():
        term = sympy.Integer(coeff)
        for i, e in enumerate(mono):
            term *= syms[i] ** e
        expr += term
    return sympy.expand(expr), dict(zip(problem.var_names, syms))


# --- atom translation ---------------------------------------------------------


def test_collinear_repeated_point_gives_zero_polynomial(registry, core):
    prob = _problem(
        "A := point(); B := point(); collinear(A, A, B);", registry, core
    )
    assert prob.conclusions == (Poly.zero(prob.nvars),)


def test_wlog_placement(registry, core):
    prob = _problem(
        "A := point(); B := point(); C := point(); collinear(A, B, C);",
        registry,
        core,
    )
    assert prob.coordinates["A"] == ("0", "0")
    assert prob.coordinates["B"] == ("u1", "0")
    assert prob.coordinates["C"] == ("u2", "u3")
    assert prob.n_params == 3
    assert any("WLOG" in n for n in prob.notes)


def test_midline_polynomials_against_sympy_oracle(registry, core):
    sympy = pytest.importorskip("sympy")
    src = (
        "A := point(); B := point(); C := point();\n"
        "M := midpoint(A, B); N := midpoint(A, C);\n"
        "parallel(line(M, N), line(B, C));"
    )
    prob = _problem(src, registry, core)
    assert len(prob.hypotheses) == 4
    assert len(prob.conclusions) == 1
    # hand-coordinatized oracle: A=(0,0), B=(u1,0), C=(u2,u3),
    # M=(x1,x2), N=(x3,x4)
    assert prob.coordinates == {
        "A": ("0", "0"),
        "B": ("u1", "0"),
        "C": ("u2", "u3"),
        "M": ("x1", "x2"),
        "N": ("x3", "x4"),
    }
    u1, u2, u3, x1, x2, x3, x4 = sympy.symbols("u1 u2 u3 x1 x2 x3 x4")
    # independent expansion of the defining predicates:
    # collinear(A, M, B): det[[Mx-Ax, My-Ay], [Bx-Ax, By-Ay]]
    want = [
        sympy.expand((x1 - 0) * (0 - 0) - (x2 - 0) * (u1 - 0)),  # collinear(A,M,B)
        sympy.expand(
            (x1 - 0) ** 2 + (x2 - 0) ** 2 - (x1 - u1) ** 2 - (x2 - 0) ** 2
        ),  # eqdist(M,A,M,B)
        sympy.expand((x3 - 0) * (u3 - 0) - (x4 - 0) * (u2 - 0)),  # collinear(A,N,C)
        sympy.expand(
            x3**2 + x4**2 - (x3 - u2) ** 2 - (x4 - u3) ** 2
        ),  # eqdist(N,A,N,C)
    ]
    got = [_sympy_poly(prob, h)[0] for h in prob.hypotheses]
    for w, g in zip(want, got):
        assert sympy.simplify(w - g) == 0 or sympy.simplify(w + g) == 0
    # conclusion parallel(line(M,N), line(B,C)):
    # cross((Nx-Mx, Ny-My), (Cx-Bx, Cy-By))
    want_conc = sympy.expand((x3 - x1) * (u3 - 0) - (x4 - x2) * (u2 - u1))
    got_conc = _sympy_poly(prob, prob.conclusions[0])[0]
    assert sympy.simplify(want_conc - got_conc) == 0 or (
        sympy.simplify(want_conc + got_conc) == 0
    )


def test_circle_incidence_polynomial(registry, core):
    sympy = pytest.importorskip("sympy")
    src = (
        "O := point(); A := point(); P := point();\n"
        "incident(P, circle(O, A));"
    )
    prob = _problem(src, registry, core)
    (conc,) = prob.conclusions
    expr, env = _sympy_poly(prob, conc)
    # |PO|^2 - |AO|^2 with O=(0,0), A=(u1,0), P=(u2,u3)
    want = sympy.expand(
        (env["u2"]) ** 2 + (env["u3"]) ** 2 - (env["u1"]) ** 2
    )
    assert sympy.simplify(expr - want) == 0


def test_simson_forward_structure(registry, core):
    src = (
        "A := point(); B := point(); C := point(); D := point();\n"
        "incident(D, circumcircle(triangle(A, B, C))) <=> "
        "collinear(foot(D, line(A, B)), foot(D, line(B, C)), foot(D, line(A, C)));"
    )
    prob = _problem(src, registry, core, "forward")
    # one circle-incidence hypothesis for D plus three defining equations
    # for the circle and two per foot
    assert len(prob.hypotheses) == 10
    assert len(prob.conclusions) == 1
    assert prob.n_params == 4  # u1..u3 triangle shape + u4 = D abscissa
    assert len(prob.var_names) == 14
    assert prob.coordinates["D"] == ("u4", "x4")
    # conclusion variables stay inside hypothesis vars + parameters
    hyp_vars = set()
    for h in prob.hypotheses:
        hyp_vars |= h.variables()
    for g in prob.conclusions:
        assert g.variables() <= hyp_vars | set(range(prob.n_params))


def test_simson_backward_absorbs_collinearity_into_d(registry, core):
    src = (
        "A := point(); B := point(); C := point(); D := point();\n"
        "incident(D, circumcircle(triangle(A, B, C))) <=> "
        "collinear(foot(D, line(A, B)), foot(D, line(B, C)), foot(D, line(A, C)));"
    )
    prob = _problem(src, registry, core, "backward")
    assert prob.coordinates["D"] == ("u4", "x4")
    assert len(prob.hypotheses) == 10
    (conc,) = prob.conclusions
    # conclusion is the circle membership of D
    assert conc.degree_in(prob.var_names.index("x4")) == 2


def test_equalp_gives_two_conclusion_parts(registry, core):
    src = (
        "A := point(); B := point();\n"
        "M := midpoint(A, B); N := midpoint(A, B);\n"
        "equalp(M, N);"
    )
    prob = _problem(src, registry, core)
    assert len(prob.conclusions) == 2


def test_direction_validation(registry, core):
    src = "A := point(); B := point(); collinear(A, A, B);"
    stmt = expand(typecheck(parse(src), registry), core)
    with pytest.raises(UnsupportedAtom):
        algebraize(stmt, "sideways")
    prob = algebraize(stmt, "forward")
    assert prob.direction == "forward"


def test_disjunctive_conclusion_rejected(registry, core):
    src = (
        "A := point(); B := point(); C := point();\n"
        "collinear(A, B, C) \\/ equalp(A, B);"
    )
    stmt = expand(typecheck(parse(src), registry), core)
    with pytest.raises(UnsupportedAtom):
        algebraize(stmt)


def test_line_variable_coordinates(registry, core):
    # median produces an aux Line: gauge (1, b, c) with two incidences
    src = (
        "A := point(); B := point(); C := point(); m := median(A, B, C); "
        "incident(A, m);"
    )
    prob = _problem(src, registry, core)
    coords = prob.coordinates["m"]
    assert coords[0] == "1"
    assert all(c.startswith("x") for c in coords[1:])


def test_overconstrained_tuple_sort_raises(registry, core):
    # a Triangle-sorted auxiliary cannot carry coordinates
    from geobook.expand import ExpandedStatement
    from geobook.expand import AuxVar
    from geobook.geolang import Sort, App, Var, Atom

    stmt = ExpandedStatement(
        free_vars=[("A", Sort.POINT)],
        aux_vars=[
            AuxVar(
                "T",
                Sort.TRIANGLE,
                App("triangle", [Var("A"), Var("A"), Var("A")]),
                [Atom("collinear", [Var("A"), Var("A"), Var("A")])],
            )
        ],
        constraints=[Atom("collinear", [Var("A"), Var("A"), Var("A")])],
        conclusion=Atom("collinear", [Var("A"), Var("A"), Var("A")]),
        biconditional=False,
    )
    stmt.constraints = list(stmt.aux_vars[0].constraints)
    with pytest.raises(AlgebraError):
        algebraize(stmt)
