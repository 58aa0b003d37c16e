"""Coordinatization: expanded statements to polynomial problems.

Free points receive parameter coordinates with the usual WLOG placement
(the first fully-free point sits at the origin, the second on the
positive x-axis), dependent objects receive dependent variables ordered
by construction dependency, and each primitive atom maps to its
standard polynomial: collinearity and line incidence are 3x3
determinants, parallel/perpendicular are cross/dot products of
direction vectors, eqdist and circle incidence are squared-distance
differences.

A hypothesis atom that is not the definition of an auxiliary object
consumes one coordinate degree of freedom of the most recently
introduced object it (transitively) constrains - e.g. ``D`` keeps a
parameter abscissa and gets a dependent ordinate when the statement
puts it on a circle.  All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..expand import ExpandedStatement
from ..geolang import (
    App,
    Atom,
    Iff,
    Sort,
    Term,
    Var,
    flatten_conjunction,
    pretty_formula,
)
from .poly import Poly


class AlgebraError(Exception):
    pass


class UnsupportedAtom(AlgebraError):
    pass


class OverconstrainedDeclaration(AlgebraError):
    pass


@dataclass
class AlgebraicProblem:
    hypotheses: list[Poly]
    conclusions: tuple[Poly, ...]
    var_names: list[str]  # parameters u1..um then dependents x1..xn
    n_params: int
    coordinates: dict[str, tuple[str, ...]]  # object -> coordinate names
    direction: str = "forward"
    notes: list[str] = field(default_factory=list)
    nondegeneracy: list[Poly] = field(default_factory=list)  # filled by the prover

    @property
    def nvars(self) -> int:
        return len(self.var_names)

    @property
    def dependent_vars(self) -> list[int]:
        return list(range(self.n_params, len(self.var_names)))

    def pretty_poly(self, p: Poly) -> str:
        return p.pretty(self.var_names)


@dataclass
class _ObjectInfo:
    name: str
    sort: Sort
    index: int  # base order
    defining: list[Atom] = field(default_factory=list)
    absorbed: list[Atom] = field(default_factory=list)

    @property
    def capacity(self) -> int:
        # assignable degrees of freedom of the coordinate representation
        if self.sort is Sort.POINT:
            return 2
        if self.sort is Sort.CIRCLE:
            return 3
        if self.sort is Sort.LINE:
            return 2  # (1, b, c) gauge: first coefficient fixed to 1
        raise OverconstrainedDeclaration(
            f"object '{self.name}' of sort {self.sort} cannot carry coordinates"
        )

    @property
    def used(self) -> int:
        return len(self.defining) + len(self.absorbed)

    @property
    def remaining(self) -> int:
        return max(self.capacity - self.used, 0)


def _split_sides(stmt: ExpandedStatement, direction: str):
    """(premise atoms, conclusion atoms) for the requested direction."""
    if direction not in ("forward", "backward"):
        raise UnsupportedAtom(f"unknown direction {direction!r}")
    conclusion = stmt.conclusion
    if conclusion is None:
        raise UnsupportedAtom("statement has no conclusion formula")
    if stmt.biconditional:
        assert isinstance(conclusion, Iff)
        lhs, rhs = conclusion.lhs, conclusion.rhs
        if direction == "forward":
            prem_f, concl_f = lhs, rhs
        elif direction == "backward":
            prem_f, concl_f = rhs, lhs
        else:
            raise UnsupportedAtom(
                f"direction {direction!r} invalid for a biconditional"
            )
    else:
        prem_f, concl_f = None, conclusion
    premises = [] if prem_f is None else flatten_conjunction(prem_f)
    conclusions = flatten_conjunction(concl_f)
    for f in premises + conclusions:
        if not isinstance(f, Atom):
            raise UnsupportedAtom(
                f"cannot algebraize non-conjunctive formula part: "
                f"{pretty_formula(f)}"
            )
    return premises, conclusions


def _mentioned(atom: Atom) -> list[str]:
    names: list[str] = []

    def from_term(t: Term) -> None:
        if isinstance(t, Var):
            if t.name not in names:
                names.append(t.name)
        else:
            for a in t.args:
                from_term(a)

    for a in atom.args:
        from_term(a)
    return names


def algebraize(stmt: ExpandedStatement, direction: str = "forward") -> AlgebraicProblem:
    """Translate an expanded prover-profile statement to polynomials.

    For biconditional statements ``direction`` picks the implication;
    plain statements use ``"forward"``.

    A point that absorbs one hypothesis equation keeps a parameter
    abscissa and gets a dependent ordinate; when the equation turns out
    not to involve the ordinate at all (e.g. equidistance from two
    points at the same height pins the abscissa instead), the roles for
    that point are flipped and the problem rebuilt, so the dependent
    variable is always one the hypotheses actually determine.
    """
    flips: set[str] = set()
    for _ in range(8):
        problem, absorbed_deps = _build_problem(stmt, direction, flips)
        undetermined = [
            name
            for name, indices in absorbed_deps.items()
            if name not in flips
            and any(
                all(index not in h.variables() for h in problem.hypotheses)
                for index in indices
            )
        ]
        if not undetermined:
            return problem
        flips.add(undetermined[0])
    return problem


def _build_problem(
    stmt: ExpandedStatement, direction: str, flips: set[str]
) -> tuple[AlgebraicProblem, dict[str, list[int]]]:
    premises, conclusion_atoms = _split_sides(stmt, direction)

    objects: dict[str, _ObjectInfo] = {}
    order: list[_ObjectInfo] = []

    def add_object(name: str, sort: Sort) -> _ObjectInfo:
        info = _ObjectInfo(name, sort, len(order))
        objects[name] = info
        order.append(info)
        return info

    for name, sort in stmt.free_vars:
        add_object(name, sort)
    for aux in stmt.aux_vars:
        info = add_object(aux.name, aux.sort)
        info.defining = list(aux.constraints)

    # hypothesis atoms that define nothing get absorbed into the dof of
    # the latest object in their transitive input closure
    defining_ids = stmt.defining_atom_ids
    plain_hyp = [a for a in stmt.constraints if id(a) not in defining_ids]
    plain_hyp += premises

    def closure(names: list[str]) -> set[str]:
        seen: set[str] = set()
        frontier = list(names)
        while frontier:
            n = frontier.pop()
            if n in seen or n not in objects:
                continue
            seen.add(n)
            for atom in objects[n].defining:
                frontier.extend(_mentioned(atom))
        return seen

    unabsorbed: list[Atom] = []
    for atom in plain_hyp:
        candidates = [
            objects[n] for n in closure(_mentioned(atom)) if objects[n].remaining > 0
        ]
        if candidates:
            target = max(candidates, key=lambda o: o.index)
            target.absorbed.append(atom)
        else:
            unabsorbed.append(atom)

    # WLOG placement for the first two untouched free points
    pure_free = [
        o
        for o in order
        if o.sort is Sort.POINT and not o.defining and not o.absorbed
    ]
    pinned: dict[str, int] = {}  # name -> number of pinned coordinates
    notes: list[str] = []
    if pure_free:
        pinned[pure_free[0].name] = 2
        notes.append(f"WLOG {pure_free[0].name} = (0, 0)")
    if len(pure_free) > 1:
        pinned[pure_free[1].name] = 1
        notes.append(f"WLOG {pure_free[1].name} = (u1, 0) on the x-axis")

    ordered = _dependency_order(order, objects)

    # assign coordinate descriptors in dependency order
    n_params = 0
    n_deps = 0
    descriptors: dict[str, tuple] = {}  # name -> tuple of ("0"|"1"|("u",i)|("x",i))

    def next_param():
        nonlocal n_params
        n_params += 1
        return ("u", n_params - 1)

    def next_dep():
        nonlocal n_deps
        n_deps += 1
        return ("x", n_deps - 1)

    absorbed_deps: dict[str, list[int]] = {}
    for info in ordered:
        dep_count = min(info.used, info.capacity)
        if info.sort is Sort.POINT:
            pin = pinned.get(info.name, 0)
            if pin == 2:
                coords = ("0", "0")
            elif pin == 1:
                coords = (next_param(), "0")
            elif info.name in flips and dep_count == 1:
                coords = (next_dep(), next_param())
            else:
                free_count = 2 - dep_count
                coords = tuple(
                    next_param() if i < free_count else next_dep() for i in range(2)
                )
            if info.absorbed and dep_count:
                # dependent-namespace indices; offset by n_params below
                absorbed_deps[info.name] = [
                    c[1] for c in coords if not isinstance(c, str) and c[0] == "x"
                ]
        elif info.sort is Sort.CIRCLE:
            free_count = 3 - dep_count
            coords = tuple(
                next_param() if i < free_count else next_dep() for i in range(3)
            )
        else:  # LINE, gauge (1, b, c)
            free_count = 2 - dep_count
            coords = ("1",) + tuple(
                next_param() if i < free_count else next_dep() for i in range(2)
            )
        descriptors[info.name] = coords

    nvars = n_params + n_deps
    var_names = [f"u{i + 1}" for i in range(n_params)] + [
        f"x{i + 1}" for i in range(n_deps)
    ]

    def materialize(desc) -> Poly:
        if desc == "0":
            return Poly.zero(nvars)
        if desc == "1":
            return Poly.const(nvars, 1)
        tag, i = desc
        return Poly.var(nvars, i if tag == "u" else n_params + i)

    coords: dict[str, tuple[Poly, ...]] = {
        name: tuple(materialize(d) for d in desc)
        for name, desc in descriptors.items()
    }
    coordinate_names = {
        name: tuple(
            d if isinstance(d, str) else var_names[(d[1] if d[0] == "u" else n_params + d[1])]
            for d in desc
        )
        for name, desc in descriptors.items()
    }

    translator = _AtomTranslator(coords, {o.name: o.sort for o in order}, nvars)

    hypotheses: list[Poly] = []
    seen: set = set()
    hypothesis_atoms = list(stmt.constraints) + premises
    for atom in hypothesis_atoms:
        for p in translator.atom_polys(atom):
            if p.is_zero():
                continue
            key = frozenset(p.terms.items())
            if key not in seen:
                seen.add(key)
                hypotheses.append(p)

    conclusions: list[Poly] = []
    for atom in conclusion_atoms:
        for p in translator.atom_polys(atom):
            conclusions.append(p)
    if not conclusions:
        conclusions = [Poly.zero(nvars)]

    if unabsorbed:
        notes.append(
            "hypotheses not absorbed into coordinates: "
            + "; ".join(pretty_formula(a) for a in unabsorbed)
        )
    if flips:
        notes.append(
            "abscissa made dependent for: " + ", ".join(sorted(flips))
        )

    problem = AlgebraicProblem(
        hypotheses=hypotheses,
        conclusions=tuple(conclusions),
        var_names=var_names,
        n_params=n_params,
        coordinates=coordinate_names,
        direction=direction,
        notes=notes,
    )
    return problem, {
        name: [n_params + i for i in indices]
        for name, indices in absorbed_deps.items()
    }


def _dependency_order(order, objects) -> list[_ObjectInfo]:
    """Kahn's algorithm over defining dependencies (hard) and absorbed
    dependencies (soft, dropped if they would create a cycle), with the
    introduction order as tie-break."""
    hard: dict[str, set[str]] = {o.name: set() for o in order}
    soft: dict[str, set[str]] = {o.name: set() for o in order}
    for o in order:
        for atom in o.defining:
            hard[o.name].update(n for n in _mentioned(atom) if n in objects and n != o.name)
        for atom in o.absorbed:
            soft[o.name].update(n for n in _mentioned(atom) if n in objects and n != o.name)

    placed: list[_ObjectInfo] = []
    done: set[str] = set()
    remaining = [o.name for o in order]
    while remaining:
        ready = [
            n
            for n in remaining
            if hard[n] <= done and (soft[n] - done) == set()
        ]
        if not ready:
            # soft cycle: release the earliest object whose hard deps are met
            releasable = [n for n in remaining if hard[n] <= done]
            if not releasable:
                raise AlgebraError("cyclic defining constraints")  # pragma: no cover
            n = min(releasable, key=lambda m: objects[m].index)
            soft[n] = set()
            continue
        n = min(ready, key=lambda m: objects[m].index)
        placed.append(objects[n])
        done.add(n)
        remaining.remove(n)
    return placed


class _AtomTranslator:
    def __init__(self, coords, sorts, nvars):
        self.coords = coords
        self.sorts = sorts
        self.nvars = nvars

    def point(self, t: Term) -> tuple[Poly, Poly]:
        if isinstance(t, Var):
            c = self.coords.get(t.name)
            if c is None or len(c) != 2:
                raise UnsupportedAtom(f"'{t}' is not a coordinate point")
            return c  # type: ignore[return-value]
        raise UnsupportedAtom(f"point-valued term '{t}' not in primitive form")

    def line(self, t: Term):
        """("pts", P, Q) for line(P, Q); ("coeffs", a, b, c) for a line variable."""
        if isinstance(t, App) and t.head == "line":
            return ("pts", self.point(t.args[0]), self.point(t.args[1]))
        if isinstance(t, Var) and self.sorts.get(t.name) is Sort.LINE:
            return ("coeffs",) + tuple(self.coords[t.name])
        raise UnsupportedAtom(f"'{t}' is not a line")

    def direction(self, rep) -> tuple[Poly, Poly]:
        if rep[0] == "pts":
            (px, py), (qx, qy) = rep[1], rep[2]
            return (qx - px, qy - py)
        _, a, b, _c = rep
        return (b, -1 * a)

    def atom_polys(self, atom: Atom) -> list[Poly]:
        pred = atom.pred
        args = atom.args
        if pred == "collinear":
            (ax, ay), (bx, by), (cx, cy) = (self.point(a) for a in args)
            return [(bx - ax) * (cy - ay) - (by - ay) * (cx - ax)]
        if pred == "incident":
            px, py = self.point(args[0])
            target = args[1]
            sort = self._term_sort(target)
            if sort is Sort.LINE:
                rep = self.line(target)
                if rep[0] == "pts":
                    (ax, ay), (bx, by) = rep[1], rep[2]
                    return [(bx - ax) * (py - ay) - (by - ay) * (px - ax)]
                _, a, b, c = rep
                return [a * px + b * py + c]
            if sort is Sort.CIRCLE:
                if isinstance(target, App) and target.head == "circle":
                    ox, oy = self.point(target.args[0])
                    tx, ty = self.point(target.args[1])
                    return [
                        (px - ox) ** 2
                        + (py - oy) ** 2
                        - (tx - ox) ** 2
                        - (ty - oy) ** 2
                    ]
                cx, cy, r2 = self.coords[target.name]  # type: ignore[union-attr]
                return [(px - cx) ** 2 + (py - cy) ** 2 - r2]
            raise UnsupportedAtom(f"incident target '{target}' unsupported")
        if pred == "parallel":
            d1 = self.direction(self.line(args[0]))
            d2 = self.direction(self.line(args[1]))
            return [d1[0] * d2[1] - d1[1] * d2[0]]
        if pred == "perpendicular":
            d1 = self.direction(self.line(args[0]))
            d2 = self.direction(self.line(args[1]))
            return [d1[0] * d2[0] + d1[1] * d2[1]]
        if pred == "eqdist":
            (ax, ay), (bx, by), (cx, cy), (dx, dy) = (self.point(a) for a in args)
            return [
                (ax - bx) ** 2 + (ay - by) ** 2 - (cx - dx) ** 2 - (cy - dy) ** 2
            ]
        if pred == "equalp":
            (px, py), (qx, qy) = (self.point(a) for a in args)
            return [px - qx, py - qy]
        raise UnsupportedAtom(f"no polynomial form for predicate '{pred}'")

    def _term_sort(self, t: Term) -> Sort | None:
        if isinstance(t, Var):
            return self.sorts.get(t.name, t.sort)
        if t.head == "line":
            return Sort.LINE
        if t.head == "circle":
            return Sort.CIRCLE
        return t.sort
