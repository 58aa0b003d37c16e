"""Compilation of expanded statements into construction sequences.

A construction sequence is a single-assignment program over geometric
steps (free points, midpoints, feet, line intersections, circumcircles,
parameterized points on circles and lines, ...).  Dependent objects are
recognized either from derived terms the profile kept inline (the
dgs-core route) or from their defining constraint bundles (the
prover-core route): a point carrying two line incidences becomes an
intersection, a line incidence plus a perpendicularity becomes a foot,
a collinearity plus an equal-distance pair becomes a midpoint, a single
circle incidence becomes an angle-parameterized point on the circle.

Hypothesis atoms that keep constraining an already-determined point are
moved to the conclusion checks: for a point on three lines the compiler
intersects the first two and checks the third.  Branch choices (which
intersection of a line and a circle) are recorded explicitly in the
step.  Anything unrecognized raises ``NotConstructive`` naming the
blocking object.
"""

from __future__ import annotations

import json
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
    pretty_term,
)

OPS = (
    "free_point",
    "midpoint",
    "line",
    "foot",
    "intersect_ll",
    "circumcircle",
    "point_on_circle",
    "point_on_line",
    "circle",
    "perp_bisector",
    "perp_line",
    "parallel_line",
    "intersect_lc",
    "intersect_cc",
)

CHECK_PREDS = (
    "collinear",
    "incident_pl",
    "incident_pc",
    "parallel",
    "perpendicular",
    "eqdist",
    "equalp",
)


class ConstructError(Exception):
    pass


class NotConstructive(ConstructError):
    def __init__(self, name: str, detail: str = ""):
        self.object_name = name
        extra = f": {detail}" if detail else ""
        super().__init__(f"object '{name}' is not constructive{extra}")


class UnsupportedStep(ConstructError):
    def __init__(self, dialect: str, op: str):
        self.dialect = dialect
        self.op = op
        super().__init__(f"dialect '{dialect}' cannot express step '{op}'")


@dataclass(frozen=True)
class Step:
    op: str
    out: str
    args: tuple[str, ...] = ()
    params: tuple[str, ...] = ()  # names of scalar free parameters
    branch: int = 0  # intersection branch choice where applicable


@dataclass(frozen=True)
class Check:
    pred: str
    args: tuple[str, ...]


@dataclass
class ConstructionSequence:
    steps: list[Step] = field(default_factory=list)
    conclusion: list[Check] = field(default_factory=list)

    @property
    def free_points(self) -> list[str]:
        return [s.out for s in self.steps if s.op == "free_point"]

    @property
    def parameters(self) -> list[str]:
        out: list[str] = []
        for s in self.steps:
            for p in s.params:
                if p not in out:
                    out.append(p)
        return out

    @property
    def outputs(self) -> list[str]:
        return [s.out for s in self.steps]

    def step_for(self, name: str) -> Step | None:
        for s in self.steps:
            if s.out == name:
                return s
        return None


class _Builder:
    def __init__(self, stmt: ExpandedStatement):
        self.stmt = stmt
        self.steps: dict[str, Step] = {}  # out -> step, insertion-ordered
        self.line_slots: dict[tuple[str, str], str] = {}
        self.counters: dict[str, int] = {}
        self.sorts: dict[str, Sort] = {}

    def fresh(self, prefix: str) -> str:
        k = self.counters.get(prefix, 0) + 1
        self.counters[prefix] = k
        return f"_{prefix}{k}"

    def emit(self, step: Step, sort: Sort) -> str:
        self.steps[step.out] = step
        self.sorts[step.out] = sort
        return step.out

    def replace(self, out: str, step: Step, sort: Sort) -> None:
        self.steps[out] = step
        self.sorts[out] = sort

    # --- term route (symbols kept inline by the profile) ----------------

    def term_slot(self, t: Term) -> str:
        if isinstance(t, Var):
            if t.name in self.stmt.aliases:
                return self.term_slot(self.stmt.aliases[t.name])
            if t.name not in self.steps:
                raise NotConstructive(t.name, "used before any defining step")
            return t.name
        head = t.head
        if head == "line":
            a, b = (self.term_slot(x) for x in t.args)
            return self.line_between(a, b)
        if head == "circle":
            o, p = (self.term_slot(x) for x in t.args)
            return self.emit(
                Step("circle", self.fresh("circ"), (o, p)), Sort.CIRCLE
            )
        if head == "midpoint":
            a, b = (self.term_slot(x) for x in t.args)
            return self.emit(Step("midpoint", self.fresh("mid"), (a, b)), Sort.POINT)
        if head == "foot":
            p = self.term_slot(t.args[0])
            l = self.term_slot(t.args[1])
            return self.emit(Step("foot", self.fresh("foot"), (p, l)), Sort.POINT)
        if head == "intersection":
            l, m = (self.term_slot(x) for x in t.args)
            return self.emit(
                Step("intersect_ll", self.fresh("pt"), (l, m)), Sort.POINT
            )
        if head == "circumcircle":
            tri = t.args[0]
            pts = self.tuple_points(tri)
            return self.emit(
                Step("circumcircle", self.fresh("circ"), pts), Sort.CIRCLE
            )
        raise NotConstructive(pretty_term(t), f"no construction for '{head}'")

    def tuple_points(self, t: Term) -> tuple[str, ...]:
        if isinstance(t, Var) and t.name in self.stmt.aliases:
            return self.tuple_points(self.stmt.aliases[t.name])
        if isinstance(t, App) and t.head in ("triangle", "segment"):
            return tuple(self.term_slot(a) for a in t.args)
        raise NotConstructive(pretty_term(t), "expected a triangle or segment")

    def line_between(self, a: str, b: str) -> str:
        key = (a, b)
        if key in self.line_slots:
            return self.line_slots[key]
        name = self.fresh("ln")
        self.emit(Step("line", name, (a, b)), Sort.LINE)
        self.line_slots[key] = name
        return name

    # --- constraint-bundle route ------------------------------------------

    def compile_point_bundle(self, name: str, atoms: list[Atom]) -> list[Atom]:
        """Realize a point from its constraints; returns atoms that had to
        be demoted to conclusion checks (the two-loci rule)."""
        kinds = [self.classify(name, atom) for atom in atoms]
        tags = [k[0] for k in kinds]
        # recognizable step shapes first
        if sorted(tags) == ["on_line", "perp_through"]:
            on = kinds[tags.index("on_line")]
            perp = kinds[tags.index("perp_through")]
            if on[1] == perp[2]:
                self.replace(name, Step("foot", name, (perp[1], on[1])), Sort.POINT)
                return []
        if sorted(tags) == ["between", "eqdist_pair"]:
            bet = kinds[tags.index("between")]
            eq = kinds[tags.index("eqdist_pair")]
            if set(bet[1]) == set(eq[1]):
                a, b = eq[1]
                self.replace(name, Step("midpoint", name, (a, b)), Sort.POINT)
                return []
        # generic route: every constraint pins the point to a locus
        overflow: list[Atom] = []
        loci: list[tuple[str, str]] = []
        for kind, atom in zip(kinds, atoms):
            if len(loci) >= 2:
                overflow.append(atom)
                continue
            loci.append(self.locus_of(kind))
        self._emit_point_from_loci(name, loci)
        return overflow

    def locus_of(self, kind: tuple) -> tuple[str, str]:
        """("line"|"circle", slot) the constrained point must lie on."""
        tag = kind[0]
        if tag == "on_line":
            return ("line", kind[1])
        if tag == "on_circle":
            return ("circle", kind[1])
        if tag == "between":
            return ("line", self.line_between(*kind[1]))
        if tag == "eqdist_pair":
            return ("line", self.bisector(*kind[1]))
        if tag == "perp_through":
            _, other_end, base = kind
            return (
                "line",
                self.emit(
                    Step("perp_line", self.fresh("perp"), (base, other_end)),
                    Sort.LINE,
                ),
            )
        if tag == "parallel_through":
            _, other_end, base = kind
            return (
                "line",
                self.emit(
                    Step("parallel_line", self.fresh("par"), (base, other_end)),
                    Sort.LINE,
                ),
            )
        raise NotConstructive("<locus>", f"no locus for {tag}")  # pragma: no cover

    def _emit_point_from_loci(self, name: str, loci: list[tuple[str, str]]) -> None:
        if len(loci) == 0:
            self.replace(name, Step("free_point", name), Sort.POINT)
            return
        if len(loci) == 1:
            kind, slot = loci[0]
            if kind == "line":
                self.replace(
                    name,
                    Step("point_on_line", name, (slot,), (f"t_{name.lstrip('_')}",)),
                    Sort.POINT,
                )
            else:
                self.replace(
                    name,
                    Step(
                        "point_on_circle",
                        name,
                        (slot,),
                        (f"theta_{name.lstrip('_')}",),
                    ),
                    Sort.POINT,
                )
            return
        (k1, s1), (k2, s2) = loci
        if k1 == "line" and k2 == "line":
            self.replace(name, Step("intersect_ll", name, (s1, s2)), Sort.POINT)
        elif k1 == "line":
            self.replace(
                name, Step("intersect_lc", name, (s1, s2), (), branch=1), Sort.POINT
            )
        elif k2 == "line":
            self.replace(
                name, Step("intersect_lc", name, (s2, s1), (), branch=1), Sort.POINT
            )
        else:
            self.replace(
                name, Step("intersect_cc", name, (s1, s2), (), branch=1), Sort.POINT
            )

    def current_loci(self, name: str) -> list[tuple[str, str]]:
        """The loci already pinning a partially-determined point."""
        step = self.steps[name]
        if step.op == "free_point":
            return []
        if step.op == "point_on_line":
            return [("line", step.args[0])]
        if step.op == "point_on_circle":
            return [("circle", step.args[0])]
        raise NotConstructive(name, "point is already fully determined")

    def classify(self, name: str, atom: Atom):
        """Describe what one atom says about the point ``name``."""
        if atom.pred == "incident":
            subject = atom.args[0]
            if isinstance(subject, Var) and subject.name == name:
                target_sort = self.target_sort(atom.args[1])
                if target_sort is Sort.LINE:
                    return ("on_line", self.term_slot(atom.args[1]))
                if target_sort is Sort.CIRCLE:
                    return ("on_circle", self.term_slot(atom.args[1]))
        if atom.pred in ("perpendicular", "parallel"):
            # perpendicular(line(Q, P), l): P lies on the perpendicular
            # to l through Q (and symmetrically for parallel)
            tag = "perp_through" if atom.pred == "perpendicular" else "parallel_through"
            for i, j in ((0, 1), (1, 0)):
                leg = atom.args[i]
                if (
                    isinstance(leg, App)
                    and leg.head == "line"
                    and any(
                        isinstance(e, Var) and e.name == name for e in leg.args
                    )
                ):
                    other_end = next(
                        e for e in leg.args if not (isinstance(e, Var) and e.name == name)
                    )
                    return (
                        tag,
                        self.term_slot(other_end),
                        self.term_slot(atom.args[j]),
                    )
        if atom.pred == "collinear":
            positions = [
                i
                for i, a in enumerate(atom.args)
                if isinstance(a, Var) and a.name == name
            ]
            if len(positions) == 1:
                others = tuple(
                    self.term_slot(a) for i, a in enumerate(atom.args) if i != positions[0]
                )
                return ("between", others)
        if atom.pred == "eqdist":
            a, b, c, d = atom.args
            if (
                isinstance(a, Var)
                and isinstance(c, Var)
                and a.name == name
                and c.name == name
            ):
                return ("eqdist_pair", (self.term_slot(b), self.term_slot(d)))
        raise NotConstructive(
            name, f"cannot interpret constraint {atom.pred} for construction"
        )

    def target_sort(self, t: Term) -> Sort | None:
        if isinstance(t, Var):
            s = self.sorts.get(t.name) or self.stmt.var_sort(t.name)
            if s is None and t.name in self.stmt.aliases:
                return self.target_sort(self.stmt.aliases[t.name])
            return s or t.sort
        if t.head == "line":
            return Sort.LINE
        if t.head in ("circle", "circumcircle"):
            return Sort.CIRCLE
        return t.sort

    def bisector(self, a: str, b: str) -> str:
        return self.emit(
            Step("perp_bisector", self.fresh("bis"), (a, b)), Sort.LINE
        )

    def compile_line_bundle(self, name: str, atoms: list[Atom]) -> None:
        through: list[str] = []
        for atom in atoms:
            if atom.pred == "incident" and isinstance(atom.args[1], Var) and atom.args[1].name == name:
                through.append(self.term_slot(atom.args[0]))
            else:
                raise NotConstructive(name, f"line constrained by {atom.pred}")
        if len(through) != 2:
            raise NotConstructive(
                name, f"line needs exactly two incident points, got {len(through)}"
            )
        self.replace(name, Step("line", name, tuple(through)), Sort.LINE)

    def compile_circle_bundle(self, name: str, atoms: list[Atom]) -> None:
        through: list[str] = []
        for atom in atoms:
            if atom.pred == "incident" and isinstance(atom.args[1], Var) and atom.args[1].name == name:
                through.append(self.term_slot(atom.args[0]))
            else:
                raise NotConstructive(name, f"circle constrained by {atom.pred}")
        if len(through) != 3:
            raise NotConstructive(
                name, f"circle needs exactly three incident points, got {len(through)}"
            )
        self.replace(name, Step("circumcircle", name, tuple(through)), Sort.CIRCLE)


def compile_construction(stmt: ExpandedStatement) -> ConstructionSequence:
    """Compile a statement into an executable figure construction.

    For biconditional statements the forward reading is drawn: the
    left-hand side constraints are realized, the right-hand side is
    checked and displayed.
    """
    b = _Builder(stmt)

    for name, sort in stmt.free_vars:
        if sort is not Sort.POINT:
            raise NotConstructive(name, f"free object of sort {sort}")
        b.emit(Step("free_point", name), Sort.POINT)

    # placeholders first: defining bundles may reference auxiliaries that
    # were introduced after them (the final toposort repairs step order)
    constrained = [aux for aux in stmt.aux_vars if aux.constraints]
    for aux in constrained:
        b.emit(Step("free_point", aux.name), aux.sort)

    moved_to_checks: list[Atom] = []
    for aux in constrained:
        if aux.sort is Sort.POINT:
            moved_to_checks.extend(
                b.compile_point_bundle(aux.name, aux.constraints)
            )
        elif aux.sort is Sort.LINE:
            b.compile_line_bundle(aux.name, aux.constraints)
        elif aux.sort is Sort.CIRCLE:
            b.compile_circle_bundle(aux.name, aux.constraints)
        else:
            raise NotConstructive(aux.name, f"aux of sort {aux.sort}")

    for aux in stmt.aux_vars:
        if aux.constraints:
            continue
        slot = b.term_slot(aux.origin)
        if slot != aux.name and slot.startswith("_"):
            # name the value: re-emit the defining step under the
            # declared name so checks can reference it
            step = b.steps[slot]
            del b.steps[slot]
            renamed = Step(step.op, aux.name, step.args, step.params, step.branch)
            b.emit(renamed, b.sorts.pop(slot))
            for k, v in list(b.line_slots.items()):
                if v == slot:
                    b.line_slots[k] = aux.name

    # realized hypothesis side
    premises: list[Atom] = list(stmt.hypothesis_atoms())
    conclusion_checks: list[Atom] = []
    if stmt.conclusion is not None:
        if stmt.biconditional and isinstance(stmt.conclusion, Iff):
            for f in flatten_conjunction(stmt.conclusion.lhs):
                if not isinstance(f, Atom):
                    raise NotConstructive("<statement>", "non-conjunctive premise")
                premises.append(f)
            conclusion_side = stmt.conclusion.rhs
        else:
            conclusion_side = stmt.conclusion
        for f in flatten_conjunction(conclusion_side):
            if not isinstance(f, Atom):
                raise NotConstructive("<statement>", "non-conjunctive conclusion")
            conclusion_checks.append(f)

    for atom in premises:
        # absorb into the latest point that can still give up a degree of
        # freedom; a constraint nobody can absorb becomes a displayed
        # check (the rule that picks two lines and checks the third)
        absorbed = False
        for target in _upgradable_points(b, atom):
            try:
                kind = b.classify(target, atom)
            except NotConstructive:
                continue
            loci = b.current_loci(target)
            loci.append(b.locus_of(kind))
            b._emit_point_from_loci(target, loci)
            absorbed = True
            break
        if not absorbed:
            moved_to_checks.append(atom)

    checks: list[Check] = []
    for atom in moved_to_checks + conclusion_checks:
        checks.append(_atom_check(b, atom))

    steps = _toposort([b.steps[k] for k in b.steps])
    return ConstructionSequence(steps, checks)


def _upgradable_points(b: _Builder, atom: Atom) -> list[str]:
    """Points mentioned by the atom that can absorb it, latest first."""
    names: list[str] = []

    def visit(t: Term):
        if isinstance(t, Var):
            if t.name in b.stmt.aliases:
                visit(b.stmt.aliases[t.name])
            elif t.name not in names:
                names.append(t.name)
        else:
            for a in t.args:
                visit(a)

    for a in atom.args:
        visit(a)
    candidates = [
        n
        for n in names
        if n in b.steps
        and b.steps[n].op in ("free_point", "point_on_line", "point_on_circle")
        and b.sorts.get(n) is Sort.POINT
    ]
    order = list(b.steps)
    return sorted(candidates, key=order.index, reverse=True)


def _atom_check(b: _Builder, atom: Atom) -> Check:
    if atom.pred == "incident":
        target_sort = b.target_sort(atom.args[1])
        pred = "incident_pl" if target_sort is Sort.LINE else "incident_pc"
        return Check(pred, (b.term_slot(atom.args[0]), b.term_slot(atom.args[1])))
    if atom.pred in ("collinear", "parallel", "perpendicular", "eqdist", "equalp"):
        return Check(atom.pred, tuple(b.term_slot(a) for a in atom.args))
    raise NotConstructive("<conclusion>", f"cannot check predicate '{atom.pred}'")


def _toposort(steps: list[Step]) -> list[Step]:
    by_out = {s.out: s for s in steps}
    placed: list[Step] = []
    done: set[str] = set()
    visiting: set[str] = set()

    def visit(s: Step):
        if s.out in done:
            return
        if s.out in visiting:
            raise NotConstructive(s.out, "cyclic step dependencies")
        visiting.add(s.out)
        for a in s.args:
            if a in by_out:
                visit(by_out[a])
        visiting.discard(s.out)
        done.add(s.out)
        placed.append(s)

    for s in steps:
        visit(s)
    return placed


# --- script export --------------------------------------------------------

GENERIC_JSON_FORMAT = "geobook-figure-script"
GENERIC_JSON_VERSION = 1


def export_script(seq: ConstructionSequence, dialect: str) -> str:
    """Serialize a construction in a named dialect.

    ``generic-json`` is the documented machine-readable schema;
    ``ggb-commands`` is a textual command list in the style of
    mainstream dynamic-geometry software.
    """
    if dialect == "generic-json":
        return _export_generic_json(seq)
    if dialect == "ggb-commands":
        return _export_ggb(seq)
    raise UnsupportedStep(dialect, "<any>")


def _export_generic_json(seq: ConstructionSequence) -> str:
    doc = {
        "format": GENERIC_JSON_FORMAT,
        "version": GENERIC_JSON_VERSION,
        "free_points": seq.free_points,
        "parameters": seq.parameters,
        "steps": [
            {
                "op": s.op,
                "out": s.out,
                "args": list(s.args),
                **({"params": list(s.params)} if s.params else {}),
                **({"branch": s.branch} if s.branch else {}),
            }
            for s in seq.steps
        ],
        "conclusion": [
            {"pred": c.pred, "args": list(c.args)} for c in seq.conclusion
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


_DEFAULT_SPOTS = [
    (0.0, 0.0),
    (4.0, 0.0),
    (1.0, 3.0),
    (5.0, 3.0),
    (-2.0, 2.0),
    (2.0, -2.0),
    (6.0, 1.0),
    (-1.0, -3.0),
]

_GGB_CHECK = {
    "collinear": "AreCollinear({args})",
    "parallel": "AreParallel({args})",
    "perpendicular": "ArePerpendicular({args})",
    "equalp": "AreEqual({args})",
    "incident_pl": "IsOnPath({args})",
    "incident_pc": "IsOnPath({args})",
    "eqdist": "AreCongruent({args})",
}


def _ggb_name(name: str) -> str:
    return name.lstrip("_")


def _export_ggb(seq: ConstructionSequence) -> str:
    lines: list[str] = []
    free_index = 0
    for s in seq.steps:
        out = _ggb_name(s.out)
        args = tuple(_ggb_name(a) for a in s.args)
        if s.op == "free_point":
            x, y = _DEFAULT_SPOTS[free_index % len(_DEFAULT_SPOTS)]
            free_index += 1
            lines.append(f"{out} = ({x:g}, {y:g})")
        elif s.op == "midpoint":
            lines.append(f"{out} = Midpoint({args[0]}, {args[1]})")
        elif s.op == "line":
            lines.append(f"{out} = Line({args[0]}, {args[1]})")
        elif s.op == "foot":
            lines.append(f"{out} = ClosestPoint({args[1]}, {args[0]})")
        elif s.op == "intersect_ll":
            lines.append(f"{out} = Intersect({args[0]}, {args[1]})")
        elif s.op == "circumcircle":
            lines.append(f"{out} = Circle({args[0]}, {args[1]}, {args[2]})")
        elif s.op == "circle":
            lines.append(f"{out} = Circle({args[0]}, {args[1]})")
        elif s.op == "point_on_circle":
            lines.append(f"{out} = Point({args[0]})")
        elif s.op == "point_on_line":
            lines.append(f"{out} = Point({args[0]})")
        elif s.op == "perp_bisector":
            lines.append(f"{out} = PerpendicularBisector({args[0]}, {args[1]})")
        elif s.op == "perp_line":
            lines.append(f"{out} = PerpendicularLine({args[1]}, {args[0]})")
        elif s.op == "parallel_line":
            lines.append(f"{out} = Line({args[1]}, {args[0]})")
        elif s.op == "intersect_lc":
            lines.append(f"{out} = Intersect({args[0]}, {args[1]}, {max(s.branch, 1)})")
        elif s.op == "intersect_cc":
            lines.append(f"{out} = Intersect({args[0]}, {args[1]}, {max(s.branch, 1)})")
        else:  # pragma: no cover - every shipped op is mapped
            raise UnsupportedStep("ggb-commands", s.op)
    for c in seq.conclusion:
        template = _GGB_CHECK.get(c.pred)
        if template is None:
            raise UnsupportedStep("ggb-commands", f"check:{c.pred}")
        rendered = template.format(args=", ".join(_ggb_name(a) for a in c.args))
        lines.append(f"# conclusion: {rendered}")
    return "\n".join(lines) + "\n"
