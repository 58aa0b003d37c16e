"""End-to-end pipelines from stored objects to prover and figure results.

Glue between the store and the backends: fetch an object's formal
representation, parse/typecheck it, expand to the right profile, then
either algebraize and run Wu's method (per biconditional direction) or
compile the construction and evaluate/export it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import geolang
from ..expand import ExpandedStatement, dgs_core, expand, prover_core
from ..geolang import GeoLangError, Registry, builtin_registry
from ..store import KnowledgeObject, Store
from . import figures
from .algebra import algebraize
from .construct import ConstructionSequence, compile_construction, export_script
from .wu import ProofResult, ProverLimits, wu_prove


class ProvingError(Exception):
    pass


@dataclass
class ProveOutcome:
    object_id: str
    directions: dict[str, ProofResult] = field(default_factory=dict)

    @property
    def status(self) -> str:
        statuses = {r.status for r in self.directions.values()}
        if statuses == {"proved"}:
            return "proved"
        if "refutedNumerically" in statuses:
            return "refutedNumerically"
        return "inconclusive"

    def to_json(self) -> dict:
        return {
            "objectId": self.object_id,
            "status": self.status,
            "directions": {
                name: {
                    "status": res.status,
                    "nondegeneracy": res.conditions_pretty(),
                    "coordinates": {
                        k: list(v)
                        for k, v in (res.problem.coordinates if res.problem else {}).items()
                    },
                    "counterexample": res.counterexample,
                    "trace": res.trace,
                }
                for name, res in self.directions.items()
            },
        }


def statement_for(
    store: Store,
    object_id: str,
    registry: Registry | None = None,
    profile=None,
) -> ExpandedStatement:
    obj = store.get(object_id)
    if not isinstance(obj, KnowledgeObject) or not obj.formal:
        raise ProvingError(f"object '{object_id}' has no formal representation")
    reg = registry or builtin_registry()
    try:
        typed = geolang.typecheck(geolang.parse(obj.formal), reg)
    except GeoLangError as e:
        raise ProvingError(f"formal representation of '{object_id}': {e}") from e
    return expand(typed, profile or prover_core())


def prove_object(
    store: Store,
    object_id: str,
    direction: str = "both",
    limits: ProverLimits | None = None,
    registry: Registry | None = None,
) -> ProveOutcome:
    """Prove a stored statement; biconditionals run per direction."""
    stmt = statement_for(store, object_id, registry)
    if stmt.biconditional:
        directions = (
            ["forward", "backward"] if direction == "both" else [direction]
        )
    else:
        directions = ["forward"]
        if direction not in ("both", "forward"):
            raise ProvingError(
                f"statement of '{object_id}' is not biconditional; "
                f"direction {direction!r} undefined"
            )
    outcome = ProveOutcome(object_id)
    for d in directions:
        problem = algebraize(stmt, d)
        outcome.directions[d] = wu_prove(problem, limits)
    return outcome


def construction_for(
    store: Store, object_id: str, registry: Registry | None = None
) -> ConstructionSequence:
    stmt = statement_for(store, object_id, registry, profile=dgs_core())
    return compile_construction(stmt)


def evaluate_object_figure(
    store: Store,
    object_id: str,
    assignment: dict | None,
    registry: Registry | None = None,
) -> dict:
    """Evaluate an object's figure; a missing assignment uses defaults.

    The response carries the free-point/parameter layout so a client
    can drive subsequent drags.
    """
    seq = construction_for(store, object_id, registry)
    program = figures.program_for(seq)
    full: dict[str, object] = {}
    spots = [(0.0, 0.0), (4.0, 0.0), (1.0, 3.0), (5.0, 3.0), (-2.0, 2.0), (2.0, -2.0)]
    k = 0
    for name, _, width in program.free_layout:
        if width == 2:
            full[name] = spots[k % len(spots)]
            k += 1
        else:
            full[name] = 0.8  # generic angle/parameter default
    if assignment:
        for name, value in assignment.items():
            full[name] = tuple(value) if isinstance(value, (list, tuple)) else value
    unknown = [n for n in full if n not in {e[0] for e in program.free_layout}]
    if unknown:
        raise ProvingError(f"unknown free name(s): {', '.join(sorted(unknown))}")
    fig = figures.evaluate(seq, full)
    result = fig.to_json()
    result["objectId"] = object_id
    result["free"] = {
        name: (list(full[name]) if width == 2 else full[name])
        for name, _, width in program.free_layout
    }
    result["steps"] = [
        {"op": s.op, "out": s.out, "args": list(s.args), "params": list(s.params)}
        for s in seq.steps
    ]
    result["conclusion"] = [
        {"pred": c.pred, "args": list(c.args)} for c in seq.conclusion
    ]
    return result


def object_script(
    store: Store,
    object_id: str,
    dialect: str = "generic-json",
    registry: Registry | None = None,
) -> str:
    obj = store.get(object_id)
    if isinstance(obj, KnowledgeObject) and obj.diagram and dialect == "generic-json":
        return obj.diagram
    seq = construction_for(store, object_id, registry)
    return export_script(seq, dialect)
