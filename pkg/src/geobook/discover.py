"""Automatic discovery of Context and Inheritance relations.

An object's formal representation is parsed and typechecked; every
concept symbol applied in it is matched against the store's defining
Concept objects.  Each match yields a relation candidate from the
definition to the object: Inheritance when the object is itself a
Concept (a definition built on other definitions), Context otherwise.
Candidates are proposals only; nothing is written to the store until
``accept_candidates`` is called with the user's selection.

Definitions are matched in the formal representation only; symbols in
natural-language text are deliberately not mined.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from . import geolang
from .geolang import GeoLangError, Registry, builtin_registry, register_definition
from .store import KnowledgeObject, Store, UnknownObject


class DiscoveryError(Exception):
    pass


class ParseFailure(DiscoveryError):
    def __init__(self, object_id: str, cause: Exception):
        self.object_id = object_id
        self.cause = cause
        super().__init__(f"formal representation of '{object_id}' failed: {cause}")


class StaleCandidate(DiscoveryError):
    pass


@dataclass(frozen=True)
class RelationCandidate:
    source: str  # defining object
    target: str
    kind: str  # "Context" | "Inheritance"
    evidence: frozenset[str]  # matched concept symbols
    ambiguous: bool = False  # another object defines the same symbol(s)
    target_fingerprint: str = ""

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "kind": self.kind,
            "evidence": sorted(self.evidence),
            "ambiguousDefiner": self.ambiguous,
            "targetFingerprint": self.target_fingerprint,
        }

    @classmethod
    def from_json(cls, data: dict) -> "RelationCandidate":
        return cls(
            source=data["source"],
            target=data["target"],
            kind=data["kind"],
            evidence=frozenset(data["evidence"]),
            ambiguous=bool(data.get("ambiguousDefiner", False)),
            target_fingerprint=data.get("targetFingerprint", ""),
        )


@dataclass
class DiscoveryResult:
    target: str
    candidates: list[RelationCandidate] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.candidates)

    def __len__(self) -> int:
        return len(self.candidates)

    def sources(self) -> set[str]:
        return {c.source for c in self.candidates}


def registry_for_store(store: Store, base: Registry | None = None) -> Registry:
    """Builtin registry extended with definitions stored as Concepts.

    A stored definition whose symbol already exists (a restatement of a
    shipped concept) is left alone; new symbols are registered so that
    statements using custom concepts typecheck.
    """
    reg = (base or builtin_registry()).copy()
    for obj in store.objects():
        if not isinstance(obj, KnowledgeObject) or not obj.formal:
            continue
        if obj.kind != "Concept":
            continue
        try:
            program = geolang.parse(obj.formal)
        except GeoLangError:
            continue
        for defn in program.definitions:
            if defn.symbol in reg:
                continue
            try:
                typed = geolang.typecheck(program, reg)
                (checked,) = [
                    d for d in typed.program.definitions if d.symbol == defn.symbol
                ]
                register_definition(checked, reg)
            except GeoLangError:
                continue
    return reg


def object_fingerprint(obj: KnowledgeObject) -> str:
    payload = (obj.formal or "").encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:16]


def discover(
    object_id: str, store: Store, registry: Registry | None = None
) -> DiscoveryResult:
    """Propose Context/Inheritance candidates for one object.

    Raises :class:`ParseFailure` when the formal representation does
    not parse or typecheck; symbols without any defining object are
    reported as warnings, not errors.
    """
    obj = store.get(object_id)
    if not isinstance(obj, KnowledgeObject) or not obj.formal:
        raise ParseFailure(
            object_id, ValueError("object has no formal representation")
        )
    reg = registry or registry_for_store(store)
    try:
        typed = geolang.typecheck(geolang.parse(obj.formal), reg)
    except GeoLangError as e:
        raise ParseFailure(object_id, e) from e

    own_symbols = {d.symbol for d in typed.program.definitions}
    result = DiscoveryResult(target=object_id)
    definer_index = store.definition_objects()
    fingerprint = object_fingerprint(obj)
    kind = "Inheritance" if obj.kind == "Concept" else "Context"

    by_definer: dict[str, set[str]] = {}
    ambiguous_definers: set[str] = set()
    for symbol in sorted(typed.symbols - own_symbols):
        definers = [d for d in definer_index.get(symbol, []) if d != object_id]
        if not definers:
            result.warnings.append(
                f"no defining object for symbol '{symbol}'"
            )
            continue
        for definer in definers:
            by_definer.setdefault(definer, set()).add(symbol)
            if len(definers) > 1:
                ambiguous_definers.add(definer)
    for definer in sorted(by_definer):
        result.candidates.append(
            RelationCandidate(
                source=definer,
                target=object_id,
                kind=kind,
                evidence=frozenset(by_definer[definer]),
                ambiguous=definer in ambiguous_definers,
                target_fingerprint=fingerprint,
            )
        )
    return result


def accept_candidates(
    candidates, store: Store, check_stale: bool = True
) -> int:
    """Write accepted candidates as relations with provenance
    ``discovered``; duplicates of existing relations are silently
    skipped.  Returns the number of relations added.  Raises
    :class:`StaleCandidate` when a target changed since discovery."""
    added = 0
    for cand in candidates:
        try:
            obj = store.get(cand.target)
        except UnknownObject:
            raise StaleCandidate(
                f"target '{cand.target}' no longer exists"
            ) from None
        if check_stale and cand.target_fingerprint:
            if (
                not isinstance(obj, KnowledgeObject)
                or object_fingerprint(obj) != cand.target_fingerprint
            ):
                raise StaleCandidate(
                    f"object '{cand.target}' changed since discovery"
                )
        if store.has_relation(cand.source, cand.target, cand.kind):
            continue
        store.add_relation(cand.source, cand.target, cand.kind, "discovered")
        added += 1
    return added
