"""Knowledge base: typed objects, relations, queries, and persistence.

Objects are knowledge objects (definitions, theorems, proofs, ...) or
category objects (chapters/sections with ordered members).  Relations
are typed directed edges between objects.  The store persists to a
single versioned plain-text file, one tagged JSON record per line, in a
canonical order so that re-saving an unchanged store is byte-identical
(see docs/formats.md).

Concurrency: single writer, multiple readers.  All mutating methods
take an internal lock; reads are plain dict lookups over immutable-ish
snapshots and may run concurrently with each other.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field, replace

from . import geolang
from .geolang import GeoSyntaxError

STORE_HEADER = "geobook-store v1"

OBJECT_KINDS = (
    "Concept",
    "Axiom",
    "Lemma",
    "Theorem",
    "Corollary",
    "Conjecture",
    "Proof",
    "Problem",
    "Example",
    "Exercise",
    "Solution",
    "Algorithm",
    "Introduction",
    "Remark",
)

RELATION_KINDS = (
    "Inclusion",
    "Context",
    "Inheritance",
    "Derivation",
    "Implication",
    "Property",
    "Decision",
    "Justification",
    "Introduction",
    "Remark",
    "Complication",
    "Solution",
    "Application",
    "Equality",
    "Exercise",
    "Example",
    "Association",
)


class StoreError(Exception):
    pass


class InvalidKind(StoreError):
    pass


class DuplicateDefinition(StoreError):
    pass


class UnknownObject(StoreError):
    pass


class SelfRelation(StoreError):
    pass


class DuplicateRelation(StoreError):
    pass


class BothWildcards(StoreError):
    pass


class InvalidObject(StoreError):
    pass


class CategoryCycle(StoreError):
    pass


class IoFailure(StoreError):
    pass


class SchemaVersionMismatch(StoreError):
    pass


class CorruptRecord(StoreError):
    def __init__(self, path, line_no, detail):
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: corrupt record: {detail}")


@dataclass
class KnowledgeObject:
    id: str
    kind: str
    name: str
    keywords: list[str] = field(default_factory=list)
    natural: dict[str, str] = field(default_factory=dict)  # locale -> rich text
    formal: str | None = None
    algebraic: str | None = None  # opaque
    diagram: str | None = None  # construction-sequence source text

    def copy(self) -> "KnowledgeObject":
        return replace(
            self, keywords=list(self.keywords), natural=dict(self.natural)
        )


@dataclass
class CategoryObject:
    id: str
    title: dict[str, str] = field(default_factory=dict)  # locale -> text
    members: list[str] = field(default_factory=list)

    def copy(self) -> "CategoryObject":
        return replace(self, title=dict(self.title), members=list(self.members))


@dataclass(frozen=True)
class Relation:
    source: str
    target: str
    kind: str
    provenance: str = "manual"  # "manual" | "discovered"

    @property
    def triple(self) -> tuple[str, str, str]:
        return (self.source, self.target, self.kind)


def _valid_id(token: str) -> bool:
    return bool(token) and not any(c.isspace() for c in token)


def defined_symbol(obj) -> str | None:
    """The concept symbol an object formally defines, if any.

    A Concept whose formal representation contains a definition
    declaration defines that symbol.  A Concept without a formal
    representation stands for the primitive or tuple-like concept of
    the same (lowercased) name, which is how definitions of ``point``
    or ``triangle`` enter the discovery index.
    """
    if not isinstance(obj, KnowledgeObject) or obj.kind != "Concept":
        return None
    if obj.formal:
        try:
            program = geolang.parse(obj.formal)
        except GeoSyntaxError:
            return None
        defs = program.definitions
        if len(defs) == 1:
            return defs[0].symbol
        return None
    return obj.name.strip().lower() or None


class Store:
    def __init__(self):
        self._objects: dict[str, KnowledgeObject | CategoryObject] = {}
        self._relations: list[Relation] = []
        self._relation_index: set[tuple[str, str, str]] = set()
        self._next_id = 1
        self._lock = threading.RLock()

    # --- introspection ------------------------------------------------

    def __contains__(self, object_id: str) -> bool:
        return object_id in self._objects

    def __len__(self) -> int:
        return len(self._objects)

    def ids(self) -> list[str]:
        return sorted(self._objects)

    def objects(self):
        return [self._objects[i] for i in self.ids()]

    def relations(self) -> list[Relation]:
        return list(self._relations)

    def get(self, object_id: str) -> KnowledgeObject | CategoryObject:
        try:
            return self._objects[object_id]
        except KeyError:
            raise UnknownObject(f"no object with id '{object_id}'") from None

    def state_digest(self) -> str:
        """Content hash over everything observable; used by read-only tests."""
        import hashlib

        return hashlib.sha256(self.dumps().encode("utf-8")).hexdigest()

    # --- mutation -----------------------------------------------------

    def fresh_id(self) -> str:
        with self._lock:
            while True:
                token = f"obj-{self._next_id:06d}"
                self._next_id += 1
                if token not in self._objects:
                    return token

    def put_object(self, obj: KnowledgeObject | CategoryObject) -> str:
        """Insert or replace an object; returns its id.

        Replacing an existing id swaps the data items but keeps every
        incident relation.  Raises ``InvalidKind``, ``InvalidObject``,
        ``DuplicateDefinition``, or ``CategoryCycle``.
        """
        with self._lock:
            self._validate(obj)
            if not obj.id:
                obj.id = self.fresh_id()
            elif not _valid_id(obj.id):
                raise InvalidObject(f"bad object id {obj.id!r}")
            sym = defined_symbol(obj)
            if sym is not None and obj.formal:
                for other in self._objects.values():
                    if other.id != obj.id and defined_symbol(other) == sym and (
                        isinstance(other, KnowledgeObject) and other.formal
                    ):
                        raise DuplicateDefinition(
                            f"symbol '{sym}' is already defined by object "
                            f"'{other.id}'"
                        )
            if isinstance(obj, CategoryObject):
                self._check_category_acyclic(obj)
            self._objects[obj.id] = obj.copy()
            return obj.id

    def _validate(self, obj) -> None:
        if isinstance(obj, KnowledgeObject):
            if obj.kind not in OBJECT_KINDS:
                raise InvalidKind(f"unknown object kind {obj.kind!r}")
            if obj.kind == "Concept" and obj.formal:
                try:
                    program = geolang.parse(obj.formal)
                except GeoSyntaxError as e:
                    raise InvalidObject(
                        f"Concept formal representation does not parse: {e}"
                    ) from e
                if len(program.definitions) != 1:
                    raise InvalidObject(
                        "a Concept's formal representation must contain "
                        "exactly one definition declaration"
                    )
        elif isinstance(obj, CategoryObject):
            missing = [m for m in obj.members if m not in self._objects and m != obj.id]
            if missing:
                raise UnknownObject(
                    f"category member(s) not in store: {', '.join(missing)}"
                )
        else:
            raise InvalidObject(f"not a knowledge or category object: {obj!r}")

    def _check_category_acyclic(self, obj: CategoryObject) -> None:
        # would adding/replacing obj close a membership cycle?
        members = {obj.id: list(obj.members)}

        def reachable(start: str, target: str, seen: set[str]) -> bool:
            if start == target:
                return True
            if start in seen:
                return False
            seen.add(start)
            node = self._objects.get(start)
            kids = members.get(start) or (
                node.members if isinstance(node, CategoryObject) else []
            )
            return any(reachable(k, target, seen) for k in kids)

        for member in obj.members:
            if member == obj.id or reachable(member, obj.id, set()):
                raise CategoryCycle(
                    f"category '{obj.id}' would contain itself via '{member}'"
                )

    def remove_object(self, object_id: str) -> None:
        """Delete an object, its incident relations, and its membership
        entries in one step.  The id is never reused."""
        with self._lock:
            if object_id not in self._objects:
                raise UnknownObject(f"no object with id '{object_id}'")
            del self._objects[object_id]
            self._relations = [
                r
                for r in self._relations
                if r.source != object_id and r.target != object_id
            ]
            self._relation_index = {r.triple for r in self._relations}
            for other in self._objects.values():
                if isinstance(other, CategoryObject) and object_id in other.members:
                    other.members = [m for m in other.members if m != object_id]

    def add_relation(
        self, source: str, target: str, kind: str, provenance: str = "manual"
    ) -> None:
        with self._lock:
            if kind not in RELATION_KINDS:
                raise InvalidKind(f"unknown relation kind {kind!r}")
            if provenance not in ("manual", "discovered"):
                raise InvalidObject(f"bad provenance {provenance!r}")
            for oid in (source, target):
                if oid not in self._objects:
                    raise UnknownObject(f"no object with id '{oid}'")
            if source == target:
                raise SelfRelation(f"relation from '{source}' to itself")
            if (source, target, kind) in self._relation_index:
                raise DuplicateRelation(
                    f"relation ({source}, {target}, {kind}) already present"
                )
            rel = Relation(source, target, kind, provenance)
            self._relations.append(rel)
            self._relation_index.add(rel.triple)

    def has_relation(self, source: str, target: str, kind: str) -> bool:
        return (source, target, kind) in self._relation_index

    # --- queries --------------------------------------------------------

    def query_keywords(self, words: list[str]) -> set[str]:
        """Objects whose keyword set contains every given word
        (case-insensitive whole-word match)."""
        if not words:
            raise InvalidObject("query_keywords needs at least one word")
        wanted = {w.lower() for w in words}
        out = set()
        for obj in self._objects.values():
            if isinstance(obj, KnowledgeObject):
                have = {k.lower() for k in obj.keywords}
                if wanted <= have:
                    out.add(obj.id)
        return out

    def query_relation(
        self, source: str | None, target: str | None, kind: str
    ) -> set[str]:
        """``relation[*, id, k]`` / ``relation[id, *, k]`` — pass ``None``
        (or ``"*"``) for exactly one of source/target."""
        src = None if source in (None, "*") else source
        tgt = None if target in (None, "*") else target
        if (src is None) == (tgt is None):
            raise BothWildcards(
                "exactly one of source/target must be the wildcard"
            )
        if kind not in RELATION_KINDS:
            raise InvalidKind(f"unknown relation kind {kind!r}")
        fixed = src if src is not None else tgt
        if fixed not in self._objects:
            raise UnknownObject(f"no object with id '{fixed}'")
        if src is None:
            return {r.source for r in self._relations if r.target == tgt and r.kind == kind}
        return {r.target for r in self._relations if r.source == src and r.kind == kind}

    def definers(self, symbol: str) -> list[str]:
        """Ids of Concept objects defining a symbol, sorted."""
        out = [
            obj.id
            for obj in self._objects.values()
            if defined_symbol(obj) == symbol
        ]
        return sorted(out)

    def definition_objects(self) -> dict[str, list[str]]:
        index: dict[str, list[str]] = {}
        for obj in self.objects():
            sym = defined_symbol(obj)
            if sym is not None:
                index.setdefault(sym, []).append(obj.id)
        return index

    # --- persistence ----------------------------------------------------

    def dumps(self) -> str:
        lines = [STORE_HEADER]
        lines.append(_record({"record": "meta", "next_id": self._next_id}))
        for oid in self.ids():
            obj = self._objects[oid]
            if isinstance(obj, KnowledgeObject):
                lines.append(
                    _record(
                        {
                            "record": "object",
                            "id": obj.id,
                            "kind": obj.kind,
                            "name": obj.name,
                            "keywords": list(obj.keywords),
                            "natural": {k: obj.natural[k] for k in sorted(obj.natural)},
                            "formal": obj.formal,
                            "algebraic": obj.algebraic,
                            "diagram": obj.diagram,
                        }
                    )
                )
            else:
                lines.append(
                    _record(
                        {
                            "record": "category",
                            "id": obj.id,
                            "title": {k: obj.title[k] for k in sorted(obj.title)},
                            "members": list(obj.members),
                        }
                    )
                )
        for rel in sorted(self._relations, key=lambda r: (r.source, r.target, r.kind)):
            lines.append(
                _record(
                    {
                        "record": "relation",
                        "source": rel.source,
                        "target": rel.target,
                        "kind": rel.kind,
                        "provenance": rel.provenance,
                    }
                )
            )
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with self._lock:
            data = self.dumps()
            try:
                tmp = f"{path}.tmp"
                with open(tmp, "w", encoding="utf-8") as fh:
                    fh.write(data)
                import os

                os.replace(tmp, path)
            except OSError as e:
                raise IoFailure(f"cannot write store to {path}: {e}") from e

    @classmethod
    def loads(cls, text: str, path: str = "<string>") -> "Store":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("geobook-store "):
            raise SchemaVersionMismatch(
                f"{path}: missing 'geobook-store' header line"
            )
        if lines[0] != STORE_HEADER:
            raise SchemaVersionMismatch(
                f"{path}: unsupported store version {lines[0]!r}"
            )
        store = cls()
        pending_relations: list[tuple[int, dict]] = []
        for line_no, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorruptRecord(path, line_no, str(e)) from e
            if not isinstance(rec, dict) or "record" not in rec:
                raise CorruptRecord(path, line_no, "not a tagged record")
            tag = rec["record"]
            try:
                if tag == "meta":
                    store._next_id = int(rec["next_id"])
                elif tag == "object":
                    obj = KnowledgeObject(
                        id=rec["id"],
                        kind=rec["kind"],
                        name=rec["name"],
                        keywords=list(rec["keywords"]),
                        natural=dict(rec["natural"]),
                        formal=rec["formal"],
                        algebraic=rec["algebraic"],
                        diagram=rec["diagram"],
                    )
                    if obj.kind not in OBJECT_KINDS:
                        raise InvalidKind(f"unknown object kind {obj.kind!r}")
                    store._objects[obj.id] = obj
                elif tag == "category":
                    store._objects[rec["id"]] = CategoryObject(
                        id=rec["id"],
                        title=dict(rec["title"]),
                        members=list(rec["members"]),
                    )
                elif tag == "relation":
                    pending_relations.append((line_no, rec))
                else:
                    raise CorruptRecord(path, line_no, f"unknown tag {tag!r}")
            except (KeyError, TypeError, ValueError, StoreError) as e:
                if isinstance(e, CorruptRecord):
                    raise
                raise CorruptRecord(path, line_no, str(e)) from e
        for line_no, rec in pending_relations:
            try:
                store.add_relation(
                    rec["source"], rec["target"], rec["kind"], rec["provenance"]
                )
            except (KeyError, StoreError) as e:
                raise CorruptRecord(path, line_no, str(e)) from e
        store._validate_category_graph(path)
        return store

    def _validate_category_graph(self, path: str) -> None:
        """Loaded files must satisfy the same membership invariants puts do."""
        for obj in self._objects.values():
            if not isinstance(obj, CategoryObject):
                continue
            missing = [m for m in obj.members if m not in self._objects]
            if missing:
                raise CorruptRecord(
                    path,
                    0,
                    f"category '{obj.id}' references missing member(s): "
                    + ", ".join(missing),
                )
        states: dict[str, int] = {}  # 1 visiting, 2 done

        def visit(node_id: str) -> None:
            state = states.get(node_id)
            if state == 1:
                raise CorruptRecord(
                    path, 0, f"category membership cycle through '{node_id}'"
                )
            if state == 2:
                return
            node = self._objects.get(node_id)
            if isinstance(node, CategoryObject):
                states[node_id] = 1
                for member in node.members:
                    visit(member)
            states[node_id] = 2

        for oid, obj in self._objects.items():
            if isinstance(obj, CategoryObject):
                visit(oid)

    @classmethod
    def load(cls, path) -> "Store":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise IoFailure(f"cannot read store from {path}: {e}") from e
        return cls.loads(text, str(path))


def _record(fields: dict) -> str:
    return json.dumps(fields, ensure_ascii=True, separators=(", ", ": "))
