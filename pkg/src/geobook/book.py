"""Textbook structure and real-time consistency checking.

A textbook is an ordered category tree whose leaves reference store
objects.  ``linearize`` flattens it depth-first into the reading order;
``check`` validates that order against the precedence rules the store's
relations induce and reports violations instead of raising.  ``edit``
applies structural operations to an immutable book value and can
recheck in the same call, which is the real-time feedback contract.

The default precedence policy encodes common textbook conventions: a
definition precedes whatever it gives context to, a proof follows the
proposition it justifies, a solution follows its problem, and so on.
Curricula can override it via a policy file (one line per relation
kind, see docs/formats.md).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace

from .store import RELATION_KINDS, Store

BOOK_HEADER = "geobook-book v1"
POLICY_HEADER = "geobook-policy v1"

SOURCE_FIRST = "sourceFirst"
TARGET_FIRST = "targetFirst"
ADJACENT_AFTER_TARGET = "adjacentAfterTarget"
NO_RULE = "none"

RULES = (SOURCE_FIRST, TARGET_FIRST, ADJACENT_AFTER_TARGET, NO_RULE)


class BookError(Exception):
    pass


class InvalidPosition(BookError):
    pass


class DuplicateLeaf(BookError):
    pass


class DanglingReference(BookError):
    pass


class CycleDetected(BookError):
    pass


class PolicyError(BookError):
    pass


# --- tree ------------------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    object_id: str


@dataclass(frozen=True)
class Category:
    id: str
    title: str
    children: tuple = ()  # Category | Leaf


Node = Category | Leaf


@dataclass(frozen=True)
class Textbook:
    id: str
    title: str
    root: Category

    def find_category(self, category_id: str) -> Category | None:
        def walk(node: Category) -> Category | None:
            if node.id == category_id:
                return node
            for child in node.children:
                if isinstance(child, Category):
                    found = walk(child)
                    if found:
                        return found
            return None

        return walk(self.root)

    def parent_of(self, node_id: str) -> tuple[Category, int] | None:
        """(parent category, index) of a category or leaf, or None."""

        def walk(node: Category):
            for i, child in enumerate(node.children):
                key = child.id if isinstance(child, Category) else child.object_id
                if key == node_id:
                    return (node, i)
                if isinstance(child, Category):
                    found = walk(child)
                    if found:
                        return found
            return None

        return walk(self.root)

    def leaf_ids(self) -> list[str]:
        return linearize(self)


def linearize(book: Textbook, store: Store | None = None) -> list[str]:
    """Depth-first, left-to-right reading order of the leaves.

    Raises :class:`DuplicateLeaf` if an object appears twice,
    :class:`CycleDetected` on a malformed shared/cyclic tree, and, when
    a store is supplied, :class:`DanglingReference` for leaves that
    reference missing objects.
    """
    order: list[str] = []
    seen: set[str] = set()
    visiting: set[int] = set()
    seen_categories: set[str] = set()

    def walk(node: Category) -> None:
        if id(node) in visiting:
            raise CycleDetected(f"category '{node.id}' contains itself")
        if node.id in seen_categories:
            raise CycleDetected(f"category id '{node.id}' appears twice")
        visiting.add(id(node))
        seen_categories.add(node.id)
        for child in node.children:
            if isinstance(child, Category):
                walk(child)
            else:
                if child.object_id in seen:
                    raise DuplicateLeaf(
                        f"object '{child.object_id}' appears twice in the book"
                    )
                seen.add(child.object_id)
                order.append(child.object_id)
        visiting.discard(id(node))

    walk(book.root)
    if store is not None:
        missing = [oid for oid in order if oid not in store]
        if missing:
            raise DanglingReference(
                "book references missing object(s): " + ", ".join(missing)
            )
    return order


# --- precedence policy --------------------------------------------------------


@dataclass(frozen=True)
class PrecedencePolicy:
    name: str
    order: dict[str, str]  # relation kind -> rule
    required: dict[str, bool]  # relation kind -> requiredPresence
    severity: dict[str, str]  # relation kind -> "error" | "warning"

    def __post_init__(self):
        missing = [k for k in RELATION_KINDS if k not in self.order]
        if missing:
            raise PolicyError(f"policy lacks rules for: {', '.join(missing)}")
        bad = {k: r for k, r in self.order.items() if r not in RULES}
        if bad:
            raise PolicyError(f"unknown rules: {bad}")


def default_policy() -> PrecedencePolicy:
    source_first = {
        "Context",
        "Inheritance",
        "Implication",
        "Property",
        "Complication",
        "Introduction",
    }
    target_first = {
        "Derivation",
        "Justification",
        "Solution",
        "Remark",
        "Exercise",
        "Example",
        "Application",
    }
    order = {}
    for kind in RELATION_KINDS:
        if kind in source_first:
            order[kind] = SOURCE_FIRST
        elif kind in target_first:
            order[kind] = TARGET_FIRST
        else:  # Equality, Association, Inclusion, Decision
            order[kind] = NO_RULE
    required = {kind: kind in ("Context", "Inheritance") for kind in RELATION_KINDS}
    severity = {
        kind: ("error" if kind in ("Context", "Inheritance") else "warning")
        for kind in RELATION_KINDS
    }
    return PrecedencePolicy("policy-default", order, required, severity)


def parse_policy(text: str, path: str = "<string>") -> PrecedencePolicy:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != POLICY_HEADER:
        raise PolicyError(f"{path}: not a '{POLICY_HEADER}' file")
    name = "custom"
    order: dict[str, str] = {}
    required: dict[str, bool] = {}
    severity: dict[str, str] = {}
    for ln in lines[1:]:
        if ln.startswith("#"):
            continue
        key, _, value = ln.partition("=")
        if key == "name":
            name = value
            continue
        if key not in RELATION_KINDS:
            raise PolicyError(f"{path}: unknown relation kind {key!r}")
        parts = [p.strip() for p in value.split(",")]
        if len(parts) != 3:
            raise PolicyError(
                f"{path}: expected '{key}=rule,required|optional,severity'"
            )
        rule, req, sev = parts
        if rule not in RULES:
            raise PolicyError(f"{path}: unknown rule {rule!r}")
        if req not in ("required", "optional"):
            raise PolicyError(f"{path}: expected required|optional, got {req!r}")
        if sev not in ("error", "warning"):
            raise PolicyError(f"{path}: expected error|warning, got {sev!r}")
        order[key] = rule
        required[key] = req == "required"
        severity[key] = sev
    return PrecedencePolicy(name, order, required, severity)


def format_policy(policy: PrecedencePolicy) -> str:
    lines = [POLICY_HEADER, f"name={policy.name}"]
    for kind in RELATION_KINDS:
        req = "required" if policy.required[kind] else "optional"
        lines.append(f"{kind}={policy.order[kind]},{req},{policy.severity[kind]}")
    return "\n".join(lines) + "\n"


def load_policy(path) -> PrecedencePolicy:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_policy(fh.read(), str(path))


# --- consistency -------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # OrderingViolation | MissingPrerequisite | DanglingReference | CycleDetected
    severity: str  # "error" | "warning"
    message: str
    source: str | None = None
    target: str | None = None
    relation_kind: str | None = None
    positions: dict | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "severity": self.severity,
            "message": self.message,
            "source": self.source,
            "target": self.target,
            "relationKind": self.relation_kind,
            "positions": self.positions or {},
        }


@dataclass
class ConsistencyReport:
    violations: list[Violation] = field(default_factory=list)
    checked_relations: int = 0
    elapsed_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def errors(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == "error"]

    @property
    def warnings(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == "warning"]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [v.to_json() for v in self.violations],
            "checkedRelations": self.checked_relations,
            "elapsedMs": round(self.elapsed_ms, 3),
        }


def check(
    book: Textbook, store: Store, policy: PrecedencePolicy | None = None
) -> ConsistencyReport:
    """Validate the book's reading order against relation precedence.

    Runs in O(V + E): one linearization pass plus one scan over the
    relation table.  Problems are report entries, never exceptions.
    """
    policy = policy or default_policy()
    started = time.perf_counter()
    report = ConsistencyReport()
    try:
        order = linearize(book)
    except (CycleDetected, DuplicateLeaf) as e:
        report.violations.append(
            Violation("CycleDetected", "error", str(e))
        )
        report.elapsed_ms = (time.perf_counter() - started) * 1000
        return report

    position = {oid: i for i, oid in enumerate(order)}
    for oid in order:
        if oid not in store:
            report.violations.append(
                Violation(
                    "DanglingReference",
                    "error",
                    f"book references missing object '{oid}'",
                    target=oid,
                    positions={oid: position[oid]},
                )
            )

    for rel in store.relations():
        rule = policy.order.get(rel.kind, NO_RULE)
        src_pos = position.get(rel.source)
        tgt_pos = position.get(rel.target)
        if tgt_pos is not None and src_pos is None and policy.required.get(rel.kind):
            report.checked_relations += 1
            report.violations.append(
                Violation(
                    "MissingPrerequisite",
                    policy.severity[rel.kind],
                    f"'{rel.target}' needs '{rel.source}' "
                    f"({rel.kind}) but the book does not include it",
                    source=rel.source,
                    target=rel.target,
                    relation_kind=rel.kind,
                    positions={rel.target: tgt_pos},
                )
            )
            continue
        if src_pos is None or tgt_pos is None or rule == NO_RULE:
            continue
        report.checked_relations += 1
        ok = True
        if rule == SOURCE_FIRST:
            ok = src_pos < tgt_pos
        elif rule == TARGET_FIRST:
            ok = tgt_pos < src_pos
        elif rule == ADJACENT_AFTER_TARGET:
            ok = src_pos == tgt_pos + 1
        if not ok:
            report.violations.append(
                Violation(
                    "OrderingViolation",
                    policy.severity[rel.kind],
                    f"'{rel.source}' must precede '{rel.target}' ({rel.kind})"
                    if rule == SOURCE_FIRST
                    else f"'{rel.source}' must follow '{rel.target}' ({rel.kind})",
                    source=rel.source,
                    target=rel.target,
                    relation_kind=rel.kind,
                    positions={rel.source: src_pos, rel.target: tgt_pos},
                )
            )
    report.elapsed_ms = (time.perf_counter() - started) * 1000
    return report


# --- edits ---------------------------------------------------------------------


@dataclass(frozen=True)
class Insert:
    parent: str  # category id
    index: int
    leaf: str | None = None  # object id, or
    category_id: str | None = None  # new category with title
    category_title: str = ""


@dataclass(frozen=True)
class Remove:
    node_id: str


@dataclass(frozen=True)
class Move:
    node_id: str
    new_parent: str
    index: int


@dataclass(frozen=True)
class Rename:
    node_id: str  # category id or the book id
    title: str


EditOp = Insert | Remove | Move | Rename


def edit(
    book: Textbook,
    op: EditOp,
    store: Store | None = None,
    policy: PrecedencePolicy | None = None,
    recheck: bool = False,
) -> tuple[Textbook, ConsistencyReport | None]:
    """Apply a structural edit, returning a new book value.

    With ``recheck`` (and a store) the fresh consistency report is
    returned along with the new book, so every acknowledged edit comes
    with its feedback.
    """
    new_book = _apply(book, op)
    report = None
    if recheck:
        if store is None:
            raise BookError("recheck requires a store")
        report = check(new_book, store, policy)
    return new_book, report


def inverse_op(book: Textbook, op: EditOp) -> EditOp:
    """The operation that undoes ``op`` applied to ``book``."""
    if isinstance(op, Insert):
        return Remove(op.leaf if op.leaf else op.category_id)  # type: ignore[arg-type]
    if isinstance(op, Remove):
        found = book.parent_of(op.node_id)
        if found is None:
            raise InvalidPosition(f"no node '{op.node_id}' in book")
        parent, index = found
        node = parent.children[index]
        if isinstance(node, Leaf):
            return Insert(parent.id, index, leaf=node.object_id)
        return Insert(
            parent.id, index, category_id=node.id, category_title=node.title
        )
    if isinstance(op, Move):
        found = book.parent_of(op.node_id)
        if found is None:
            raise InvalidPosition(f"no node '{op.node_id}' in book")
        parent, index = found
        return Move(op.node_id, parent.id, index)
    found_cat = book.find_category(op.node_id)
    old_title = found_cat.title if found_cat else book.title
    return Rename(op.node_id, old_title)


def _apply(book: Textbook, op: EditOp) -> Textbook:
    if isinstance(op, Insert):
        return _insert(book, op)
    if isinstance(op, Remove):
        return _remove(book, op)
    if isinstance(op, Move):
        return _move(book, op)
    if isinstance(op, Rename):
        return _rename(book, op)
    raise BookError(f"unknown edit operation {op!r}")


def _rebuild(node: Category, fn) -> Category:
    """fn(category) -> children tuple; applied bottom-up."""
    new_children = []
    for child in node.children:
        if isinstance(child, Category):
            new_children.append(_rebuild(child, fn))
        else:
            new_children.append(child)
    rebuilt = Category(node.id, node.title, tuple(new_children))
    return fn(rebuilt)


def _insert(book: Textbook, op: Insert) -> Textbook:
    if (op.leaf is None) == (op.category_id is None):
        raise BookError("insert needs exactly one of leaf/category_id")
    if op.leaf is not None and op.leaf in set(linearize(book)):
        raise DuplicateLeaf(f"object '{op.leaf}' already in the book")
    if op.category_id is not None:
        if book.find_category(op.category_id) is not None:
            raise DuplicateLeaf(f"category '{op.category_id}' already in the book")
        new_node: Node = Category(op.category_id, op.category_title)
    else:
        new_node = Leaf(op.leaf)  # type: ignore[arg-type]
    if book.find_category(op.parent) is None:
        raise InvalidPosition(f"no category '{op.parent}' in book")

    def fn(cat: Category) -> Category:
        if cat.id != op.parent:
            return cat
        if not 0 <= op.index <= len(cat.children):
            raise InvalidPosition(
                f"index {op.index} out of range for category '{cat.id}'"
            )
        children = (
            cat.children[: op.index] + (new_node,) + cat.children[op.index :]
        )
        return Category(cat.id, cat.title, children)

    return replace(book, root=_rebuild(book.root, fn))


def _detach(book: Textbook, node_id: str) -> tuple[Textbook, Node]:
    found = book.parent_of(node_id)
    if found is None:
        raise InvalidPosition(f"no node '{node_id}' in book")
    parent, index = found
    node = parent.children[index]

    def fn(cat: Category) -> Category:
        if cat.id != parent.id:
            return cat
        children = cat.children[:index] + cat.children[index + 1 :]
        return Category(cat.id, cat.title, children)

    return replace(book, root=_rebuild(book.root, fn)), node


def _remove(book: Textbook, op: Remove) -> Textbook:
    new_book, _ = _detach(book, op.node_id)
    return new_book


def _move(book: Textbook, op: Move) -> Textbook:
    if op.node_id == op.new_parent:
        raise InvalidPosition("cannot move a category into itself")
    moving = book.find_category(op.node_id)
    if moving is not None and _contains_category(moving, op.new_parent):
        raise InvalidPosition("cannot move a category under its own descendant")
    detached, node = _detach(book, op.node_id)
    if detached.find_category(op.new_parent) is None:
        raise InvalidPosition(f"no category '{op.new_parent}' in book")

    def fn(cat: Category) -> Category:
        if cat.id != op.new_parent:
            return cat
        if not 0 <= op.index <= len(cat.children):
            raise InvalidPosition(
                f"index {op.index} out of range for category '{cat.id}'"
            )
        children = cat.children[: op.index] + (node,) + cat.children[op.index :]
        return Category(cat.id, cat.title, children)

    return replace(detached, root=_rebuild(detached.root, fn))


def _contains_category(node: Category, category_id: str) -> bool:
    for child in node.children:
        if isinstance(child, Category):
            if child.id == category_id or _contains_category(child, category_id):
                return True
    return False


def _rename(book: Textbook, op: Rename) -> Textbook:
    if op.node_id == book.id:
        return replace(book, title=op.title)
    if book.find_category(op.node_id) is None:
        raise InvalidPosition(f"no category '{op.node_id}' in book")

    def fn(cat: Category) -> Category:
        if cat.id != op.node_id:
            return cat
        return Category(cat.id, op.title, cat.children)

    return replace(book, root=_rebuild(book.root, fn))


def op_from_json(data: dict) -> EditOp:
    action = data.get("action")
    if action == "insert":
        return Insert(
            parent=data["parent"],
            index=int(data["index"]),
            leaf=data.get("leaf"),
            category_id=data.get("categoryId"),
            category_title=data.get("categoryTitle", ""),
        )
    if action == "remove":
        return Remove(data["nodeId"])
    if action == "move":
        return Move(data["nodeId"], data["newParent"], int(data["index"]))
    if action == "rename":
        return Rename(data["nodeId"], data["title"])
    raise BookError(f"unknown edit action {action!r}")


# --- persistence -----------------------------------------------------------------


def _node_to_json(node: Node) -> dict:
    if isinstance(node, Leaf):
        return {"kind": "leaf", "id": node.object_id}
    return {
        "kind": "category",
        "id": node.id,
        "title": node.title,
        "children": [_node_to_json(c) for c in node.children],
    }


def _node_from_json(data: dict) -> Node:
    if data["kind"] == "leaf":
        return Leaf(data["id"])
    return Category(
        data["id"],
        data.get("title", ""),
        tuple(_node_from_json(c) for c in data.get("children", [])),
    )


def book_to_json(book: Textbook) -> dict:
    return {
        "id": book.id,
        "title": book.title,
        "root": _node_to_json(book.root),
    }


def book_from_json(data: dict) -> Textbook:
    root = _node_from_json(data["root"])
    if not isinstance(root, Category):
        raise BookError("book root must be a category")
    return Textbook(data["id"], data.get("title", ""), root)


def dumps(book: Textbook) -> str:
    meta = json.dumps(
        {"record": "book", "id": book.id, "title": book.title},
        ensure_ascii=True,
        separators=(", ", ": "),
    )
    tree = json.dumps(
        {"record": "tree", "root": _node_to_json(book.root)},
        ensure_ascii=True,
        separators=(", ", ": "),
    )
    return BOOK_HEADER + "\n" + meta + "\n" + tree + "\n"


def save(book: Textbook, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(book))


def loads(text: str, path: str = "<string>") -> Textbook:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("geobook-book "):
        raise BookError(f"{path}: missing '{BOOK_HEADER}' header")
    if lines[0] != BOOK_HEADER:
        raise BookError(f"{path}: unsupported book version {lines[0]!r}")
    meta: dict = {}
    root_data: dict | None = None
    for ln in lines[1:]:
        rec = json.loads(ln)
        if rec.get("record") == "book":
            meta = rec
        elif rec.get("record") == "tree":
            root_data = rec.get("root")
    if root_data is None:
        raise BookError(f"{path}: no tree record")
    book = book_from_json(
        {"id": meta.get("id", "book"), "title": meta.get("title", ""), "root": root_data}
    )
    linearize(book)  # validates duplicates/cycles on load
    return book


def load(path) -> Textbook:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read(), str(path))
