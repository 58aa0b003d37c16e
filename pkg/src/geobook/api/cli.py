"""Command-line interface.

Subcommands: init, put, query, discover, book check, render, prove,
figure, serve.  ``--format json`` switches every subcommand to
machine-readable output.  Query strings follow the knowledge-base
command syntax: ``keyWords[w1, ..., wn]``, ``relation[*, id, Kind]``,
``relation[id, *, Kind]``.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

from .. import book as book_mod
from .. import render
from ..backends import proving
from ..book import default_policy, load_policy
from ..corpus import build_simson_book, build_simson_corpus
from ..discover import accept_candidates, discover
from ..store import Store, StoreError

DEFAULT_STORE = "geobook.store"


class CliError(Exception):
    pass


def _store_path(args) -> Path:
    return Path(args.store or os.environ.get("GEOBOOK_STORE") or DEFAULT_STORE)


def _load_store(args) -> Store:
    path = _store_path(args)
    if not path.exists():
        raise CliError(f"store file '{path}' does not exist (run 'geobook init')")
    return Store.load(path)


def _emit(args, data: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        print(text)


def cmd_init(args) -> int:
    path = _store_path(args)
    if path.exists() and not args.force:
        raise CliError(f"store file '{path}' already exists (use --force)")
    store = Store()
    created: dict = {"store": str(path)}
    if args.seed:
        ids = build_simson_corpus(store)
        res = discover(ids["simson"], store)
        accept_candidates(res.candidates, store)
        book = build_simson_book(ids)
        book_path = path.parent / f"{book.id}.book"
        book_mod.save(book, book_path)
        created["seeded"] = ids
        created["book"] = str(book_path)
    store.save(path)
    _emit(
        args,
        created,
        f"initialized store at {path}"
        + (f" with {len(store)} seeded objects" if args.seed else ""),
    )
    return 0


def cmd_put(args) -> int:
    store = _load_store(args)
    with open(args.file, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    from .service import _object_from_json

    oid = store.put_object(_object_from_json(data))
    store.save(_store_path(args))
    _emit(args, {"id": oid}, oid)
    return 0


_QUERY_RE = re.compile(
    r"^\s*(keyWords|relation)\s*\[(.*)\]\s*$", re.DOTALL
)


def run_query(store: Store, query: str) -> set[str]:
    m = _QUERY_RE.match(query)
    if not m:
        raise CliError(
            "query must be keyWords[w1, ..., wn] or relation[*, id, Kind] "
            "or relation[id, *, Kind]"
        )
    head, body = m.group(1), m.group(2)
    parts = [p.strip() for p in body.split(",")]
    if head == "keyWords":
        return store.query_keywords([p for p in parts if p])
    if len(parts) != 3:
        raise CliError("relation query takes exactly three arguments")
    source, target, kind = parts
    return store.query_relation(
        None if source == "*" else source,
        None if target == "*" else target,
        kind,
    )


def cmd_query(args) -> int:
    store = _load_store(args)
    ids = sorted(run_query(store, args.query))
    _emit(args, {"ids": ids}, "\n".join(ids) if ids else "(no matches)")
    return 0


def cmd_discover(args) -> int:
    store = _load_store(args)
    result = discover(args.object_id, store)
    added = 0
    if args.accept_all:
        added = accept_candidates(result.candidates, store)
        store.save(_store_path(args))
    data = {
        "target": result.target,
        "candidates": [c.to_json() for c in result.candidates],
        "warnings": result.warnings,
        "accepted": added,
    }
    lines = [
        f"{c.source} -[{c.kind}]-> {c.target}  ({', '.join(sorted(c.evidence))})"
        for c in result.candidates
    ]
    lines += [f"warning: {w}" for w in result.warnings]
    if args.accept_all:
        lines.append(f"accepted {added} relation(s)")
    _emit(args, data, "\n".join(lines) if lines else "(no candidates)")
    return 0


def cmd_book_check(args) -> int:
    store = _load_store(args)
    book = book_mod.load(args.book)
    policy = load_policy(args.policy) if args.policy else default_policy()
    report = book_mod.check(book, store, policy)
    text_lines = [
        f"{v.severity}: {v.kind}: {v.message}" for v in report.violations
    ]
    text_lines.append(
        f"{len(report.violations)} violations "
        f"({len(report.errors)} errors) in {report.elapsed_ms:.1f} ms"
    )
    _emit(args, report.to_json(), "\n".join(text_lines))
    return 0 if report.ok else 1


def cmd_render(args) -> int:
    store = _load_store(args)
    book = book_mod.load(args.book)
    doc = render.to_xml(book, store, args.scope, args.locale)
    if args.as_format == "xml":
        output = doc.xml
    else:
        theme = args.theme or (
            "default-zh" if args.locale.startswith("zh") else "default-en"
        )
        output = render.to_html(doc, store, theme)
    if args.output:
        Path(args.output).write_text(output, encoding="utf-8")
        _emit(
            args,
            {"written": args.output, "bytes": len(output)},
            f"wrote {args.output} ({len(output)} bytes)",
        )
    else:
        print(output, end="")
    return 0


def cmd_prove(args) -> int:
    store = _load_store(args)
    outcome = proving.prove_object(store, args.object_id, args.direction)
    lines = [f"status: {outcome.status}"]
    for name, res in outcome.directions.items():
        lines.append(f"  {name}: {res.status}")
        for cond in res.conditions_pretty():
            lines.append(f"    nondegeneracy: {cond} != 0")
    _emit(args, outcome.to_json(), "\n".join(lines))
    return 0 if outcome.status == "proved" else 1


def cmd_figure(args) -> int:
    store = _load_store(args)
    if args.script:
        text = proving.object_script(store, args.object_id, args.script)
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
            print(f"wrote {args.output}")
        else:
            print(text, end="")
        return 0
    assignment = None
    if args.assignment:
        with open(args.assignment, "r", encoding="utf-8") as fh:
            assignment = json.load(fh)
    figure = proving.evaluate_object_figure(store, args.object_id, assignment)
    text = [
        f"degenerate: {figure['degenerate']}",
        f"conclusion residual: {figure['conclusionResidual']:.3e}",
    ]
    for name, coords in figure["coordinates"].items():
        text.append(f"  {name}: {tuple(round(c, 6) for c in coords)}")
    _emit(args, figure, "\n".join(text))
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(_store_path(args), port=args.port, host=args.host, books_dir=args.books_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geobook",
        description="geometry-textbook knowledge engine",
    )
    parser.add_argument("--store", help=f"store file (default {DEFAULT_STORE})")
    parser.add_argument(
        "--format", choices=("text", "json"), default="text", help="output format"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a store file")
    p.add_argument("--seed", action="store_true", help="seed the Simson corpus")
    p.add_argument("--force", action="store_true")
    p.set_defaults(fn=cmd_init)

    p = sub.add_parser("put", help="insert an object from a JSON file")
    p.add_argument("file")
    p.set_defaults(fn=cmd_put)

    p = sub.add_parser("query", help="run a keyWords[...] or relation[...] query")
    p.add_argument("query")
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("discover", help="propose Context/Inheritance relations")
    p.add_argument("object_id")
    p.add_argument("--accept-all", action="store_true")
    p.set_defaults(fn=cmd_discover)

    p_book = sub.add_parser("book", help="textbook operations")
    book_sub = p_book.add_subparsers(dest="book_command", required=True)
    p = book_sub.add_parser("check", help="consistency-check a book file")
    p.add_argument("book")
    p.add_argument("--policy", help="policy file (default: shipped policy)")
    p.set_defaults(fn=cmd_book_check)

    p = sub.add_parser("render", help="render a book to XML or HTML")
    p.add_argument("book")
    p.add_argument("--locale", default="en")
    p.add_argument("--format", dest="as_format", choices=("xml", "html"), default="html")
    p.add_argument("--scope", help="render one category subtree")
    p.add_argument("--theme")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("prove", help="prove a stored statement")
    p.add_argument("object_id")
    p.add_argument(
        "--direction", choices=("forward", "backward", "both"), default="both"
    )
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("figure", help="evaluate or export a figure")
    p.add_argument("object_id")
    p.add_argument("--script", choices=("generic-json", "ggb-commands"))
    p.add_argument("--assignment", help="JSON file of free-point coordinates")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_figure)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--books-dir")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    from ..backends.algebra import AlgebraError
    from ..backends.construct import ConstructError
    from ..backends.wu import ProverError
    from ..discover import DiscoveryError
    from ..expand import ExpandError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (
        CliError,
        StoreError,
        book_mod.BookError,
        proving.ProvingError,
        DiscoveryError,
        ExpandError,
        AlgebraError,
        ConstructError,
        ProverError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # surfaced, not swallowed: nonzero exit + message
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
