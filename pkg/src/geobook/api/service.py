"""HTTP service over the knowledge engine.

JSON endpoints for objects, relations, discovery, books with live
consistency reports, rendering, proving, and figure evaluation; a
server-sent-event stream per book pushes the report produced by each
acknowledged edit.  Edits carry a per-book serial number for optimistic
concurrency: a stale serial is rejected with 409 and the client
refetches.  Every mutating call persists the store (and the edited
book) before the response is sent.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse

from .. import book as book_mod
from .. import render
from ..backends import proving
from ..book import ConsistencyReport, PrecedencePolicy, Textbook, default_policy
from ..discover import (
    DiscoveryError,
    RelationCandidate,
    accept_candidates,
    discover,
    registry_for_store,
)
from ..store import (
    CategoryObject,
    KnowledgeObject,
    Store,
    StoreError,
    UnknownObject,
)


class BookSession:
    def __init__(self, book: Textbook, path: Path):
        self.book = book
        self.path = path
        self.serial = 0
        self.last_report: ConsistencyReport | None = None
        self.subscribers: list[asyncio.Queue] = []

    def snapshot(self) -> dict:
        return {
            "book": book_mod.book_to_json(self.book),
            "serial": self.serial,
            "report": self.last_report.to_json() if self.last_report else None,
        }


class ServiceState:
    def __init__(self, store_path: Path, books_dir: Path, policy: PrecedencePolicy):
        self.store_path = store_path
        self.books_dir = books_dir
        self.policy = policy
        self.store = (
            Store.load(store_path) if store_path.exists() else Store()
        )
        self.books: dict[str, BookSession] = {}
        self.lock = asyncio.Lock()  # serializes all mutations
        books_dir.mkdir(parents=True, exist_ok=True)
        for path in sorted(books_dir.glob("*.book")):
            loaded = book_mod.load(path)
            session = BookSession(loaded, path)
            # real-time contract: a session always carries a current report
            session.last_report = book_mod.check(loaded, self.store, self.policy)
            self.books[loaded.id] = session

    def persist_store(self) -> None:
        self.store.save(self.store_path)

    def persist_book(self, session: BookSession) -> None:
        book_mod.save(session.book, session.path)

    def require_book(self, book_id: str) -> BookSession:
        session = self.books.get(book_id)
        if session is None:
            raise HTTPException(404, f"no book '{book_id}'")
        return session

    async def publish(self, session: BookSession, payload: dict) -> None:
        for queue in list(session.subscribers):
            await queue.put(payload)


def _object_to_json(obj) -> dict:
    if isinstance(obj, KnowledgeObject):
        return {
            "type": "object",
            "id": obj.id,
            "kind": obj.kind,
            "name": obj.name,
            "keywords": obj.keywords,
            "natural": obj.natural,
            "formal": obj.formal,
            "algebraic": obj.algebraic,
            "diagram": obj.diagram,
        }
    return {
        "type": "category",
        "id": obj.id,
        "title": obj.title,
        "members": obj.members,
    }


def _object_from_json(data: dict, object_id: str = ""):
    oid = data.get("id") or object_id
    if data.get("type") == "category":
        return CategoryObject(
            id=oid, title=dict(data.get("title", {})), members=list(data.get("members", []))
        )
    return KnowledgeObject(
        id=oid,
        kind=data.get("kind", ""),
        name=data.get("name", ""),
        keywords=list(data.get("keywords", [])),
        natural=dict(data.get("natural", {})),
        formal=data.get("formal"),
        algebraic=data.get("algebraic"),
        diagram=data.get("diagram"),
    )


def create_app(
    store_path: str | Path,
    books_dir: str | Path | None = None,
    policy: PrecedencePolicy | None = None,
) -> FastAPI:
    store_path = Path(store_path)
    books_dir = Path(books_dir) if books_dir else store_path.parent / "books"
    state = ServiceState(store_path, books_dir, policy or default_policy())

    app = FastAPI(title="geobook", version="0.1.0")
    app.state.geobook = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def fail(exc: Exception) -> HTTPException:
        if isinstance(exc, UnknownObject):
            return HTTPException(404, str(exc))
        if isinstance(
            exc,
            (StoreError, DiscoveryError, book_mod.BookError, render.RenderError),
        ):
            return HTTPException(400, str(exc))
        # backend rejections (unexpandable, non-constructive, limits, ...)
        return HTTPException(422, str(exc))

    # --- objects & relations -------------------------------------------

    @app.get("/health")
    async def health() -> dict:
        return {"ok": True, "objects": len(state.store)}

    @app.get("/objects")
    async def list_objects(keywords: str | None = None) -> dict:
        if keywords:
            words = [w for w in keywords.split(",") if w.strip()]
            try:
                ids = sorted(state.store.query_keywords(words))
            except StoreError as e:
                raise fail(e) from e
        else:
            ids = state.store.ids()
        summaries = []
        for oid in ids:
            obj = state.store.get(oid)
            if isinstance(obj, KnowledgeObject):
                summaries.append({"id": oid, "kind": obj.kind, "name": obj.name})
            else:
                summaries.append({"id": oid, "kind": "Category", "name": ""})
        return {"objects": summaries}

    @app.get("/objects/{object_id}")
    async def get_object(object_id: str) -> dict:
        try:
            return _object_to_json(state.store.get(object_id))
        except StoreError as e:
            raise fail(e) from e

    @app.post("/objects")
    async def post_object(request: Request) -> dict:
        data = await request.json()
        async with state.lock:
            try:
                oid = state.store.put_object(_object_from_json(data))
            except StoreError as e:
                raise fail(e) from e
            state.persist_store()
        return {"id": oid}

    @app.put("/objects/{object_id}")
    async def put_object(object_id: str, request: Request) -> dict:
        data = await request.json()
        async with state.lock:
            try:
                oid = state.store.put_object(_object_from_json(data, object_id))
            except StoreError as e:
                raise fail(e) from e
            state.persist_store()
        return {"id": oid}

    @app.get("/relations")
    async def get_relations(
        source: str | None = None, target: str | None = None, kind: str = ""
    ) -> dict:
        if not kind:
            rels = state.store.relations()
            return {
                "relations": [
                    {
                        "source": r.source,
                        "target": r.target,
                        "kind": r.kind,
                        "provenance": r.provenance,
                    }
                    for r in rels
                    if (source is None or r.source == source)
                    and (target is None or r.target == target)
                ]
            }
        try:
            ids = sorted(state.store.query_relation(source, target, kind))
        except StoreError as e:
            raise fail(e) from e
        return {"ids": ids}

    @app.post("/relations")
    async def post_relation(request: Request) -> dict:
        data = await request.json()
        async with state.lock:
            try:
                state.store.add_relation(
                    data["source"],
                    data["target"],
                    data["kind"],
                    data.get("provenance", "manual"),
                )
            except (KeyError, StoreError) as e:
                raise fail(e if isinstance(e, StoreError) else StoreError(str(e))) from e
            state.persist_store()
        return {"ok": True}

    # --- discovery ----------------------------------------------------
    # NOTE: the fixed path must register before the parameterized one

    @app.post("/discover/accept")
    async def post_discover_accept(request: Request) -> dict:
        data = await request.json()
        cands = [RelationCandidate.from_json(c) for c in data.get("candidates", [])]
        async with state.lock:
            try:
                added = accept_candidates(cands, state.store)
            except DiscoveryError as e:
                raise HTTPException(409, str(e)) from e
            except StoreError as e:
                raise fail(e) from e
            state.persist_store()
        return {"added": added}

    @app.post("/discover/{object_id}")
    async def post_discover(object_id: str) -> dict:
        try:
            result = discover(object_id, state.store)
        except (StoreError, DiscoveryError) as e:
            raise fail(e) from e
        return {
            "target": result.target,
            "candidates": [c.to_json() for c in result.candidates],
            "warnings": result.warnings,
        }

    # --- books -----------------------------------------------------------

    @app.get("/books")
    async def list_books() -> dict:
        return {
            "books": [
                {"id": s.book.id, "title": s.book.title, "serial": s.serial}
                for s in state.books.values()
            ]
        }

    @app.post("/books")
    async def create_book(request: Request) -> dict:
        data = await request.json()
        async with state.lock:
            book_id = data.get("id") or f"book-{len(state.books) + 1:03d}"
            if book_id in state.books:
                raise HTTPException(409, f"book '{book_id}' exists")
            if "root" in data:
                book = book_mod.book_from_json(
                    {"id": book_id, "title": data.get("title", ""), "root": data["root"]}
                )
            else:
                book = Textbook(
                    book_id,
                    data.get("title", ""),
                    book_mod.Category(f"{book_id}-root", data.get("title", "")),
                )
            session = BookSession(book, state.books_dir / f"{book_id}.book")
            session.last_report = book_mod.check(book, state.store, state.policy)
            state.books[book_id] = session
            state.persist_book(session)
        return session.snapshot()

    @app.get("/books/{book_id}")
    async def get_book(book_id: str) -> dict:
        return state.require_book(book_id).snapshot()

    @app.post("/books/{book_id}/edits")
    async def post_edit(book_id: str, request: Request) -> Response:
        data = await request.json()
        session = state.require_book(book_id)
        async with state.lock:
            serial = data.get("serial")
            if serial != session.serial:
                raise HTTPException(
                    409,
                    f"stale serial {serial}; book '{book_id}' is at "
                    f"{session.serial}",
                )
            try:
                op = book_mod.op_from_json(data.get("op", {}))
                new_book, report = book_mod.edit(
                    session.book, op, state.store, state.policy, recheck=True
                )
            except book_mod.BookError as e:
                raise fail(e) from e
            session.book = new_book
            session.serial += 1
            session.last_report = report
            state.persist_book(session)
            payload = {
                "bookId": book_id,
                "serial": session.serial,
                "report": report.to_json() if report else None,
            }
            await state.publish(session, payload)
        return Response(
            content=json.dumps(payload), media_type="application/json"
        )

    @app.get("/books/{book_id}/events")
    async def book_events(book_id: str) -> StreamingResponse:
        session = state.require_book(book_id)
        queue: asyncio.Queue = asyncio.Queue()
        session.subscribers.append(queue)

        async def stream():
            try:
                yield f"event: hello\ndata: {json.dumps(session.snapshot())}\n\n"
                while True:
                    payload = await queue.get()
                    yield f"event: report\ndata: {json.dumps(payload)}\n\n"
            finally:
                if queue in session.subscribers:
                    session.subscribers.remove(queue)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/books/{book_id}/render")
    async def render_book(
        book_id: str,
        locale: str = "en",
        format: str = "html",
        scope: str | None = None,
    ) -> Response:
        session = state.require_book(book_id)
        try:
            doc = render.to_xml(session.book, state.store, scope, locale)
            if format == "xml":
                return Response(content=doc.xml, media_type="application/xml")
            theme = "default-zh" if locale.startswith("zh") else "default-en"
            page = render.to_html(doc, state.store, theme)
            return Response(content=page, media_type="text/html")
        except (book_mod.BookError, render.RenderError) as e:
            raise fail(e) from e

    # --- proving & figures --------------------------------------------------

    from ..backends.algebra import AlgebraError
    from ..backends.construct import ConstructError
    from ..backends.wu import ProverError
    from ..expand import ExpandError

    backend_errors = (
        StoreError,
        proving.ProvingError,
        ExpandError,
        AlgebraError,
        ConstructError,
        ProverError,
    )

    @app.post("/prove/{object_id}")
    async def prove_endpoint(object_id: str, request: Request) -> dict:
        data = await request.json() if await request.body() else {}
        direction = data.get("direction", "both")
        try:
            registry = registry_for_store(state.store)
            outcome = proving.prove_object(
                state.store, object_id, direction, registry=registry
            )
        except backend_errors as e:
            raise fail(e) from e
        return outcome.to_json()

    @app.post("/figure/{object_id}/evaluate")
    async def figure_evaluate(object_id: str, request: Request) -> dict:
        data = await request.json() if await request.body() else {}
        try:
            registry = registry_for_store(state.store)
            figure = proving.evaluate_object_figure(
                state.store, object_id, data.get("assignment"), registry=registry
            )
        except backend_errors as e:
            raise fail(e) from e
        except KeyError as e:
            raise HTTPException(400, f"bad free assignment: {e}") from e
        return figure

    @app.get("/figure/{object_id}/script")
    async def figure_script(object_id: str, dialect: str = "generic-json") -> Response:
        try:
            registry = registry_for_store(state.store)
            text = proving.object_script(
                state.store, object_id, dialect, registry=registry
            )
        except backend_errors as e:
            raise fail(e) from e
        media = "application/json" if dialect == "generic-json" else "text/plain"
        return Response(content=text, media_type=media)

    return app


def serve(
    store_path: str | Path,
    port: int = 8765,
    host: str = "127.0.0.1",
    books_dir: str | Path | None = None,
) -> None:
    """Run the service until interrupted (BindFailure surfaces from uvicorn)."""
    import uvicorn

    app = create_app(store_path, books_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
