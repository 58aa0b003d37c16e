from __future__ import annotations

import json
import subprocess
import sys
import time

import pytest
import requests
from fastapi.testclient import TestClient

from geobook import book as book_mod
from geobook.api.service import create_app
from geobook.corpus import build_simson_book, build_simson_corpus
from geobook.discover import accept_candidates, discover
from geobook.store import Store

from .server_helper import ServerProcess


@pytest.fixture()
def service(tmp_path):
    """TestClient over a seeded store with the Simson book installed."""
    store = Store()
    ids = build_simson_corpus(store)
    accept_candidates(discover(ids["simson"], store).candidates, store)
    store_path = tmp_path / "kb.store"
    store.save(store_path)
    books_dir = tmp_path / "books"
    books_dir.mkdir()
    book = build_simson_book(ids)
    book_mod.save(book, books_dir / f"{book.id}.book")
    app = create_app(store_path, books_dir)
    with TestClient(app) as client:
        yield client, ids, store_path


def test_objects_listing_and_fetch(service):
    client, ids, _ = service
    listing = client.get("/objects").json()["objects"]
    listed_ids = {o["id"] for o in listing}
    assert ids["simson"] in listed_ids
    obj = client.get(f"/objects/{ids['simson']}").json()
    assert obj["kind"] == "Theorem"
    assert obj["name"] == "Simson's theorem"
    assert client.get("/objects/ghost").status_code == 404


def test_keyword_query_endpoint(service):
    client, ids, _ = service
    hits = client.get("/objects", params={"keywords": "Simson,collinear"}).json()
    assert hits["objects"][0]["id"] == ids["simson"]


def test_relation_query_endpoint(service):
    client, ids, _ = service
    r = client.get(
        "/relations", params={"target": ids["simson"], "kind": "Context"}
    ).json()
    assert len(r["ids"]) == 5
    both = client.get(
        "/relations",
        params={"source": "x", "target": "y", "kind": "Context"},
    )
    assert both.status_code == 400


def test_post_object_persists(service, tmp_path):
    client, ids, store_path = service
    response = client.post(
        "/objects",
        json={"kind": "Remark", "name": "fresh note", "keywords": ["note"]},
    )
    oid = response.json()["id"]
    # durable before acknowledge: a reload sees it
    assert oid in Store.load(store_path)


def test_put_object_with_id(service):
    client, ids, _ = service
    obj = client.get(f"/objects/{ids['simson']}").json()
    obj["name"] = "Simson's theorem (edited)"
    client.put(f"/objects/{ids['simson']}", json=obj)
    assert (
        client.get(f"/objects/{ids['simson']}").json()["name"]
        == "Simson's theorem (edited)"
    )


def test_post_relation_and_errors(service):
    client, ids, _ = service
    ok = client.post(
        "/relations",
        json={"source": ids["midline"], "target": ids["simson"], "kind": "Remark"},
    )
    assert ok.status_code == 200
    dup = client.post(
        "/relations",
        json={"source": ids["midline"], "target": ids["simson"], "kind": "Remark"},
    )
    assert dup.status_code == 400


def test_discover_endpoints(service):
    client, ids, _ = service
    result = client.post(f"/discover/{ids['midline']}").json()
    sources = {c["source"] for c in result["candidates"]}
    assert ids["midpoint"] in sources
    accepted = client.post(
        "/discover/accept", json={"candidates": result["candidates"]}
    ).json()
    assert accepted["added"] == len(result["candidates"])
    again = client.post(
        "/discover/accept", json={"candidates": result["candidates"]}
    ).json()
    assert again["added"] == 0


def test_book_edit_cycle_with_reports(service):
    client, ids, _ = service
    (book,) = client.get("/books").json()["books"]
    assert book["id"] == "book-simson"
    snapshot = client.get("/books/book-simson").json()
    serial = snapshot["serial"]

    foot_id = ids["foot"]
    # Fig. 4: drag Simson right before the foot definition
    move = {
        "serial": serial,
        "op": {
            "action": "move",
            "nodeId": ids["simson"],
            "newParent": "sec-preliminaries",
            "index": 6,
        },
    }
    response = client.post("/books/book-simson/edits", json=move).json()
    assert response["serial"] == serial + 1
    violations = response["report"]["violations"]
    assert len(violations) == 1
    assert violations[0]["source"] == foot_id
    assert violations[0]["severity"] == "error"

    # stale serial is rejected
    conflict = client.post("/books/book-simson/edits", json=move)
    assert conflict.status_code == 409

    # move back: report clears
    back = {
        "serial": response["serial"],
        "op": {
            "action": "move",
            "nodeId": ids["simson"],
            "newParent": "sec-simson",
            "index": 0,
        },
    }
    response2 = client.post("/books/book-simson/edits", json=back).json()
    assert response2["report"]["ok"]


def test_create_book(service):
    client, _, _ = service
    created = client.post("/books", json={"title": "scratch"}).json()
    assert created["serial"] == 0
    assert created["book"]["title"] == "scratch"
    listing = client.get("/books").json()["books"]
    assert len(listing) == 2


def test_render_endpoint(service):
    client, ids, _ = service
    xml = client.get(
        "/books/book-simson/render", params={"locale": "en", "format": "xml"}
    )
    assert xml.status_code == 200
    assert xml.text.startswith("<?xml")
    html = client.get(
        "/books/book-simson/render", params={"locale": "zh", "format": "html"}
    )
    assert "定理" in html.text
    scoped = client.get(
        "/books/book-simson/render",
        params={"format": "xml", "scope": "sec-simson"},
    )
    assert 'scope="sec-simson"' in scoped.text
    assert ids["point"] not in scoped.text
    missing = client.get(
        "/books/book-simson/render", params={"scope": "no-such"}
    )
    assert missing.status_code == 400


def test_prove_endpoint(service):
    client, ids, _ = service
    result = client.post(
        f"/prove/{ids['midline']}", json={"direction": "forward"}
    ).json()
    assert result["status"] == "proved"
    assert result["directions"]["forward"]["nondegeneracy"]


def test_figure_endpoints(service):
    client, ids, _ = service
    fig = client.post(f"/figure/{ids['simson']}/evaluate", json={}).json()
    assert fig["degenerate"] is False
    assert fig["conclusionResidual"] < 1e-9
    moved = client.post(
        f"/figure/{ids['simson']}/evaluate",
        json={"assignment": {"A": [0, 0], "B": [4, 0], "C": [1, 3], "theta_D": 2.2}},
    ).json()
    assert moved["free"]["theta_D"] == 2.2
    script = client.get(f"/figure/{ids['simson']}/script")
    assert json.loads(script.text)["format"] == "geobook-figure-script"
    ggb = client.get(
        f"/figure/{ids['simson']}/script", params={"dialect": "ggb-commands"}
    )
    assert "Circle(" in ggb.text


# --- live server: SSE stream -----------------------------------------------


@pytest.fixture(scope="module")
def live_server(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("live")
    store = Store()
    ids = build_simson_corpus(store)
    accept_candidates(discover(ids["simson"], store).candidates, store)
    store.save(tmp / "kb.store")
    books = tmp / "books"
    books.mkdir()
    book_mod.save(build_simson_book(ids), books / "book-simson.book")
    with ServerProcess(tmp / "kb.store", books) as server:
        yield server, ids


def test_event_stream_pushes_reports(live_server):
    server, ids = live_server
    stream = requests.get(
        f"{server.base}/books/book-simson/events", stream=True, timeout=10
    )
    lines = stream.iter_lines()

    def next_event():
        event, data = None, None
        for raw in lines:
            line = raw.decode()
            if line.startswith("event: "):
                event = line[7:]
            elif line.startswith("data: "):
                data = json.loads(line[6:])
            elif not line and event:
                return event, data
        raise AssertionError("stream ended early")

    event, hello = next_event()
    assert event == "hello"
    serial = hello["serial"]

    edit = {
        "serial": serial,
        "op": {
            "action": "move",
            "nodeId": ids["simson"],
            "newParent": "sec-preliminaries",
            "index": 6,
        },
    }
    ack = requests.post(
        f"{server.base}/books/book-simson/edits", json=edit, timeout=10
    ).json()
    event, payload = next_event()
    assert event == "report"
    assert payload["serial"] == ack["serial"] == serial + 1
    assert payload["report"]["violations"][0]["source"] == ids["foot"]
    stream.close()


# --- CLI -----------------------------------------------------------------------


def _cli(*args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "geobook.api.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
        timeout=300,
    )


@pytest.fixture(scope="module")
def cli_workspace(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    out = _cli("--store", "kb.store", "init", "--seed", cwd=tmp)
    assert out.returncode == 0, out.stderr
    return tmp


def test_cli_query_keywords(cli_workspace):
    out = _cli("--store", "kb.store", "query", "keyWords[Simson]", cwd=cli_workspace)
    assert out.returncode == 0
    assert "obj-000011" in out.stdout


def test_cli_query_relation(cli_workspace):
    out = _cli(
        "--store",
        "kb.store",
        "query",
        "relation[*, obj-000011, Context]",
        cwd=cli_workspace,
    )
    assert out.returncode == 0
    assert len(out.stdout.split()) == 5


def test_cli_book_check_consistent(cli_workspace):
    out = _cli(
        "--store", "kb.store", "book", "check", "book-simson.book", cwd=cli_workspace
    )
    assert out.returncode == 0
    assert "0 violations" in out.stdout


def test_cli_book_check_json_schema(cli_workspace):
    out = _cli(
        "--store",
        "kb.store",
        "--format",
        "json",
        "book",
        "check",
        "book-simson.book",
        cwd=cli_workspace,
    )
    data = json.loads(out.stdout)
    assert set(data) == {"ok", "violations", "checkedRelations", "elapsedMs"}


def test_cli_prove_forward(cli_workspace):
    out = _cli(
        "--store",
        "kb.store",
        "--format",
        "json",
        "prove",
        "obj-000011",
        "--direction",
        "forward",
        cwd=cli_workspace,
    )
    assert out.returncode == 0, out.stderr
    data = json.loads(out.stdout)
    assert data["status"] == "proved"
    assert data["directions"]["forward"]["nondegeneracy"]


def test_cli_figure_script(cli_workspace):
    out = _cli(
        "--store",
        "kb.store",
        "figure",
        "obj-000011",
        "--script",
        "generic-json",
        cwd=cli_workspace,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["version"] == 1


def test_cli_render_html(cli_workspace):
    out = _cli(
        "--store",
        "kb.store",
        "render",
        "book-simson.book",
        "--locale",
        "zh",
        "-o",
        "out.html",
        cwd=cli_workspace,
    )
    assert out.returncode == 0
    assert (cli_workspace / "out.html").read_text("utf-8").startswith("<!DOCTYPE html>")


def test_cli_discover_json(cli_workspace):
    out = _cli(
        "--store",
        "kb.store",
        "--format",
        "json",
        "discover",
        "obj-000013",  # midline
        cwd=cli_workspace,
    )
    data = json.loads(out.stdout)
    assert {"target", "candidates", "warnings", "accepted"} <= set(data)


def test_cli_json_schema_every_subcommand(cli_workspace, tmp_path):
    """--format json output parses and carries the documented keys."""
    ws = cli_workspace
    obj_file = tmp_path / "note.json"
    obj_file.write_text(
        json.dumps({"kind": "Remark", "name": "cli note", "keywords": ["cli"]}),
        encoding="utf-8",
    )
    cases = [
        (("init", "--seed", "--force"), {"store", "seeded", "book"}),
        (("put", str(obj_file)), {"id"}),
        (("query", "keyWords[Simson]"), {"ids"}),
        (("discover", "obj-000011"), {"target", "candidates", "warnings", "accepted"}),
        (
            ("book", "check", "book-simson.book"),
            {"ok", "violations", "checkedRelations", "elapsedMs"},
        ),
        (
            ("render", "book-simson.book", "-o", "out2.html"),
            {"written", "bytes"},
        ),
        (
            ("prove", "obj-000014", "--direction", "forward"),  # midpoint lemma
            {"objectId", "status", "directions"},
        ),
        (
            ("figure", "obj-000011",),
            {"coordinates", "kinds", "degenerate", "conclusionResidual"},
        ),
    ]
    for args, expected_keys in cases:
        out = _cli("--store", "kb.store", "--format", "json", *args, cwd=ws)
        assert out.returncode == 0, (args, out.stderr)
        data = json.loads(out.stdout)
        assert expected_keys <= set(data), (args, sorted(data))


def test_cli_failure_nonzero_exit(cli_workspace):
    out = _cli("--store", "missing.store", "query", "keyWords[x]", cwd=cli_workspace)
    assert out.returncode != 0
    assert "error" in out.stderr
    out2 = _cli("--store", "kb.store", "query", "nonsense", cwd=cli_workspace)
    assert out2.returncode != 0
