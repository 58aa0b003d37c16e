#!/usr/bin/env python3
"""Regenerate the checked-in fixtures deterministically.

Usage: python scripts/make_fixtures.py
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from geobook import book as book_mod  # noqa: E402
from geobook.backends import proving  # noqa: E402
from geobook.corpus import build_simson_book, build_simson_corpus  # noqa: E402
from geobook.discover import accept_candidates, discover  # noqa: E402
from geobook.store import KnowledgeObject, Store  # noqa: E402


def main() -> None:
    out = Path(__file__).resolve().parents[1] / "fixtures"
    out.mkdir(exist_ok=True)

    store = Store()
    ids = build_simson_corpus(store)
    accept_candidates(discover(ids["simson"], store).candidates, store)

    # attach the generated figure script as the theorem's diagram data
    simson = store.get(ids["simson"])
    assert isinstance(simson, KnowledgeObject)
    simson.diagram = proving.object_script(store, ids["simson"], "generic-json")
    store.put_object(simson)

    store.save(out / "simson.store")
    book_mod.save(build_simson_book(ids), out / "simson-ch.book")
    print(f"wrote {out / 'simson.store'} ({len(store)} objects)")
    print(f"wrote {out / 'simson-ch.book'}")


if __name__ == "__main__":
    main()
