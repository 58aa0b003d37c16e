from __future__ import annotations

import pytest

from geobook.corpus import (
    build_seeded_store,
    build_simson_book,
)
from geobook.expand import dgs_core, prover_core
from geobook.geolang import builtin_registry


@pytest.fixture(scope="session")
def registry():
    return builtin_registry()


@pytest.fixture(scope="session")
def core_profile():
    return prover_core()


@pytest.fixture(scope="session")
def dgs_profile():
    return dgs_core()


@pytest.fixture()
def seeded():
    """(store, ids) with the Simson corpus, fresh per test."""
    return build_seeded_store()


@pytest.fixture()
def seeded_book(seeded):
    store, ids = seeded
    return store, ids, build_simson_book(ids)
