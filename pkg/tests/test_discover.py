from __future__ import annotations

import random

import pytest

from geobook.discover import (
    ParseFailure,
    StaleCandidate,
    accept_candidates,
    discover,
    registry_for_store,
)
from geobook.geolang import parse, symbols_used, walk_atoms
from geobook.store import KnowledgeObject, Store


def test_simson_context_candidates(seeded):
    store, ids = seeded
    result = discover(ids["simson"], store)
    expected = {
        ids[name] for name in ("point", "line", "foot", "triangle", "circumcircle")
    }
    assert result.sources() == expected
    assert len(result) == 5
    assert all(c.kind == "Context" for c in result)
    # primitive predicates have no defining objects: warnings, not candidates
    assert any("incident" in w for w in result.warnings)
    assert any("collinear" in w for w in result.warnings)


def test_candidate_evidence_symbols(seeded):
    store, ids = seeded
    result = discover(ids["simson"], store)
    by_source = {c.source: c for c in result}
    assert by_source[ids["foot"]].evidence == frozenset({"foot"})
    assert by_source[ids["point"]].evidence == frozenset({"point"})


def test_self_defined_symbols_excluded(seeded):
    store, ids = seeded
    # foot's own definition applies line(P, F); foot itself is excluded
    result = discover(ids["foot"], store)
    assert ids["foot"] not in result.sources()
    assert ids["line"] in result.sources()
    # intersection's body applies only the incident predicate: no candidates
    result2 = discover(ids["intersection"], store)
    assert len(result2) == 0
    assert any("incident" in w for w in result2.warnings)


def test_median_inherits_from_midpoint(seeded):
    store, ids = seeded
    result = discover(ids["median"], store)
    assert ids["midpoint"] in result.sources()
    by_source = {c.source: c for c in result}
    cand = by_source[ids["midpoint"]]
    assert cand.kind == "Inheritance"  # Concept over Concept
    assert "midpoint" in cand.evidence


def test_object_without_formal_representation(seeded):
    store, ids = seeded
    with pytest.raises(ParseFailure):
        discover(ids["simson-proof"], store)


def test_parse_failure_surfaced():
    store = Store()
    oid = store.put_object(
        KnowledgeObject(id="", kind="Theorem", name="broken", formal="A := ; nope")
    )
    with pytest.raises(ParseFailure):
        discover(oid, store)


def test_discover_is_read_only(seeded):
    store, ids = seeded
    before = store.state_digest()
    discover(ids["simson"], store)
    assert store.state_digest() == before


def test_accept_candidates_and_skip_duplicates(seeded):
    store, ids = seeded
    result = discover(ids["simson"], store)
    # pre-existing manual relation must be skipped silently
    store.add_relation(ids["foot"], ids["simson"], "Context", "manual")
    count_before = len(store.relations())
    added = accept_candidates(result.candidates, store)
    assert added == 4  # five candidates, one already present
    assert len(store.relations()) == count_before + 4
    assert store.query_relation(None, ids["simson"], "Context") == result.sources()
    # accepting again changes nothing
    total = len(store.relations())
    assert accept_candidates(discover(ids["simson"], store).candidates, store) == 0
    assert len(store.relations()) == total


def test_accept_empty_set_is_noop(seeded):
    store, _ = seeded
    before = store.state_digest()
    assert accept_candidates([], store) == 0
    assert store.state_digest() == before


def test_stale_candidate_rejected(seeded):
    store, ids = seeded
    result = discover(ids["simson"], store)
    obj = store.get(ids["simson"])
    changed = KnowledgeObject(
        id=obj.id,
        kind=obj.kind,
        name=obj.name,
        keywords=obj.keywords,
        natural=obj.natural,
        formal=(obj.formal or "") + "\n# edited\n",
    )
    store.put_object(changed)
    with pytest.raises(StaleCandidate):
        accept_candidates(result.candidates, store)


def test_ambiguous_definer_flag(seeded):
    store, ids = seeded
    # a second Concept named "point" (no formal text) is a second definer
    store.put_object(
        KnowledgeObject(id="", kind="Concept", name="point", natural={"en": "again"})
    )
    result = discover(ids["simson"], store)
    point_cands = [c for c in result if "point" in c.evidence]
    assert len(point_cands) == 2
    assert all(c.ambiguous for c in point_cands)


# --- soundness & completeness properties ------------------------------------


def test_soundness_evidence_occurs_in_ast(seeded):
    store, ids = seeded
    reg = registry_for_store(store)
    for name in ("simson", "midline", "circumcenter-prop", "median"):
        result = discover(ids[name], store, reg)
        program = parse(store.get(ids[name]).formal)
        # independent AST walk: all applied symbols
        used = symbols_used(program)
        for cand in result:
            assert cand.evidence <= used


def test_completeness_on_randomized_corpora():
    rng = random.Random(31337)
    base_defs = {
        "midpoint": "midpoint(A :: Point, B :: Point) ::= [M :: Point where collinear(A, M, B) /\\ eqdist(M, A, M, B)];",
        "foot": "foot(P :: Point, l :: Line) ::= [F :: Point where incident(F, l) /\\ perpendicular(line(P, F), l)];",
        "intersection": "intersection(l :: Line, m :: Line) ::= [P :: Point where incident(P, l) /\\ incident(P, m)];",
    }
    for _ in range(10):
        store = Store()
        chosen = {
            name: src for name, src in base_defs.items() if rng.random() < 0.75
        }
        definer_ids = {
            name: store.put_object(
                KnowledgeObject(
                    id="", kind="Concept", name=name, formal=src
                )
            )
            for name, src in chosen.items()
        }
        uses = {
            "midpoint": "A := point(); B := point(); C := point(); collinear(midpoint(A, B), midpoint(B, C), C);",
            "foot": "A := point(); B := point(); D := point(); equalp(foot(D, line(A, B)), A);",
            "intersection": "A := point(); B := point(); C := point(); E := point(); P := intersection(line(A, B), line(C, E)); equalp(P, A);",
        }
        symbol = rng.choice(sorted(uses))
        target = store.put_object(
            KnowledgeObject(
                id="", kind="Problem", name=f"uses {symbol}", formal=uses[symbol]
            )
        )
        result = discover(target, store)
        if symbol in definer_ids:
            # unique definer => candidate must be emitted
            assert definer_ids[symbol] in result.sources()
            atoms = [
                a
                for f in parse(uses[symbol]).formulas
                for a in walk_atoms(f)
            ]
            assert atoms  # sanity: the statement does use formulas
        else:
            assert any(symbol in w for w in result.warnings)
