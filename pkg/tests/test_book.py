from __future__ import annotations

import random
import time

import pytest

from geobook.book import (
    Category,
    CycleDetected,
    DanglingReference,
    DuplicateLeaf,
    Insert,
    InvalidPosition,
    Leaf,
    Move,
    PolicyError,
    Remove,
    Rename,
    Textbook,
    check,
    default_policy,
    dumps,
    edit,
    format_policy,
    inverse_op,
    linearize,
    loads,
    parse_policy,
)
from geobook.store import RELATION_KINDS, KnowledgeObject, Store

from .oracles import brute_force_violations, flatten_tree


def _store_with(ids):
    store = Store()
    for oid in ids:
        store.put_object(KnowledgeObject(id=oid, kind="Remark", name=oid))
    return store


def _book(root) -> Textbook:
    return Textbook("bk", "test book", root)


# --- linearize -------------------------------------------------------------


def test_single_chapter():
    book = _book(Category("ch1", "ch", (Leaf("defFoot"), Leaf("simson"))))
    assert linearize(book) == ["defFoot", "simson"]


def test_nested_dfs_order():
    book = _book(
        Category(
            "ch1",
            "c",
            (
                Category("s1", "s1", (Leaf("a"),)),
                Category("s2", "s2", (Leaf("b"), Leaf("c"))),
            ),
        )
    )
    outer = _book(
        Category("root", "r", (book.root, Category("ch2", "d", (Leaf("d"),))))
    )
    assert linearize(outer) == ["a", "b", "c", "d"]


def test_duplicate_leaf_rejected():
    book = _book(Category("ch", "c", (Leaf("a"), Leaf("a"))))
    with pytest.raises(DuplicateLeaf):
        linearize(book)


def test_dangling_reference_with_store():
    book = _book(Category("ch", "c", (Leaf("a"), Leaf("ghost"))))
    store = _store_with(["a"])
    with pytest.raises(DanglingReference):
        linearize(book, store)


def test_cycle_detected():
    shared = Category("dup", "d", (Leaf("x"),))
    book = _book(Category("root", "r", (shared, shared)))
    with pytest.raises(CycleDetected):
        linearize(book)


def _random_tree(rng: random.Random, n_leaves: int):
    """Build matching (Category tree, oracle tuple tree)."""
    leaf_ids = [f"n{i}" for i in range(n_leaves)]
    counter = [0]

    def build(leaves: list[str], depth: int):
        if depth > 4 or len(leaves) <= 1 or rng.random() < 0.3:
            cid = f"cat{counter[0]}"
            counter[0] += 1
            return (
                Category(cid, cid, tuple(Leaf(x) for x in leaves)),
                ("cat", cid, [("leaf", x) for x in leaves]),
            )
        cut = rng.randint(1, len(leaves) - 1) if len(leaves) > 1 else 1
        left_impl, left_oracle = build(leaves[:cut], depth + 1)
        right_impl, right_oracle = build(leaves[cut:], depth + 1)
        cid = f"cat{counter[0]}"
        counter[0] += 1
        return (
            Category(cid, cid, (left_impl, right_impl)),
            ("cat", cid, [left_oracle, right_oracle]),
        )

    return build(leaf_ids, 0)


def test_linearize_matches_recursive_flatten_oracle():
    rng = random.Random(2024)
    for _ in range(30):
        n = rng.randint(1, 1000)
        impl, oracle = _random_tree(rng, n)
        assert linearize(_book(impl)) == flatten_tree(oracle)


# --- default policy table ----------------------------------------------------


def test_default_policy_is_total_and_grounded():
    policy = default_policy()
    assert set(policy.order) == set(RELATION_KINDS)
    assert policy.order["Context"] == "sourceFirst"
    assert policy.order["Justification"] == "targetFirst"
    assert policy.order["Solution"] == "targetFirst"
    assert policy.order["Equality"] == "none"
    assert policy.required["Context"] and policy.required["Inheritance"]
    assert not policy.required["Justification"]
    assert policy.severity["Context"] == "error"
    assert policy.severity["Exercise"] == "warning"


def test_policy_file_round_trip(tmp_path):
    policy = default_policy()
    text = format_policy(policy)
    assert text.count("\n") == 19  # header + name + 17 kinds
    again = parse_policy(text)
    assert again.order == policy.order
    assert again.required == policy.required
    assert again.severity == policy.severity


def test_shipped_policy_file_matches_default():
    from importlib import resources

    from geobook.book import parse_policy

    text = resources.files("geobook").joinpath(
        "data/policy-default.policy"
    ).read_text(encoding="utf-8")
    shipped = parse_policy(text)
    policy = default_policy()
    assert shipped.order == policy.order
    assert shipped.required == policy.required
    assert shipped.severity == policy.severity


def test_policy_file_errors():
    with pytest.raises(PolicyError):
        parse_policy("nope")
    with pytest.raises(PolicyError):
        parse_policy("geobook-policy v1\nFrobnication=sourceFirst,optional,error\n")
    with pytest.raises(PolicyError):
        parse_policy("geobook-policy v1\nContext=sometimes,optional,error\n")


# --- check -------------------------------------------------------------------


def test_fig4_scenario_ordering_violation():
    store = _store_with(["defFoot", "simson"])
    store.add_relation("defFoot", "simson", "Context")
    bad = _book(Category("ch", "c", (Leaf("simson"), Leaf("defFoot"))))
    report = check(bad, store)
    assert not report.ok
    (v,) = report.violations
    assert v.kind == "OrderingViolation"
    assert v.source == "defFoot"
    assert v.severity == "error"
    good = _book(Category("ch", "c", (Leaf("defFoot"), Leaf("simson"))))
    assert check(good, store).ok


def test_missing_prerequisite():
    store = _store_with(["defFoot", "simson"])
    store.add_relation("defFoot", "simson", "Context")
    book = _book(Category("ch", "c", (Leaf("simson"),)))
    report = check(book, store)
    (v,) = report.violations
    assert v.kind == "MissingPrerequisite"
    assert v.source == "defFoot"


def test_warning_severity_for_non_context_kinds():
    store = _store_with(["thm", "proof"])
    store.add_relation("proof", "thm", "Justification")  # proof after theorem
    bad = _book(Category("ch", "c", (Leaf("proof"), Leaf("thm"))))
    report = check(bad, store)
    (v,) = report.violations
    assert v.severity == "warning"
    assert check(_book(Category("ch", "c", (Leaf("thm"), Leaf("proof")))), store).ok


def test_dangling_reference_is_report_entry():
    store = _store_with(["a"])
    book = _book(Category("ch", "c", (Leaf("a"), Leaf("ghost"))))
    report = check(book, store)
    kinds = {v.kind for v in report.violations}
    assert "DanglingReference" in kinds


def test_check_never_mutates(seeded_book):
    store, ids, book = seeded_book
    digest = store.state_digest()
    before = dumps(book)
    check(book, store)
    assert store.state_digest() == digest
    assert dumps(book) == before


def test_adjacent_after_target_rule():
    from geobook.book import PrecedencePolicy

    order = dict(default_policy().order)
    order["Justification"] = "adjacentAfterTarget"
    policy = PrecedencePolicy(
        "strict", order, default_policy().required, default_policy().severity
    )
    store = _store_with(["thm", "x", "proof"])
    store.add_relation("proof", "thm", "Justification")
    apart = _book(Category("ch", "c", (Leaf("thm"), Leaf("x"), Leaf("proof"))))
    assert not check(apart, store, policy).ok
    adjacent = _book(Category("ch", "c", (Leaf("thm"), Leaf("proof"), Leaf("x"))))
    assert check(adjacent, store, policy).ok


# --- brute-force agreement property -----------------------------------------


def _random_case(rng: random.Random, max_leaves=200):
    n = rng.randint(2, max_leaves)
    impl, _ = _random_tree(rng, n)
    all_ids = [f"n{i}" for i in range(n + 5)]  # a few extra not in the book
    store = _store_with(all_ids)
    triples = set()
    for _ in range(rng.randint(0, 3 * n)):
        s, t = rng.sample(all_ids, 2)
        k = rng.choice(RELATION_KINDS)
        if (s, t, k) not in triples:
            triples.add((s, t, k))
            store.add_relation(s, t, k)
    return _book(impl), store, triples


def _report_triples(report):
    ordering = {
        (v.source, v.target, v.relation_kind)
        for v in report.violations
        if v.kind == "OrderingViolation"
    }
    missing = {
        (v.source, v.target, v.relation_kind)
        for v in report.violations
        if v.kind == "MissingPrerequisite"
    }
    return ordering, missing


def test_check_agrees_with_brute_force_on_random_instances():
    rng = random.Random(8888)
    policy = default_policy()
    for _ in range(60):
        book, store, triples = _random_case(rng, max_leaves=60)
        report = check(book, store, policy)
        got_ordering, got_missing = _report_triples(report)
        want_ordering, want_missing = brute_force_violations(
            linearize(book), triples, policy.order, policy.required
        )
        assert got_ordering == want_ordering
        assert got_missing == want_missing


def test_check_empty_iff_brute_force_empty():
    rng = random.Random(4321)
    policy = default_policy()
    seen_consistent = 0
    for _ in range(40):
        book, store, triples = _random_case(rng, max_leaves=30)
        report = check(book, store, policy)
        ordering, missing = brute_force_violations(
            linearize(book), triples, policy.order, policy.required
        )
        assert report.ok == (not ordering and not missing)
        seen_consistent += report.ok
    del seen_consistent


def test_recheck_cost_on_large_fixture():
    # 10^3 leaves, 10^4 relations: the pass must stay O(V + E)
    rng = random.Random(99)
    impl, _ = _random_tree(rng, 1000)
    ids = [f"n{i}" for i in range(1000)]
    store = _store_with(ids)
    added = 0
    while added < 10_000:
        s, t = rng.sample(ids, 2)
        k = rng.choice(RELATION_KINDS)
        try:
            store.add_relation(s, t, k)
            added += 1
        except Exception:
            continue
    book = _book(impl)
    check(book, store)  # warm
    start = time.perf_counter()
    check(book, store)
    elapsed_ms = (time.perf_counter() - start) * 1000
    assert elapsed_ms < 100, f"check took {elapsed_ms:.1f} ms"


# --- edits -------------------------------------------------------------------


def test_insert_recheck_realtime(seeded_book):
    store, ids, book = seeded_book
    from geobook.discover import accept_candidates, discover

    accept_candidates(discover(ids["simson"], store).candidates, store)
    trimmed, _ = edit(book, Remove(ids["simson"]))
    new_book, report = edit(
        trimmed,
        Insert("sec-simson", 0, leaf=ids["simson"]),
        store,
        recheck=True,
    )
    assert report is not None and report.ok
    assert ids["simson"] in linearize(new_book)


def test_move_clears_violation(seeded_book):
    store, ids, book = seeded_book
    from geobook.discover import accept_candidates, discover

    accept_candidates(discover(ids["simson"], store).candidates, store)
    _, foot_idx = book.parent_of(ids["foot"])
    bad, report = edit(
        book, Move(ids["simson"], "sec-preliminaries", foot_idx), store, recheck=True
    )
    assert len(report.violations) == 1
    assert report.violations[0].source == ids["foot"]
    good, report2 = edit(bad, Move(ids["simson"], "sec-simson", 0), store, recheck=True)
    assert report2.ok


def test_insert_duplicate_leaf_rejected(seeded_book):
    _, ids, book = seeded_book
    with pytest.raises(DuplicateLeaf):
        edit(book, Insert("sec-simson", 0, leaf=ids["point"]))


def test_invalid_positions(seeded_book):
    _, ids, book = seeded_book
    with pytest.raises(InvalidPosition):
        edit(book, Insert("no-such-cat", 0, leaf="x"))
    with pytest.raises(InvalidPosition):
        edit(book, Insert("sec-simson", 99, leaf="x"))
    with pytest.raises(InvalidPosition):
        edit(book, Move(ids["point"], "no-such-cat", 0))
    with pytest.raises(InvalidPosition):
        edit(book, Remove("ghost"))


def _report_key(report):
    data = report.to_json()
    data.pop("elapsedMs")
    return data


def test_edit_then_inverse_restores(seeded_book):
    store, ids, book = seeded_book
    baseline_order = linearize(book)
    baseline_report = _report_key(check(book, store))
    ops = [
        Move(ids["simson"], "sec-preliminaries", 0),
        Remove(ids["midpoint"]),
        Insert("sec-simson", 1, leaf=ids["midline"]),
        Rename("sec-simson", "Simson lines, renamed"),
    ]
    for op in ops:
        inverse = inverse_op(book, op)
        edited, _ = edit(book, op)
        restored, _ = edit(edited, inverse)
        assert linearize(restored) == baseline_order
        assert _report_key(check(restored, store)) == baseline_report


def test_move_category_under_descendant_rejected():
    inner = Category("inner", "i", (Leaf("a"),))
    outer = Category("outer", "o", (inner,))
    book = _book(Category("root", "r", (outer, Leaf("b"))))
    with pytest.raises(InvalidPosition):
        edit(book, Move("outer", "inner", 0))


def test_category_insert_and_rename():
    book = _book(Category("root", "r", (Leaf("a"),)))
    with_cat, _ = edit(book, Insert("root", 1, category_id="s1", category_title="S"))
    assert with_cat.find_category("s1").title == "S"
    renamed, _ = edit(with_cat, Rename("s1", "Section One"))
    assert renamed.find_category("s1").title == "Section One"
    renamed_book, _ = edit(book, Rename("bk", "New Title"))
    assert renamed_book.title == "New Title"


# --- persistence --------------------------------------------------------------


def test_book_file_round_trip(seeded_book):
    _, _, book = seeded_book
    text = dumps(book)
    again = loads(text)
    assert again == book
    assert dumps(again) == text


def test_book_file_rejects_bad_header():
    from geobook.book import BookError

    with pytest.raises(BookError):
        loads("geobook-book v9\n{}")
