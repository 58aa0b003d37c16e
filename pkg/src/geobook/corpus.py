"""Seeded knowledge corpus: the Simson-line chapter.

Builds a deterministic store holding the concept definitions (point,
line, triangle, foot, circumcircle, plus midpoint/median/intersection/
segment), Simson's theorem with proof and figure data, a small theorem
corpus for the prover, and a ready-made textbook for the chapter.
Object ids are stable across builds, so goldens and fixtures can refer
to them.
"""

from __future__ import annotations

from .book import Category, Leaf, Textbook
from .geolang import BUILTIN_DEFINITION_SOURCES
from .store import KnowledgeObject, Store

SIMSON_SOURCE = (
    "A := point();\n"
    "B := point();\n"
    "C := point();\n"
    "D := point();\n"
    "incident(D, circumcircle(triangle(A, B, C))) <=> "
    "collinear(foot(D, line(A, B)), foot(D, line(B, C)), foot(D, line(A, C)));\n"
)

MIDLINE_SOURCE = (
    "A := point();\n"
    "B := point();\n"
    "C := point();\n"
    "M := midpoint(A, B);\n"
    "N := midpoint(A, C);\n"
    "parallel(line(M, N), line(B, C));\n"
)

MIDPOINT_UNIQUE_SOURCE = (
    "A := point();\n"
    "B := point();\n"
    "M := midpoint(A, B);\n"
    "N := midpoint(A, B);\n"
    "equalp(M, N);\n"
)

CIRCUMCENTER_SOURCE = (
    "A := point();\n"
    "B := point();\n"
    "C := point();\n"
    "O := point();\n"
    "eqdist(O, A, O, B) /\\ eqdist(O, B, O, C) => incident(C, circle(O, A));\n"
)

FALSE_FEET_SOURCE = (
    "A := point();\n"
    "B := point();\n"
    "C := point();\n"
    "D := point();\n"
    "collinear(foot(D, line(A, B)), foot(D, line(B, C)), foot(D, line(A, C)));\n"
)


def _concept(name, keywords, en, zh=None, formal=None):
    obj = KnowledgeObject(
        id="",
        kind="Concept",
        name=name,
        keywords=keywords,
        natural={"en": en},
        formal=formal,
    )
    if zh:
        obj.natural["zh"] = zh
    return obj


def build_simson_corpus(store: Store) -> dict[str, str]:
    """Populate a store with the Simson chapter; returns name -> id."""
    ids: dict[str, str] = {}

    ids["point"] = store.put_object(
        _concept(
            "point",
            ["point", "primitive"],
            "A point marks a position in the plane; it has no extent.",
            "点表示平面上的位置。",
        )
    )
    ids["line"] = store.put_object(
        _concept(
            "line",
            ["line", "primitive"],
            "The line through two distinct points extends without end "
            "in both directions.",
            "过两点的直线向两端无限"
            "延伸。",
        )
    )
    ids["circle"] = store.put_object(
        _concept(
            "circle",
            ["circle", "primitive"],
            "A circle with a given center passing through a given point "
            "collects all points at that distance from the center.",
        )
    )
    ids["triangle"] = store.put_object(
        _concept(
            "triangle",
            ["triangle"],
            "A triangle is determined by three vertices; its sides are "
            "the segments joining them.",
            "三角形由三个顶点确定。",
        )
    )
    ids["segment"] = store.put_object(
        _concept(
            "segment",
            ["segment"],
            "A segment joins two endpoints.",
        )
    )
    ids["intersection"] = store.put_object(
        _concept(
            "intersection",
            ["intersection", "lines"],
            "The intersection point of two lines l and m is the point "
            "incident to both.",
            formal=BUILTIN_DEFINITION_SOURCES["intersection"],
        )
    )
    ids["midpoint"] = store.put_object(
        _concept(
            "midpoint",
            ["midpoint", "segment"],
            "The midpoint of A and B lies on segment AB at equal "
            "distance from both endpoints.",
            formal=BUILTIN_DEFINITION_SOURCES["midpoint"],
        )
    )
    ids["foot"] = store.put_object(
        _concept(
            "foot",
            ["foot", "perpendicular"],
            "The foot of the perpendicular from a point P to a line l is "
            "the point of l where the perpendicular through P meets it.",
            "垂足是过点作直线的垂线"
            "与该直线的交点。",
            formal=BUILTIN_DEFINITION_SOURCES["foot"],
        )
    )
    ids["circumcircle"] = store.put_object(
        _concept(
            "circumcircle",
            ["circumcircle", "triangle", "circle"],
            "The circumcircle of a triangle passes through all three "
            "vertices.",
            "外接圆经过三角形的三个"
            "顶点。",
            formal=BUILTIN_DEFINITION_SOURCES["circumcircle"],
        )
    )
    ids["median"] = store.put_object(
        _concept(
            "median",
            ["median", "triangle"],
            "A median of a triangle joins a vertex to the midpoint of "
            "the opposite side.",
            formal=BUILTIN_DEFINITION_SOURCES["median"],
        )
    )

    ids["simson"] = store.put_object(
        KnowledgeObject(
            id="",
            kind="Theorem",
            name="Simson's theorem",
            keywords=["Simson", "collinear", "circumcircle"],
            natural={
                "en": "The feet of the perpendiculars from a point to the "
                "three sides of a triangle are collinear if and only if "
                "the point lies on the circumcircle.",
                "zh": "从一点向三角形三边"
                "所作垂线的垂足共线，"
                "当且仅当该点在外接圆"
                "上。",
            },
            formal=SIMSON_SOURCE,
        )
    )
    ids["simson-proof"] = store.put_object(
        KnowledgeObject(
            id="",
            kind="Proof",
            name="Proof of Simson's theorem",
            keywords=["Simson", "proof"],
            natural={
                "en": "Both directions follow algebraically: triangularize "
                "the hypothesis polynomials and reduce the collinearity "
                "determinant; the pseudo-remainder vanishes, so the "
                "statement holds wherever the nondegeneracy conditions do."
            },
        )
    )
    ids["midline"] = store.put_object(
        KnowledgeObject(
            id="",
            kind="Theorem",
            name="Midline theorem",
            keywords=["midline", "midpoint", "parallel"],
            natural={
                "en": "The segment joining the midpoints of two sides of a "
                "triangle is parallel to the third side."
            },
            formal=MIDLINE_SOURCE,
        )
    )
    ids["midpoint-unique"] = store.put_object(
        KnowledgeObject(
            id="",
            kind="Lemma",
            name="Uniqueness of the midpoint",
            keywords=["midpoint", "uniqueness"],
            natural={
                "en": "Two midpoints of the same pair of points coincide."
            },
            formal=MIDPOINT_UNIQUE_SOURCE,
        )
    )
    ids["circumcenter-prop"] = store.put_object(
        KnowledgeObject(
            id="",
            kind="Theorem",
            name="Circumcenter property",
            keywords=["circumcenter", "perpendicular bisector"],
            natural={
                "en": "A point equidistant from A, B and from B, C is the "
                "center of a circle through all three."
            },
            formal=CIRCUMCENTER_SOURCE,
        )
    )
    ids["false-feet"] = store.put_object(
        KnowledgeObject(
            id="",
            kind="Conjecture",
            name="Pedal collinearity for an arbitrary point (false)",
            keywords=["pedal", "collinear", "false"],
            natural={
                "en": "The feet of the perpendiculars from an arbitrary "
                "point to the three sides of a triangle are collinear. "
                "(Deliberately false: it holds only on the circumcircle.)"
            },
            formal=FALSE_FEET_SOURCE,
        )
    )

    store.add_relation(ids["simson-proof"], ids["simson"], "Justification")
    store.add_relation(ids["midline"], ids["simson"], "Association")

    return ids


def simson_context_sources(ids: dict[str, str]) -> list[str]:
    """The five definitions providing the context for Simson's theorem."""
    return sorted(
        ids[name] for name in ("point", "line", "foot", "triangle", "circumcircle")
    )


def build_simson_book(ids: dict[str, str]) -> Textbook:
    root = Category(
        "ch-simson",
        "Simson lines",
        (
            Category(
                "sec-preliminaries",
                "Preliminaries",
                (
                    Leaf(ids["point"]),
                    Leaf(ids["line"]),
                    Leaf(ids["circle"]),
                    Leaf(ids["triangle"]),
                    Leaf(ids["midpoint"]),
                    Leaf(ids["circumcircle"]),
                    Leaf(ids["foot"]),
                ),
            ),
            Category(
                "sec-simson",
                "The Simson line",
                (
                    Leaf(ids["simson"]),
                    Leaf(ids["simson-proof"]),
                ),
            ),
        ),
    )
    return Textbook("book-simson", "Plane Geometry: Simson Lines", root)


def build_seeded_store() -> tuple[Store, dict[str, str]]:
    store = Store()
    ids = build_simson_corpus(store)
    return store, ids
