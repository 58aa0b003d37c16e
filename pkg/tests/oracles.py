"""Independent oracles used by the test suite.

Everything here is deliberately written from scratch against the
mathematical definitions (tuple arithmetic, brute-force scans,
recursive flattening) rather than through the package's own code paths,
so a test comparing implementation output to an oracle actually checks
two separate derivations.
"""

from __future__ import annotations

import math


# --- plane geometry on raw tuples -------------------------------------------


def midpoint(a, b):
    return ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)


def line_coeffs(p, q):
    # ax + by + c = 0 through p, q
    a = p[1] - q[1]
    b = q[0] - p[0]
    c = p[0] * q[1] - q[0] * p[1]
    return a, b, c


def foot(p, a, b):
    """Foot of the perpendicular from p onto line ab, by projection."""
    ax, ay = a
    dx, dy = b[0] - a[0], b[1] - a[1]
    n2 = dx * dx + dy * dy
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / n2
    return (ax + t * dx, ay + t * dy)


def circumcenter(a, b, c):
    """Intersection of two perpendicular bisectors, solved by Cramer."""
    ax, ay = a
    bx, by = b
    cx, cy = c
    a1, b1 = bx - ax, by - ay
    c1 = (bx * bx - ax * ax + by * by - ay * ay) / 2.0
    a2, b2 = cx - ax, cy - ay
    c2 = (cx * cx - ax * ax + cy * cy - ay * ay) / 2.0
    det = a1 * b2 - a2 * b1
    return ((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)


def intersect_lines(p1, q1, p2, q2):
    a1, b1, c1 = line_coeffs(p1, q1)
    a2, b2, c2 = line_coeffs(p2, q2)
    den = a1 * b2 - a2 * b1
    return ((b1 * c2 - b2 * c1) / den, (c1 * a2 - c2 * a1) / den)


def dist2(a, b):
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def collinear_residual(a, b, c):
    t1 = (b[0] - a[0]) * (c[1] - a[1])
    t2 = (b[1] - a[1]) * (c[0] - a[0])
    return abs(t1 - t2) / (1.0 + abs(t1) + abs(t2))


def on_circle_residual(p, center, through):
    t1 = dist2(p, center)
    t2 = dist2(through, center)
    return abs(t1 - t2) / (1.0 + t1 + t2)


def point_on_circumcircle(a, b, c, theta):
    o = circumcenter(a, b, c)
    r = math.sqrt(dist2(o, a))
    return (o[0] + r * math.cos(theta), o[1] + r * math.sin(theta))


# --- brute-force store queries ------------------------------------------------


def scan_keywords(objects, words):
    """objects: iterable of (id, keyword-list)."""
    wanted = {w.lower() for w in words}
    return {
        oid
        for oid, keywords in objects
        if wanted <= {k.lower() for k in keywords}
    }


def scan_relations(relations, source, target, kind):
    """relations: iterable of (source, target, kind)."""
    if source is None:
        return {s for s, t, k in relations if t == target and k == kind}
    return {t for s, t, k in relations if s == source and k == kind}


# --- recursive book flattening and brute-force consistency --------------------


def flatten_tree(node) -> list[str]:
    """node: ("cat", id, [children]) | ("leaf", object_id)."""
    if node[0] == "leaf":
        return [node[1]]
    out: list[str] = []
    for child in node[2]:
        out.extend(flatten_tree(child))
    return out


def brute_force_violations(order, relations, policy_order, policy_required):
    """Every (kind, source, target) pair that breaks the rules.

    order: list of object ids in reading order.
    relations: iterable of (source, target, kind).
    Returns (ordering violations, missing prerequisites) as sets of
    relation triples.
    """
    position = {oid: i for i, oid in enumerate(order)}
    ordering = set()
    missing = set()
    for s, t, k in relations:
        rule = policy_order.get(k, "none")
        sp, tp = position.get(s), position.get(t)
        if tp is not None and sp is None and policy_required.get(k, False):
            missing.add((s, t, k))
            continue
        if sp is None or tp is None or rule == "none":
            continue
        if rule == "sourceFirst" and not sp < tp:
            ordering.add((s, t, k))
        elif rule == "targetFirst" and not tp < sp:
            ordering.add((s, t, k))
        elif rule == "adjacentAfterTarget" and sp != tp + 1:
            ordering.add((s, t, k))
    return ordering, missing
