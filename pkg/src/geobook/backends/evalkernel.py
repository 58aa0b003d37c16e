"""Batch evaluation kernels for construction sequences.

A construction compiles to a flat opcode program over uniform 3-wide
slots (points use two entries, lines hold ``(a, b, c)`` coefficients,
circles hold ``(cx, cy, r2)``).  The interpreter evaluates the whole
instance batch in one call, which is the hot loop behind the numeric
theorem oracle and figure dragging.

Two implementations share the exact same per-step formulas:

* a numba ``@njit`` scalar loop over instances (default), and
* a pure-numpy path vectorized across the instance axis.

Set ``GEOBOOK_NUMBA=0`` to force the numpy path; the numpy path is also
the automatic fallback when numba is unavailable.  ``benchmarks/
bench_eval.py`` compares the two.

Degeneracy is per instance: any step whose denominator magnitude drops
below ``1e-12`` flags the instance.  Conclusion checks report a
unit-free scaled residual |value| / (1 + sum |terms|).
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .construct import ConstructionSequence

DEGENERACY_TOL = 1e-12

OP_FREE = 0
OP_MIDPOINT = 1
OP_LINE = 2
OP_FOOT = 3
OP_INTERSECT_LL = 4
OP_CIRCUMCIRCLE = 5
OP_POINT_ON_CIRCLE = 6
OP_POINT_ON_LINE = 7
OP_CIRCLE_OT = 8
OP_PERP_BISECTOR = 9
OP_PERP_LINE = 10
OP_PARALLEL_LINE = 11
OP_INTERSECT_LC = 12
OP_INTERSECT_CC = 13

_OPCODE = {
    "free_point": OP_FREE,
    "midpoint": OP_MIDPOINT,
    "line": OP_LINE,
    "foot": OP_FOOT,
    "intersect_ll": OP_INTERSECT_LL,
    "circumcircle": OP_CIRCUMCIRCLE,
    "point_on_circle": OP_POINT_ON_CIRCLE,
    "point_on_line": OP_POINT_ON_LINE,
    "circle": OP_CIRCLE_OT,
    "perp_bisector": OP_PERP_BISECTOR,
    "perp_line": OP_PERP_LINE,
    "parallel_line": OP_PARALLEL_LINE,
    "intersect_lc": OP_INTERSECT_LC,
    "intersect_cc": OP_INTERSECT_CC,
}

CK_COLLINEAR = 0
CK_INCIDENT_PL = 1
CK_INCIDENT_PC = 2
CK_PARALLEL = 3
CK_PERPENDICULAR = 4
CK_EQDIST = 5
CK_EQUALP = 6

_CHECKCODE = {
    "collinear": CK_COLLINEAR,
    "incident_pl": CK_INCIDENT_PL,
    "incident_pc": CK_INCIDENT_PC,
    "parallel": CK_PARALLEL,
    "perpendicular": CK_PERPENDICULAR,
    "eqdist": CK_EQDIST,
    "equalp": CK_EQUALP,
}


@dataclass
class CompiledProgram:
    ops: np.ndarray  # (n_steps, 5) int64: opcode, out, a1, a2, a3
    checks: np.ndarray  # (n_checks, 5) int64: pred, a1..a4
    slot_names: list[str]
    slot_index: dict[str, int]
    step_kinds: dict[str, str]  # out name -> op name
    free_layout: list[tuple[str, int, int]]  # (name, offset, width)
    n_free_values: int

    def free_offset(self, name: str) -> tuple[int, int]:
        for n, off, width in self.free_layout:
            if n == name:
                return off, width
        raise KeyError(name)


def compile_program(seq: ConstructionSequence) -> CompiledProgram:
    slot_index = {s.out: i for i, s in enumerate(seq.steps)}
    free_layout: list[tuple[str, int, int]] = []
    offset = 0
    for s in seq.steps:
        if s.op == "free_point":
            free_layout.append((s.out, offset, 2))
            offset += 2
        for p in s.params:
            free_layout.append((p, offset, 1))
            offset += 1
    param_offset = {n: off for n, off, _ in free_layout}

    ops = np.zeros((len(seq.steps), 5), dtype=np.int64)
    for i, s in enumerate(seq.steps):
        code = _OPCODE[s.op]
        row = [code, slot_index[s.out], 0, 0, 0]
        if s.op == "free_point":
            row[2] = param_offset[s.out]
        elif s.op in ("point_on_circle", "point_on_line"):
            row[2] = slot_index[s.args[0]]
            row[3] = param_offset[s.params[0]]
        else:
            for j, a in enumerate(s.args):
                row[2 + j] = slot_index[a]
            if s.op in ("intersect_lc", "intersect_cc"):
                row[4] = s.branch if s.branch else 1
        ops[i] = row

    checks = np.zeros((max(len(seq.conclusion), 0), 5), dtype=np.int64)
    for i, c in enumerate(seq.conclusion):
        row = [_CHECKCODE[c.pred], 0, 0, 0, 0]
        for j, a in enumerate(c.args):
            row[1 + j] = slot_index[a]
        checks[i] = row

    return CompiledProgram(
        ops=ops,
        checks=checks,
        slot_names=[s.out for s in seq.steps],
        slot_index=slot_index,
        step_kinds={s.out: s.op for s in seq.steps},
        free_layout=free_layout,
        n_free_values=offset,
    )


# --- scalar interpreter (numba-jittable) ----------------------------------


def _eval_batch_loops(ops, checks, free, slots, degen, resid):  # pragma: no cover
    n_inst = free.shape[0]
    n_steps = ops.shape[0]
    n_checks = checks.shape[0]
    tol = 1e-12
    for i in range(n_inst):
        bad = False
        for s in range(n_steps):
            op = ops[s, 0]
            out = ops[s, 1]
            a1 = ops[s, 2]
            a2 = ops[s, 3]
            a3 = ops[s, 4]
            if op == 0:  # FREE
                slots[i, out, 0] = free[i, a1]
                slots[i, out, 1] = free[i, a1 + 1]
            elif op == 1:  # MIDPOINT
                slots[i, out, 0] = 0.5 * (slots[i, a1, 0] + slots[i, a2, 0])
                slots[i, out, 1] = 0.5 * (slots[i, a1, 1] + slots[i, a2, 1])
            elif op == 2:  # LINE
                px = slots[i, a1, 0]
                py = slots[i, a1, 1]
                qx = slots[i, a2, 0]
                qy = slots[i, a2, 1]
                la = py - qy
                lb = qx - px
                lc = px * qy - qx * py
                if la * la + lb * lb < tol:
                    bad = True
                slots[i, out, 0] = la
                slots[i, out, 1] = lb
                slots[i, out, 2] = lc
            elif op == 3:  # FOOT
                px = slots[i, a1, 0]
                py = slots[i, a1, 1]
                la = slots[i, a2, 0]
                lb = slots[i, a2, 1]
                lc = slots[i, a2, 2]
                den = la * la + lb * lb
                if den < tol:
                    bad = True
                    den = 1.0
                t = (la * px + lb * py + lc) / den
                slots[i, out, 0] = px - la * t
                slots[i, out, 1] = py - lb * t
            elif op == 4:  # INTERSECT_LL
                a1x = slots[i, a1, 0]
                b1x = slots[i, a1, 1]
                c1x = slots[i, a1, 2]
                a2x = slots[i, a2, 0]
                b2x = slots[i, a2, 1]
                c2x = slots[i, a2, 2]
                den = a1x * b2x - a2x * b1x
                if den < tol and den > -tol:
                    bad = True
                    den = 1.0
                slots[i, out, 0] = (b1x * c2x - b2x * c1x) / den
                slots[i, out, 1] = (c1x * a2x - c2x * a1x) / den
            elif op == 5:  # CIRCUMCIRCLE
                ax = slots[i, a1, 0]
                ay = slots[i, a1, 1]
                bx = slots[i, a2, 0]
                by = slots[i, a2, 1]
                cx = slots[i, a3, 0]
                cy = slots[i, a3, 1]
                d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
                if d < tol and d > -tol:
                    bad = True
                    d = 1.0
                na = ax * ax + ay * ay
                nb = bx * bx + by * by
                nc = cx * cx + cy * cy
                ux = (na * (by - cy) + nb * (cy - ay) + nc * (ay - by)) / d
                uy = (na * (cx - bx) + nb * (ax - cx) + nc * (bx - ax)) / d
                slots[i, out, 0] = ux
                slots[i, out, 1] = uy
                slots[i, out, 2] = (ax - ux) * (ax - ux) + (ay - uy) * (ay - uy)
            elif op == 6:  # POINT_ON_CIRCLE
                cx = slots[i, a1, 0]
                cy = slots[i, a1, 1]
                r2 = slots[i, a1, 2]
                if r2 < 0.0:
                    r2 = 0.0
                r = math.sqrt(r2)
                th = free[i, a2]
                slots[i, out, 0] = cx + r * math.cos(th)
                slots[i, out, 1] = cy + r * math.sin(th)
            elif op == 7:  # POINT_ON_LINE
                la = slots[i, a1, 0]
                lb = slots[i, a1, 1]
                lc = slots[i, a1, 2]
                den = la * la + lb * lb
                if den < tol:
                    bad = True
                    den = 1.0
                t = free[i, a2]
                slots[i, out, 0] = -la * lc / den + lb * t
                slots[i, out, 1] = -lb * lc / den - la * t
            elif op == 8:  # CIRCLE_OT
                ox = slots[i, a1, 0]
                oy = slots[i, a1, 1]
                tx = slots[i, a2, 0]
                ty = slots[i, a2, 1]
                slots[i, out, 0] = ox
                slots[i, out, 1] = oy
                slots[i, out, 2] = (tx - ox) * (tx - ox) + (ty - oy) * (ty - oy)
            elif op == 9:  # PERP_BISECTOR
                px = slots[i, a1, 0]
                py = slots[i, a1, 1]
                qx = slots[i, a2, 0]
                qy = slots[i, a2, 1]
                la = qx - px
                lb = qy - py
                if la * la + lb * lb < tol:
                    bad = True
                mx = 0.5 * (px + qx)
                my = 0.5 * (py + qy)
                slots[i, out, 0] = la
                slots[i, out, 1] = lb
                slots[i, out, 2] = -(la * mx + lb * my)
            elif op == 10:  # PERP_LINE
                la = slots[i, a1, 0]
                lb = slots[i, a1, 1]
                px = slots[i, a2, 0]
                py = slots[i, a2, 1]
                if la * la + lb * lb < tol:
                    bad = True
                slots[i, out, 0] = lb
                slots[i, out, 1] = -la
                slots[i, out, 2] = -lb * px + la * py
            elif op == 11:  # PARALLEL_LINE
                la = slots[i, a1, 0]
                lb = slots[i, a1, 1]
                px = slots[i, a2, 0]
                py = slots[i, a2, 1]
                if la * la + lb * lb < tol:
                    bad = True
                slots[i, out, 0] = la
                slots[i, out, 1] = lb
                slots[i, out, 2] = -la * px - lb * py
            elif op == 12:  # INTERSECT_LC
                la = slots[i, a1, 0]
                lb = slots[i, a1, 1]
                lc = slots[i, a1, 2]
                cx = slots[i, a2, 0]
                cy = slots[i, a2, 1]
                r2 = slots[i, a2, 2]
                den = la * la + lb * lb
                if den < tol:
                    bad = True
                    den = 1.0
                t = (la * cx + lb * cy + lc) / den
                fx = cx - la * t
                fy = cy - lb * t
                h2 = r2 - ((fx - cx) * (fx - cx) + (fy - cy) * (fy - cy))
                if h2 < 0.0:
                    bad = True
                    h2 = 0.0
                sgn = 1.0 if a3 >= 0 else -1.0
                s2 = math.sqrt(h2 / den)
                slots[i, out, 0] = fx + sgn * s2 * lb
                slots[i, out, 1] = fy - sgn * s2 * la
            elif op == 13:  # INTERSECT_CC
                x1 = slots[i, a1, 0]
                y1 = slots[i, a1, 1]
                r1 = slots[i, a1, 2]
                x2 = slots[i, a2, 0]
                y2 = slots[i, a2, 1]
                r2v = slots[i, a2, 2]
                dx = x2 - x1
                dy = y2 - y1
                d2 = dx * dx + dy * dy
                if d2 < tol:
                    bad = True
                    d2 = 1.0
                a = (d2 + r1 - r2v) / (2.0 * d2)
                bx = x1 + a * dx
                by = y1 + a * dy
                h2 = r1 - a * a * d2
                if h2 < 0.0:
                    bad = True
                    h2 = 0.0
                sgn = 1.0 if a3 >= 0 else -1.0
                s2 = math.sqrt(h2 / d2)
                slots[i, out, 0] = bx + sgn * s2 * (-dy)
                slots[i, out, 1] = by + sgn * s2 * dx
        worst = 0.0
        for k in range(n_checks):
            pred = checks[k, 0]
            p1 = checks[k, 1]
            p2 = checks[k, 2]
            p3 = checks[k, 3]
            p4 = checks[k, 4]
            v = 0.0
            m = 0.0
            if pred == 0:  # COLLINEAR
                t1 = (slots[i, p2, 0] - slots[i, p1, 0]) * (
                    slots[i, p3, 1] - slots[i, p1, 1]
                )
                t2 = (slots[i, p2, 1] - slots[i, p1, 1]) * (
                    slots[i, p3, 0] - slots[i, p1, 0]
                )
                v = t1 - t2
                m = abs(t1) + abs(t2)
            elif pred == 1:  # INCIDENT_PL
                t1 = slots[i, p2, 0] * slots[i, p1, 0]
                t2 = slots[i, p2, 1] * slots[i, p1, 1]
                t3 = slots[i, p2, 2]
                v = t1 + t2 + t3
                m = abs(t1) + abs(t2) + abs(t3)
            elif pred == 2:  # INCIDENT_PC
                t1 = (slots[i, p1, 0] - slots[i, p2, 0]) ** 2
                t2 = (slots[i, p1, 1] - slots[i, p2, 1]) ** 2
                t3 = slots[i, p2, 2]
                v = t1 + t2 - t3
                m = t1 + t2 + abs(t3)
            elif pred == 3:  # PARALLEL
                t1 = slots[i, p1, 0] * slots[i, p2, 1]
                t2 = slots[i, p1, 1] * slots[i, p2, 0]
                v = t1 - t2
                m = abs(t1) + abs(t2)
            elif pred == 4:  # PERPENDICULAR
                t1 = slots[i, p1, 0] * slots[i, p2, 0]
                t2 = slots[i, p1, 1] * slots[i, p2, 1]
                v = t1 + t2
                m = abs(t1) + abs(t2)
            elif pred == 5:  # EQDIST
                t1 = (slots[i, p1, 0] - slots[i, p2, 0]) ** 2 + (
                    slots[i, p1, 1] - slots[i, p2, 1]
                ) ** 2
                t2 = (slots[i, p3, 0] - slots[i, p4, 0]) ** 2 + (
                    slots[i, p3, 1] - slots[i, p4, 1]
                ) ** 2
                v = t1 - t2
                m = t1 + t2
            elif pred == 6:  # EQUALP
                v = (slots[i, p1, 0] - slots[i, p2, 0]) ** 2 + (
                    slots[i, p1, 1] - slots[i, p2, 1]
                ) ** 2
                m = (
                    slots[i, p1, 0] ** 2
                    + slots[i, p1, 1] ** 2
                    + slots[i, p2, 0] ** 2
                    + slots[i, p2, 1] ** 2
                )
            r = abs(v) / (1.0 + m)
            if r > worst:
                worst = r
        degen[i] = bad
        resid[i] = worst


# --- numpy fallback ---------------------------------------------------------


def _eval_batch_numpy(ops, checks, free, slots, degen, resid):
    tol = DEGENERACY_TOL
    bad = np.zeros(free.shape[0], dtype=bool)

    def col(idx, k):
        return slots[:, idx, k]

    for s in range(ops.shape[0]):
        op, out, a1, a2, a3 = (int(v) for v in ops[s])
        if op == OP_FREE:
            slots[:, out, 0] = free[:, a1]
            slots[:, out, 1] = free[:, a1 + 1]
        elif op == OP_MIDPOINT:
            slots[:, out, 0] = 0.5 * (col(a1, 0) + col(a2, 0))
            slots[:, out, 1] = 0.5 * (col(a1, 1) + col(a2, 1))
        elif op == OP_LINE:
            px, py = col(a1, 0), col(a1, 1)
            qx, qy = col(a2, 0), col(a2, 1)
            la = py - qy
            lb = qx - px
            bad |= la * la + lb * lb < tol
            slots[:, out, 0] = la
            slots[:, out, 1] = lb
            slots[:, out, 2] = px * qy - qx * py
        elif op == OP_FOOT:
            px, py = col(a1, 0), col(a1, 1)
            la, lb, lc = col(a2, 0), col(a2, 1), col(a2, 2)
            den = la * la + lb * lb
            small = den < tol
            bad |= small
            den = np.where(small, 1.0, den)
            t = (la * px + lb * py + lc) / den
            slots[:, out, 0] = px - la * t
            slots[:, out, 1] = py - lb * t
        elif op == OP_INTERSECT_LL:
            l1a, l1b, l1c = col(a1, 0), col(a1, 1), col(a1, 2)
            l2a, l2b, l2c = col(a2, 0), col(a2, 1), col(a2, 2)
            den = l1a * l2b - l2a * l1b
            small = np.abs(den) < tol
            bad |= small
            den = np.where(small, 1.0, den)
            slots[:, out, 0] = (l1b * l2c - l2b * l1c) / den
            slots[:, out, 1] = (l1c * l2a - l2c * l1a) / den
        elif op == OP_CIRCUMCIRCLE:
            ax, ay = col(a1, 0), col(a1, 1)
            bx, by = col(a2, 0), col(a2, 1)
            cx, cy = col(a3, 0), col(a3, 1)
            d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
            small = np.abs(d) < tol
            bad |= small
            d = np.where(small, 1.0, d)
            na = ax * ax + ay * ay
            nb = bx * bx + by * by
            nc = cx * cx + cy * cy
            ux = (na * (by - cy) + nb * (cy - ay) + nc * (ay - by)) / d
            uy = (na * (cx - bx) + nb * (ax - cx) + nc * (bx - ax)) / d
            slots[:, out, 0] = ux
            slots[:, out, 1] = uy
            slots[:, out, 2] = (ax - ux) * (ax - ux) + (ay - uy) * (ay - uy)
        elif op == OP_POINT_ON_CIRCLE:
            cx, cy, r2 = col(a1, 0), col(a1, 1), col(a1, 2)
            r = np.sqrt(np.maximum(r2, 0.0))
            th = free[:, a2]
            slots[:, out, 0] = cx + r * np.cos(th)
            slots[:, out, 1] = cy + r * np.sin(th)
        elif op == OP_POINT_ON_LINE:
            la, lb, lc = col(a1, 0), col(a1, 1), col(a1, 2)
            den = la * la + lb * lb
            small = den < tol
            bad |= small
            den = np.where(small, 1.0, den)
            t = free[:, a2]
            slots[:, out, 0] = -la * lc / den + lb * t
            slots[:, out, 1] = -lb * lc / den - la * t
        elif op == OP_CIRCLE_OT:
            ox, oy = col(a1, 0), col(a1, 1)
            tx, ty = col(a2, 0), col(a2, 1)
            slots[:, out, 0] = ox
            slots[:, out, 1] = oy
            slots[:, out, 2] = (tx - ox) * (tx - ox) + (ty - oy) * (ty - oy)
        elif op == OP_PERP_BISECTOR:
            px, py = col(a1, 0), col(a1, 1)
            qx, qy = col(a2, 0), col(a2, 1)
            la = qx - px
            lb = qy - py
            bad |= la * la + lb * lb < tol
            mx = 0.5 * (px + qx)
            my = 0.5 * (py + qy)
            slots[:, out, 0] = la
            slots[:, out, 1] = lb
            slots[:, out, 2] = -(la * mx + lb * my)
        elif op == OP_PERP_LINE:
            la, lb = col(a1, 0), col(a1, 1)
            px, py = col(a2, 0), col(a2, 1)
            bad |= la * la + lb * lb < tol
            slots[:, out, 0] = lb
            slots[:, out, 1] = -la
            slots[:, out, 2] = -lb * px + la * py
        elif op == OP_PARALLEL_LINE:
            la, lb = col(a1, 0), col(a1, 1)
            px, py = col(a2, 0), col(a2, 1)
            bad |= la * la + lb * lb < tol
            slots[:, out, 0] = la
            slots[:, out, 1] = lb
            slots[:, out, 2] = -la * px - lb * py
        elif op == OP_INTERSECT_LC:
            la, lb, lc = col(a1, 0), col(a1, 1), col(a1, 2)
            cx, cy, r2 = col(a2, 0), col(a2, 1), col(a2, 2)
            den = la * la + lb * lb
            small = den < tol
            bad |= small
            den = np.where(small, 1.0, den)
            t = (la * cx + lb * cy + lc) / den
            fx = cx - la * t
            fy = cy - lb * t
            h2 = r2 - ((fx - cx) * (fx - cx) + (fy - cy) * (fy - cy))
            neg = h2 < 0.0
            bad |= neg
            h2 = np.where(neg, 0.0, h2)
            sgn = 1.0 if a3 >= 0 else -1.0
            s2 = np.sqrt(h2 / den)
            slots[:, out, 0] = fx + sgn * s2 * lb
            slots[:, out, 1] = fy - sgn * s2 * la
        elif op == OP_INTERSECT_CC:
            x1, y1, r1 = col(a1, 0), col(a1, 1), col(a1, 2)
            x2, y2, r2v = col(a2, 0), col(a2, 1), col(a2, 2)
            dx = x2 - x1
            dy = y2 - y1
            d2 = dx * dx + dy * dy
            small = d2 < tol
            bad |= small
            d2 = np.where(small, 1.0, d2)
            a = (d2 + r1 - r2v) / (2.0 * d2)
            bx = x1 + a * dx
            by = y1 + a * dy
            h2 = r1 - a * a * d2
            neg = h2 < 0.0
            bad |= neg
            h2 = np.where(neg, 0.0, h2)
            sgn = 1.0 if a3 >= 0 else -1.0
            s2 = np.sqrt(h2 / d2)
            slots[:, out, 0] = bx + sgn * s2 * (-dy)
            slots[:, out, 1] = by + sgn * s2 * dx

    worst = np.zeros(free.shape[0])
    for k in range(checks.shape[0]):
        pred, p1, p2, p3, p4 = (int(v) for v in checks[k])
        if pred == CK_COLLINEAR:
            t1 = (col(p2, 0) - col(p1, 0)) * (col(p3, 1) - col(p1, 1))
            t2 = (col(p2, 1) - col(p1, 1)) * (col(p3, 0) - col(p1, 0))
            v = t1 - t2
            m = np.abs(t1) + np.abs(t2)
        elif pred == CK_INCIDENT_PL:
            t1 = col(p2, 0) * col(p1, 0)
            t2 = col(p2, 1) * col(p1, 1)
            t3 = col(p2, 2)
            v = t1 + t2 + t3
            m = np.abs(t1) + np.abs(t2) + np.abs(t3)
        elif pred == CK_INCIDENT_PC:
            t1 = (col(p1, 0) - col(p2, 0)) ** 2
            t2 = (col(p1, 1) - col(p2, 1)) ** 2
            t3 = col(p2, 2)
            v = t1 + t2 - t3
            m = t1 + t2 + np.abs(t3)
        elif pred == CK_PARALLEL:
            t1 = col(p1, 0) * col(p2, 1)
            t2 = col(p1, 1) * col(p2, 0)
            v = t1 - t2
            m = np.abs(t1) + np.abs(t2)
        elif pred == CK_PERPENDICULAR:
            t1 = col(p1, 0) * col(p2, 0)
            t2 = col(p1, 1) * col(p2, 1)
            v = t1 + t2
            m = np.abs(t1) + np.abs(t2)
        elif pred == CK_EQDIST:
            t1 = (col(p1, 0) - col(p2, 0)) ** 2 + (col(p1, 1) - col(p2, 1)) ** 2
            t2 = (col(p3, 0) - col(p4, 0)) ** 2 + (col(p3, 1) - col(p4, 1)) ** 2
            v = t1 - t2
            m = t1 + t2
        else:  # CK_EQUALP
            v = (col(p1, 0) - col(p2, 0)) ** 2 + (col(p1, 1) - col(p2, 1)) ** 2
            m = col(p1, 0) ** 2 + col(p1, 1) ** 2 + col(p2, 0) ** 2 + col(p2, 1) ** 2
        worst = np.maximum(worst, np.abs(v) / (1.0 + m))

    degen[:] = bad
    resid[:] = worst


# --- backend selection ------------------------------------------------------

_numba_kernel = None
_backend: str | None = None


def _env_wants_numba() -> bool:
    flag = os.environ.get("GEOBOOK_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


def backend_name() -> str:
    _ensure_backend()
    assert _backend is not None
    return _backend


def _ensure_backend() -> None:
    global _numba_kernel, _backend
    if _backend is not None:
        return
    if _env_wants_numba():
        try:
            from numba import njit

            _numba_kernel = njit(cache=True)(_eval_batch_loops)
            _backend = "numba"
            return
        except ImportError:  # pragma: no cover - numba ships with the package
            warnings.warn(
                "numba unavailable; falling back to the numpy evaluator",
                RuntimeWarning,
            )
    _backend = "numpy"


def eval_batch(
    program: CompiledProgram, free: np.ndarray, force_backend: str | None = None
):
    """Evaluate every instance (row of ``free``) of a compiled program.

    Returns ``(slots, degenerate, residual)`` with shapes
    ``(n, n_slots, 3)``, ``(n,)`` bool, ``(n,)`` float.
    """
    free = np.ascontiguousarray(free, dtype=np.float64)
    if free.ndim != 2 or free.shape[1] != program.n_free_values:
        raise ValueError(
            f"free assignment must have shape (n, {program.n_free_values})"
        )
    n = free.shape[0]
    slots = np.zeros((n, len(program.slot_names), 3), dtype=np.float64)
    degen = np.zeros(n, dtype=np.bool_)
    resid = np.zeros(n, dtype=np.float64)
    backend = force_backend
    if backend is None:
        _ensure_backend()
        backend = _backend
    if backend == "numba":
        _get_numba_kernel()(program.ops, program.checks, free, slots, degen, resid)
    else:
        _eval_batch_numpy(program.ops, program.checks, free, slots, degen, resid)
    return slots, degen, resid


def _get_numba_kernel():
    global _numba_kernel
    if _numba_kernel is None:
        from numba import njit

        _numba_kernel = njit(cache=True)(_eval_batch_loops)
    return _numba_kernel
