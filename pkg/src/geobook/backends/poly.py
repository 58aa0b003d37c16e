"""Sparse multivariate polynomials over arbitrary-precision integers.

The ring is fixed by a variable count; variable ``i`` is identified by
its index, and the elimination order is the index order (a larger index
is eliminated first).  Terms map exponent tuples to nonzero int
coefficients, so every polynomial is canonical: no zero terms and one
entry per monomial.  Integer content is not removed automatically;
``primitive_part`` does it explicitly.

``pseudo_divmod`` implements the classic pseudo-division: for g, f and
a main variable x with d = deg(f, x) <= deg(g, x),

    init(f)^k * g = q * f + r,   deg(r, x) < d,

with all arithmetic exact.  This identity is the backbone of the
characteristic-set prover and is property-tested directly.
"""

from __future__ import annotations

import math
from math import gcd


def _tofloat(coeff: int) -> float:
    # arbitrary-precision coefficients can exceed the float range
    try:
        return float(coeff)
    except OverflowError:
        return math.inf if coeff > 0 else -math.inf


class Poly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[tuple[int, ...], int] | None = None):
        self.nvars = nvars
        self.terms: dict[tuple[int, ...], int] = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff:
                    self.terms[mono] = coeff

    # --- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, value: int) -> "Poly":
        p = cls(nvars)
        if value:
            p.terms[(0,) * nvars] = value
        return p

    @classmethod
    def var(cls, nvars: int, index: int) -> "Poly":
        mono = [0] * nvars
        mono[index] = 1
        p = cls(nvars)
        p.terms[tuple(mono)] = 1
        return p

    def copy(self) -> "Poly":
        p = Poly(self.nvars)
        p.terms = dict(self.terms)
        return p

    # --- basic queries ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in mono) for mono in self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def variables(self) -> set[int]:
        out: set[int] = set()
        for mono in self.terms:
            for i, e in enumerate(mono):
                if e:
                    out.add(i)
        return out

    def degree_in(self, var: int) -> int:
        if not self.terms:
            return -1
        return max(mono[var] for mono in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(mono) for mono in self.terms)

    def main_variable(self) -> int | None:
        """Highest-index variable that actually occurs."""
        best = None
        for mono in self.terms:
            for i in range(self.nvars - 1, -1, -1):
                if mono[i]:
                    if best is None or i > best:
                        best = i
                    break
        return best

    def __len__(self) -> int:
        return len(self.terms)

    # --- arithmetic -------------------------------------------------------

    def __neg__(self) -> "Poly":
        p = Poly(self.nvars)
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def __add__(self, other: "Poly") -> "Poly":
        res = dict(self.terms)
        for m, c in other.terms.items():
            s = res.get(m, 0) + c
            if s:
                res[m] = s
            else:
                res.pop(m, None)
        p = Poly(self.nvars)
        p.terms = res
        return p

    def __sub__(self, other: "Poly") -> "Poly":
        res = dict(self.terms)
        for m, c in other.terms.items():
            s = res.get(m, 0) - c
            if s:
                res[m] = s
            else:
                res.pop(m, None)
        p = Poly(self.nvars)
        p.terms = res
        return p

    def __mul__(self, other) -> "Poly":
        if isinstance(other, int):
            if other == 0:
                return Poly(self.nvars)
            p = Poly(self.nvars)
            p.terms = {m: c * other for m, c in self.terms.items()}
            return p
        res: dict[tuple[int, ...], int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                s = res.get(mono, 0) + c1 * c2
                if s:
                    res[mono] = s
                else:
                    res.pop(mono, None)
        p = Poly(self.nvars)
        p.terms = res
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift_var(self, var: int, exp: int) -> "Poly":
        """Multiply by var**exp."""
        p = Poly(self.nvars)
        for m, c in self.terms.items():
            mono = list(m)
            mono[var] += exp
            p.terms[tuple(mono)] = c
        return p

    # --- structure w.r.t. a main variable ---------------------------------

    def coefficient(self, var: int, power: int) -> "Poly":
        """Coefficient of var**power, a polynomial in the other variables."""
        p = Poly(self.nvars)
        for m, c in self.terms.items():
            if m[var] == power:
                mono = list(m)
                mono[var] = 0
                p.terms[tuple(mono)] = c
        return p

    def initial(self, var: int) -> "Poly":
        """Leading coefficient in the main variable (the 'initial')."""
        return self.coefficient(var, self.degree_in(var))

    def content(self) -> int:
        g = 0
        for c in self.terms.values():
            g = gcd(g, abs(c))
            if g == 1:
                return 1
        return g or 1

    def primitive_part(self) -> "Poly":
        """Divide out the integer content (sign-normalized leading term)."""
        if not self.terms:
            return self
        g = self.content()
        lead = self.terms[max(self.terms)]
        if lead < 0:
            g = -g
        if g == 1:
            return self
        p = Poly(self.nvars)
        p.terms = {m: c // g for m, c in self.terms.items()}
        return p

    # --- evaluation ---------------------------------------------------------

    def evaluate(self, values) -> float:
        total = 0.0
        for mono, coeff in self.terms.items():
            term = _tofloat(coeff)
            for i, e in enumerate(mono):
                if e:
                    term *= values[i] ** e
            total += term
        return total

    def evaluate_scaled(self, values) -> float:
        """|value| / (1 + sum |term values|): a unit-free residual.

        Close to machine epsilon when the polynomial vanishes at the
        point up to rounding; order 1 when it does not.
        """
        total = 0.0
        magnitude = 0.0
        for mono, coeff in self.terms.items():
            term = _tofloat(coeff)
            for i, e in enumerate(mono):
                if e:
                    term *= values[i] ** e
            total += term
            magnitude += abs(term)
        return abs(total) / (1.0 + magnitude)

    def univariate_coeffs(self, var: int, values) -> list[float]:
        """Numeric coefficients in ``var`` (ascending power) with every
        other variable substituted from ``values``."""
        coeffs = [0.0] * (max(self.degree_in(var), 0) + 1)
        for mono, coeff in self.terms.items():
            term = _tofloat(coeff)
            for i, e in enumerate(mono):
                if e and i != var:
                    term *= values[i] ** e
            coeffs[mono[var]] += term
        return coeffs

    # --- display -------------------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        return sorted(
            self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True
        )

    def pretty(self, names: list[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"v{i}" for i in range(self.nvars)]
        parts = []
        for mono, coeff in self.sorted_terms():
            factors = [
                names[i] if e == 1 else f"{names[i]}^{e}"
                for i, e in enumerate(mono)
                if e
            ]
            if not factors:
                body = str(abs(coeff))
            else:
                mag = abs(coeff)
                body = "*".join(([] if mag == 1 else [str(mag)]) + factors)
            parts.append(("- " if coeff < 0 else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self) -> str:
        return f"Poly({self.pretty()})"


def pseudo_divmod(g: Poly, f: Poly, var: int) -> tuple[Poly, Poly, int]:
    """Pseudo-division of g by f in the main variable ``var``.

    Returns (q, r, k) with ``init(f)^k * g == q*f + r`` exactly and
    ``deg(r, var) < deg(f, var)``.
    """
    d = f.degree_in(var)
    if d < 0:
        raise ZeroDivisionError("pseudo-division by the zero polynomial")
    init = f.initial(var)
    q = Poly.zero(g.nvars)
    r = g
    k = 0
    while not r.is_zero():
        dr = r.degree_in(var)
        if dr < d:
            break
        lc = r.coefficient(var, dr)
        mul = lc.shift_var(var, dr - d)
        q = q * init + mul
        r = r * init - mul * f
        k += 1
    return q, r, k


def prem(g: Poly, f: Poly, var: int) -> Poly:
    """Pseudo-remainder of g by f w.r.t. ``var``."""
    return pseudo_divmod(g, f, var)[1]
