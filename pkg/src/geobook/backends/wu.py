"""Wu's characteristic-set prover.

Hypotheses are triangularized by successive pseudo-division into an
ascending chain (Ritt-Wu), then the conclusion's successive
pseudo-remainder down the chain is computed.  A zero remainder proves
the statement under the nondegeneracy conditions ``initial != 0``
collected from the chain.  A nonzero remainder is not a refutation:
the prover then samples random parameter values, solves the chain
numerically for the dependent variables, keeps instances that satisfy
every hypothesis away from the degenerate locus, and reports
``refutedNumerically`` only when some instance violates the conclusion
beyond the counterexample threshold.

All symbolic arithmetic is exact over arbitrary-precision integers;
floating point appears only in the numeric search.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraicProblem
from .poly import Poly

HYPOTHESIS_TOL = 1e-9  # scaled residual for "satisfied"
NONDEGENERACY_TOL = 1e-6  # scaled magnitude for "safely nonzero"
COUNTEREXAMPLE_TOL = 1e-3  # scaled residual for "violated"

PROVED = "proved"
INCONCLUSIVE = "inconclusive"
REFUTED = "refutedNumerically"


class ProverError(Exception):
    pass


class NotTriangularizable(ProverError):
    pass


class ResourceLimitExceeded(ProverError):
    def __init__(self, message: str, trace: list[dict]):
        self.trace = trace
        super().__init__(message)


@dataclass
class ProverLimits:
    max_reduction_steps: int = 2_000_000
    max_poly_terms: int = 500_000
    numeric_instances: int = 200
    seed: int = 20240801


@dataclass
class TriangularChain:
    """Ascending chain: strictly increasing main variables."""

    polys: list[Poly] = field(default_factory=list)
    main_vars: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.polys)

    def __iter__(self):
        return iter(zip(self.main_vars, self.polys))


@dataclass
class ProofResult:
    status: str
    pseudo_remainders: list[Poly]
    nondegeneracy: list[Poly]
    trace: list[dict] = field(default_factory=list)
    chain: TriangularChain | None = None
    counterexample: dict | None = None
    problem: AlgebraicProblem | None = None

    @property
    def pseudo_remainder(self) -> Poly:
        """The deciding remainder: zero iff every conclusion part reduced
        to the zero polynomial."""
        for r in self.pseudo_remainders:
            if not r.is_zero():
                return r
        return self.pseudo_remainders[0] if self.pseudo_remainders else Poly.zero(1)

    def conditions_pretty(self) -> list[str]:
        names = self.problem.var_names if self.problem else None
        return [p.pretty(names) for p in self.nondegeneracy]


class _Budget:
    def __init__(self, limits: ProverLimits, trace: list[dict]):
        self.limits = limits
        self.trace = trace
        self.steps = 0

    def charge(self, amount: int = 1) -> None:
        self.steps += amount
        if self.steps > self.limits.max_reduction_steps:
            raise ResourceLimitExceeded(
                f"reduction budget of {self.limits.max_reduction_steps} "
                "steps exhausted",
                self.trace,
            )

    def check_size(self, p: Poly) -> Poly:
        if len(p.terms) > self.limits.max_poly_terms:
            raise ResourceLimitExceeded(
                f"intermediate polynomial grew past "
                f"{self.limits.max_poly_terms} terms",
                self.trace,
            )
        return p


def _prem_budgeted(g: Poly, f: Poly, var: int, budget: _Budget) -> Poly:
    d = f.degree_in(var)
    init = f.initial(var)
    r = g
    while not r.is_zero():
        dr = r.degree_in(var)
        if dr < d:
            break
        budget.charge(len(r.terms) + len(f.terms))
        lc = r.coefficient(var, dr)
        r = budget.check_size(r * init - lc.shift_var(var, dr - d) * f)
    return r


def triangularize(
    problem: AlgebraicProblem, limits: ProverLimits | None = None, trace: list[dict] | None = None
) -> TriangularChain:
    """Reduce the hypothesis set to an ascending triangular chain.

    Successively eliminates each dependent variable, highest first:
    among the polynomials involving the variable the one of minimal
    degree (then fewest terms) is kept as the chain element, the others
    are replaced by their pseudo-remainders.
    """
    limits = limits or ProverLimits()
    trace = trace if trace is not None else []
    budget = _Budget(limits, trace)
    pool = [h.primitive_part() for h in problem.hypotheses if not h.is_zero()]
    chain: list[Poly] = []
    chain_vars: list[int] = []
    for var in range(problem.nvars - 1, problem.n_params - 1, -1):
        cand = [p for p in pool if p.degree_in(var) > 0]
        pool = [p for p in pool if p.degree_in(var) <= 0]
        if not cand:
            continue
        while len(cand) > 1:
            cand.sort(key=lambda p: (p.degree_in(var), len(p.terms)))
            pivot = cand[0]
            rest = cand[1:]
            cand = [pivot]
            for g in rest:
                r = _prem_budgeted(g, pivot, var, budget).primitive_part()
                if r.is_zero():
                    continue
                if r.degree_in(var) > 0:
                    cand.append(r)
                else:
                    pool.append(r)
        chain.append(cand[0])
        chain_vars.append(var)
    if pool:
        trace.append(
            {
                "stage": "triangularize",
                "note": f"{len(pool)} relation(s) among parameters remain",
                "polys": [problem.pretty_poly(p) for p in pool],
            }
        )
    chain.reverse()
    chain_vars.reverse()
    trace.append(
        {
            "stage": "chain",
            "size": len(chain),
            "polys": [
                {"main": problem.var_names[v], "poly": problem.pretty_poly(p)}
                for v, p in zip(chain_vars, chain)
            ],
        }
    )
    return TriangularChain(chain, chain_vars)


def _successive_prem(
    g: Poly, chain: TriangularChain, budget: _Budget, trace: list[dict], problem: AlgebraicProblem
) -> Poly:
    r = g
    for var, f in reversed(list(chain)):
        if r.is_zero():
            break
        before = r.degree_in(var)
        if before < f.degree_in(var):
            continue
        r = _prem_budgeted(r, f, var, budget).primitive_part()
        trace.append(
            {
                "stage": "prem",
                "variable": problem.var_names[var],
                "degree_before": before,
                "terms_after": len(r.terms),
            }
        )
    return r


def _collect_initials(chain: TriangularChain) -> list[Poly]:
    seen: set = set()
    out: list[Poly] = []
    for var, f in chain:
        init = f.initial(var).primitive_part()
        if init.is_constant():
            continue
        key = frozenset(init.terms.items())
        if key not in seen:
            seen.add(key)
            out.append(init)
    return out


def wu_prove(
    problem: AlgebraicProblem, limits: ProverLimits | None = None
) -> ProofResult:
    """Decide a polynomial geometry statement with Wu's method.

    ``proved`` iff every conclusion polynomial has zero successive
    pseudo-remainder down the hypothesis chain; otherwise a numeric
    counterexample search distinguishes ``refutedNumerically`` from
    ``inconclusive``.
    """
    limits = limits or ProverLimits()
    trace: list[dict] = [
        {
            "stage": "coords",
            "direction": problem.direction,
            "parameters": problem.var_names[: problem.n_params],
            "dependents": problem.var_names[problem.n_params :],
            "coordinates": {k: list(v) for k, v in problem.coordinates.items()},
            "notes": list(problem.notes),
        }
    ]
    budget = _Budget(limits, trace)
    chain = triangularize(problem, limits, trace)
    remainders = [
        _successive_prem(g, chain, budget, trace, problem)
        for g in problem.conclusions
    ]
    conditions = _collect_initials(chain)
    problem.nondegeneracy = conditions
    trace.append(
        {
            "stage": "remainder",
            "zero": [r.is_zero() for r in remainders],
            "conditions": [problem.pretty_poly(c) for c in conditions],
        }
    )
    if all(r.is_zero() for r in remainders):
        return ProofResult(
            PROVED, remainders, conditions, trace, chain, None, problem
        )
    status, counterexample = _numeric_search(problem, chain, limits, trace)
    return ProofResult(
        status, remainders, conditions, trace, chain, counterexample, problem
    )


def _real_roots(coeffs_ascending: list[float]) -> list[float]:
    """Real roots of a univariate polynomial given ascending coefficients."""
    coeffs = list(coeffs_ascending)
    while coeffs and abs(coeffs[-1]) == 0.0:
        coeffs.pop()
    if len(coeffs) <= 1:
        return []
    if not all(np.isfinite(c) for c in coeffs):
        return []
    lead = max(abs(c) for c in coeffs)
    if lead == 0.0:
        return []
    roots = np.roots(list(reversed([c / lead for c in coeffs])))
    return [
        float(z.real)
        for z in roots
        if abs(z.imag) <= 1e-8 * max(1.0, abs(z.real))
    ]


def _numeric_search(
    problem: AlgebraicProblem,
    chain: TriangularChain,
    limits: ProverLimits,
    trace: list[dict],
) -> tuple[str, dict | None]:
    rng = random.Random(limits.seed)
    n = problem.nvars
    wanted = limits.numeric_instances
    valid = 0
    worst = 0.0
    worst_instance: list[float] | None = None
    for _ in range(wanted * 30):
        if valid >= wanted:
            break
        vals = [0.0] * n
        for j in range(problem.n_params):
            vals[j] = rng.uniform(-4.0, 4.0)
        ok = True
        for var, f in chain:
            roots = _real_roots(f.univariate_coeffs(var, vals))
            if not roots:
                ok = False
                break
            vals[var] = rng.choice(roots)
        if not ok or not all(math.isfinite(v) for v in vals):
            continue
        hyp_residuals = [h.evaluate_scaled(vals) for h in problem.hypotheses]
        if any(not math.isfinite(r) or r > HYPOTHESIS_TOL for r in hyp_residuals):
            continue
        if any(
            c.evaluate_scaled(vals) < NONDEGENERACY_TOL
            for c in problem.nondegeneracy
        ):
            continue
        residual = max(g.evaluate_scaled(vals) for g in problem.conclusions)
        if not math.isfinite(residual):
            continue
        valid += 1
        if residual > worst:
            worst = residual
            worst_instance = list(vals)
    trace.append(
        {
            "stage": "numeric",
            "valid_instances": valid,
            "max_scaled_residual": worst,
        }
    )
    if valid == 0:
        return INCONCLUSIVE, None
    if worst > COUNTEREXAMPLE_TOL:
        assignment = dict(zip(problem.var_names, worst_instance or []))
        return REFUTED, {"assignment": assignment, "scaled_residual": worst}
    return INCONCLUSIVE, None
