"""Algebraic proving, construction compilation, and figure evaluation."""

from .algebra import AlgebraicProblem, algebraize
from .construct import (
    ConstructionSequence,
    compile_construction,
    export_script,
)
from .figures import FigureInstance, evaluate, evaluate_batch
from .poly import Poly, prem, pseudo_divmod
from .wu import ProofResult, ProverLimits, TriangularChain, triangularize, wu_prove

__all__ = [
    "AlgebraicProblem",
    "algebraize",
    "ConstructionSequence",
    "compile_construction",
    "export_script",
    "FigureInstance",
    "evaluate",
    "evaluate_batch",
    "Poly",
    "prem",
    "pseudo_divmod",
    "ProofResult",
    "ProverLimits",
    "TriangularChain",
    "triangularize",
    "wu_prove",
]
