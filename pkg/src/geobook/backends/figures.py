"""Dynamic figure evaluation.

``evaluate`` runs one assignment of the free points and parameters
through a construction sequence and returns the resulting figure:
coordinates for every object, a degeneracy flag, and the scaled
residual of the conclusion checks.  ``evaluate_batch`` feeds many
assignments to the batch kernel at once and is what the numeric
theorem oracle uses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .construct import ConstructionSequence
from .evalkernel import CompiledProgram, compile_program, eval_batch

_PROGRAM_CACHE: dict[int, tuple[ConstructionSequence, CompiledProgram]] = {}


@dataclass
class FigureInstance:
    coordinates: dict[str, tuple[float, ...]]
    degenerate: bool
    conclusion_residual: float
    kinds: dict[str, str] = field(default_factory=dict)

    def point(self, name: str) -> tuple[float, float]:
        x, y, _ = self.coordinates[name]
        return (x, y)

    def to_json(self) -> dict:
        return {
            "coordinates": {
                name: list(self._trim(name)) for name in self.coordinates
            },
            "kinds": self.kinds,
            "degenerate": self.degenerate,
            "conclusionResidual": self.conclusion_residual,
        }

    def _trim(self, name: str) -> tuple[float, ...]:
        kind = self.kinds.get(name, "")
        coords = self.coordinates[name]
        if kind in ("line", "perp_bisector", "perp_line", "parallel_line"):
            return coords  # (a, b, c)
        if kind in ("circumcircle", "circle"):
            return coords  # (cx, cy, r2)
        return coords[:2]  # points


def program_for(seq: ConstructionSequence) -> CompiledProgram:
    cached = _PROGRAM_CACHE.get(id(seq))
    if cached is not None and cached[0] is seq:
        return cached[1]
    program = compile_program(seq)
    _PROGRAM_CACHE[id(seq)] = (seq, program)
    return program


def free_vector(
    program: CompiledProgram, assignment: dict[str, object]
) -> np.ndarray:
    """Pack a name->value assignment into the kernel's free-value layout.

    Free points map to coordinate pairs, scalar parameters to floats.
    Every entry of the layout must be covered.
    """
    vec = np.zeros(program.n_free_values, dtype=np.float64)
    for name, offset, width in program.free_layout:
        if name not in assignment:
            raise KeyError(f"free assignment missing '{name}'")
        value = assignment[name]
        if width == 2:
            x, y = value  # type: ignore[misc]
            vec[offset] = float(x)
            vec[offset + 1] = float(y)
        else:
            vec[offset] = float(value)  # type: ignore[arg-type]
    return vec


def evaluate(
    seq: ConstructionSequence, assignment: dict[str, object]
) -> FigureInstance:
    """Evaluate one free assignment; degeneracy is data, not an error."""
    program = program_for(seq)
    vec = free_vector(program, assignment).reshape(1, -1)
    slots, degen, resid = eval_batch(program, vec)
    coords = {
        name: tuple(float(v) for v in slots[0, i])
        for i, name in enumerate(program.slot_names)
    }
    return FigureInstance(
        coordinates=coords,
        degenerate=bool(degen[0]),
        conclusion_residual=float(resid[0]),
        kinds=dict(program.step_kinds),
    )


def evaluate_batch(
    seq: ConstructionSequence,
    free_matrix: np.ndarray,
    force_backend: str | None = None,
):
    """Kernel-level batch evaluation: rows of ``free_matrix`` follow the
    program's free layout.  Returns ``(slots, degenerate, residual)``."""
    program = program_for(seq)
    return eval_batch(program, free_matrix, force_backend=force_backend)


def random_free_matrix(
    seq: ConstructionSequence,
    n: int,
    rng: np.random.Generator,
    span: float = 4.0,
) -> np.ndarray:
    """Uniform random assignments: coordinates in [-span, span], angle
    and line parameters in [-pi, pi] and [-span, span]."""
    program = program_for(seq)
    out = np.zeros((n, program.n_free_values))
    for name, offset, width in program.free_layout:
        if width == 2:
            out[:, offset] = rng.uniform(-span, span, size=n)
            out[:, offset + 1] = rng.uniform(-span, span, size=n)
        elif name.startswith("theta"):
            out[:, offset] = rng.uniform(-np.pi, np.pi, size=n)
        else:
            out[:, offset] = rng.uniform(-span, span, size=n)
    return out
