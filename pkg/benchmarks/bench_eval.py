#!/usr/bin/env python3
"""Benchmark the figure-evaluation kernels: numba @njit vs pure numpy.

The workload is the Simson construction (11 steps + 1 check) evaluated
over growing instance batches - the same loop the numeric theorem
oracle and figure dragging sit on.  The first numba call pays JIT
compilation and is reported separately.

    python benchmarks/bench_eval.py [--sizes 1000,10000,100000] [--repeat 5]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from geobook.backends import figures  # noqa: E402
from geobook.backends.construct import compile_construction  # noqa: E402
from geobook.corpus import SIMSON_SOURCE  # noqa: E402
from geobook.expand import expand, prover_core  # noqa: E402
from geobook.geolang import builtin_registry, parse, typecheck  # noqa: E402


def build_sequence():
    registry = builtin_registry()
    stmt = expand(typecheck(parse(SIMSON_SOURCE), registry), prover_core())
    return compile_construction(stmt)


def time_backend(seq, X, backend, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = figures.evaluate_batch(seq, X, force_backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, result


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="1000,10000,100000")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    seq = build_sequence()
    rng = np.random.default_rng(0)

    warmup = figures.random_free_matrix(seq, 8, rng)
    t0 = time.perf_counter()
    figures.evaluate_batch(seq, warmup, force_backend="numba")
    jit_seconds = time.perf_counter() - t0
    print(f"numba JIT compile + first call: {jit_seconds:.2f}s")
    print()
    header = f"{'instances':>10} {'numba':>12} {'numpy':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        X = figures.random_free_matrix(seq, n, rng)
        t_numba, (s1, d1, r1) = time_backend(seq, X, "numba", args.repeat)
        t_numpy, (s2, d2, r2) = time_backend(seq, X, "numpy", args.repeat)
        assert np.array_equal(d1, d2)
        assert np.allclose(r1, r2, rtol=0, atol=1e-12)
        assert np.allclose(s1, s2, rtol=0, atol=1e-11)
        print(
            f"{n:>10} {t_numba * 1e3:>10.2f}ms {t_numpy * 1e3:>10.2f}ms "
            f"{t_numpy / t_numba:>8.1f}x"
        )
    print()
    print("paths agreed within 1e-11 on every batch")


if __name__ == "__main__":
    main()
