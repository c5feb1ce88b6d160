"""Benchmark of the geometry kernels: compiled extension vs pure Python.

Run as `vinesim bench` or `python -m vinesim.benchmarks`.
"""

from __future__ import annotations

import math
import time

import numpy as np


def _workload_walls(n_segments: int = 40, seed: int = 7):
    rng = np.random.Generator(np.random.PCG64(seed))
    pts = rng.uniform(-5.0, 5.0, size=(n_segments, 4))
    return [tuple(row) for row in pts]


def _bench(impl, walls_raw, repeats: int) -> dict:
    walls = impl.prepare_walls(walls_raw)
    out = {}

    t0 = time.perf_counter()
    acc = 0.0
    for i in range(repeats):
        acc += impl.clearance(0.1 * (i % 17) - 0.8, 0.05 * (i % 29) - 0.7, walls)
    out["clearance"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    for i in range(repeats // 20):
        impl.raycast(0.0, 0.0, 0.1 * i, math.radians(120.0), 41, 5.0, walls)
    out["raycast41"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    x = y = th = 0.0
    for i in range(repeats):
        x, y, th = impl.step_arc(x, y, th, 0.5, 0.0005)
    out["step_arc"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    for i in range(repeats // 10):
        impl.advance_arc(-2.0, 0.0, 0.0, 0.3, 0.01, walls, 0.0505)
    out["advance_arc"] = time.perf_counter() - t0
    return out


def run_benchmark(repeats: int = 50_000) -> None:
    from .kernels import reference

    impls = [("python", reference)]
    try:
        from .kernels import _fastgeom

        impls.append(("compiled", _fastgeom))
    except ImportError:
        print("compiled kernels not built; benchmarking pure Python only")

    walls_raw = _workload_walls()
    results = {name: _bench(impl, walls_raw, repeats) for name, impl in impls}

    keys = list(next(iter(results.values())).keys())
    print(f"{'kernel':<14}" + "".join(f"{name:>12}" for name, _ in impls) + f"{'speedup':>10}")
    for k in keys:
        row = f"{k:<14}"
        for name, _ in impls:
            row += f"{results[name][k] * 1e3:>10.1f}ms"
        if len(impls) == 2:
            row += f"{results['python'][k] / results['compiled'][k]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    run_benchmark()
