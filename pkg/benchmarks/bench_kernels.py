#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the NumPy fallback.

The layered-earth recursion and its derivative chain dominate runtime in
sensitivity grids, finite-difference Jacobians and inversion loops; this
script times both backends on representative workloads.

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from fdem1d._core import BACKEND, kernels_np

try:
    from fdem1d._core import _kernels as compiled
except ImportError:
    compiled = None

LAM = np.logspace(-6, 5, 301)
OMEGA = 2 * np.pi * 9000.0
MU0 = 4e-7 * np.pi


def model(n_layers: int):
    rng = np.random.default_rng(42)
    sigma = 10.0 ** rng.uniform(-3, 0, n_layers)
    mu = np.full(n_layers, MU0)
    d = np.full(n_layers - 1, 0.1)
    return sigma, mu, d


def bench(fn, *args, repeat: int = 5, loops: int = 20) -> float:
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(loops):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / loops)
    return best


def main():
    print(f"active backend: {BACKEND}")
    backends = [("numpy", kernels_np)]
    if compiled is not None:
        backends.append(("compiled", compiled))
    for n in (3, 50, 150):
        sigma, mu, d = model(n)
        print(f"\n{n}-layer model, {len(LAM)} nodes")
        for label, mod in backends:
            t_r = bench(mod.reflection, LAM, sigma, mu, d, OMEGA)
            t_g = bench(mod.reflection_gradients, LAM, sigma, mu, d, OMEGA)
            print(f"  {label:>9s}: reflection {t_r * 1e3:8.3f} ms   "
                  f"gradients {t_g * 1e3:8.3f} ms")
        if compiled is not None:
            ref = kernels_np.reflection_gradients(LAM, sigma, mu, d, OMEGA)
            got = compiled.reflection_gradients(LAM, sigma, mu, d, OMEGA)
            err = max(np.max(np.abs(a - b)) for a, b in zip(ref, got))
            print(f"  backend agreement: max abs diff {err:.3e}")


if __name__ == "__main__":
    main()
