#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Two workloads: the adaptive correlation-integral evaluation (panel batches
dominated by exp/sin in the integrand) and a dense random circuit at
several qubit counts (gate kernels dominated by strided passes over the
amplitude vector).

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from covertqnet.kernels import fallback

try:
    from covertqnet.kernels import _densecore, _quadcore
    COMPILED = {"gk15_panels": _quadcore.gk15_panels,
                "apply_1q": _densecore.apply_1q,
                "apply_diag1q": _densecore.apply_diag1q,
                "apply_cnot": _densecore.apply_cnot,
                "apply_phase_mask": _densecore.apply_phase_mask}
except ImportError:
    COMPILED = None

PURE = {"gk15_panels": fallback.gk15_panels,
        "apply_1q": fallback.apply_1q,
        "apply_diag1q": fallback.apply_diag1q,
        "apply_cnot": fallback.apply_cnot,
        "apply_phase_mask": fallback.apply_phase_mask}

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def time_fn(fn, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_quadrature(impl, n_panels=256, rounds=200):
    a = np.linspace(0.0, 9.0, n_panels + 1)[:-1].copy()
    b = np.linspace(0.0, 9.0, n_panels + 1)[1:].copy()

    def work():
        for _ in range(rounds):
            for which in (0, 1, 2):
                impl["gk15_panels"](which, a, b, 1.0, 12.0)

    return time_fn(work)


def bench_dense(impl, n, rounds=3):
    rng = np.random.default_rng(0)
    v0 = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    v0 = np.ascontiguousarray(v0 / np.linalg.norm(v0))
    gates = []
    for _ in range(60):
        k = int(rng.integers(0, 4))
        q = int(rng.integers(0, n))
        if k == 0:
            gates.append(("1q", q))
        elif k == 1:
            gates.append(("diag", q))
        elif k == 2:
            t = int((q + 1 + rng.integers(0, n - 1)) % n)
            gates.append(("cnot", q, t))
        else:
            t = int((q + 1 + rng.integers(0, n - 1)) % n)
            gates.append(("cz", q, t))

    def work():
        for _ in range(rounds):
            v = v0.copy()
            for g in gates:
                if g[0] == "1q":
                    impl["apply_1q"](v, n, g[1], H[0, 0], H[0, 1], H[1, 0],
                                     H[1, 1])
                elif g[0] == "diag":
                    impl["apply_diag1q"](v, n, g[1], 1.0, 1j)
                elif g[0] == "cnot":
                    impl["apply_cnot"](v, n, g[1], g[2])
                else:
                    mask = (1 << (n - 1 - g[1])) | (1 << (n - 1 - g[2]))
                    impl["apply_phase_mask"](v, n, mask, -1.0)

    return time_fn(work)


def main():
    if COMPILED is None:
        print("compiled kernels unavailable; showing pure timings only")
    rows = []

    t_pure = bench_quadrature(PURE)
    row = ["quadrature 256 panels x 600 calls", f"{t_pure * 1e3:9.2f}"]
    if COMPILED:
        t_comp = bench_quadrature(COMPILED)
        row += [f"{t_comp * 1e3:9.2f}", f"{t_pure / t_comp:6.2f}x"]
    rows.append(row)

    for n in (8, 14, 18, 20):
        t_pure = bench_dense(PURE, n)
        row = [f"dense circuit, {n:2d} qubits x 60 gates x 3",
               f"{t_pure * 1e3:9.2f}"]
        if COMPILED:
            t_comp = bench_dense(COMPILED, n)
            row += [f"{t_comp * 1e3:9.2f}", f"{t_pure / t_comp:6.2f}x"]
        rows.append(row)

    header = ["workload", "pure (ms)"]
    if COMPILED:
        header += ["compiled (ms)", "speedup"]
    widths = [max(len(r[i]) for r in [header] + rows)
              for i in range(len(header))]
    for r in [header] + rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)))


if __name__ == "__main__":
    main()
