"""Time the compiled kernels against the pure-Python fallback.

Runs the three hot paths (rhs evaluation, batched RK4 stepping, monotone
iteration) on identical inputs through both kernel modules and prints a
small table with the speedup.  Usage:

    python benchmarks/compare_backends.py [--nodes N] [--steps S]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from htpde import _kernels_py

try:
    from htpde import _kernels
except ImportError:
    _kernels = None


def _time(fn, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_rhs(kern, n: int, reps: int) -> float:
    x = np.linspace(0.0, 10.0, n)
    u = 1.0 + 0.3 * np.cos(np.pi * x / 10.0)
    v = 1.0 + 0.2 * np.cos(2.0 * np.pi * x / 10.0)
    a = np.full(n, 1.05)
    d = np.ones(n)
    du = np.empty(n)
    dv = np.empty(n)
    h = x[1] - x[0]

    def run():
        for _ in range(reps):
            kern.rhs1d(u, v, a, d, d, 0.05, 0.0, 1.0, h, du, dv)

    return _time(run)


def bench_step(kern, n: int, steps: int) -> float:
    x = np.linspace(0.0, 10.0, n)
    a = 1.05 + 0.05 * np.cos(np.pi * x / 10.0)
    d = np.ones(n)
    h = x[1] - x[0]
    dt = 0.9 * h * h / 2.0

    def run():
        u = np.full(n, 0.2)
        v = np.full(n, 0.2)
        bad, done = kern.step_many_1d(u, v, a, d, d, 0.05, 0.0, 1.0, h, dt,
                                      steps, 1)
        assert bad < 0 and done == steps

    return _time(run)


def bench_iteration(kern) -> float:
    rec = np.empty((4099, 4))

    def run():
        out = kern.monotone_iterate(1.0, 1.2, 0.3, 0.5, 1.0, 12100.0,
                                    1.21, 0.01, 1.21, 0.01,
                                    1e-10, 10_000_000, 2500, rec)
        assert out[2] == 1  # converged

    return _time(run)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=201)
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--rhs-reps", type=int, default=20_000)
    args = ap.parse_args()

    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.insert(0, ("compiled", _kernels))
    else:
        print("compiled kernels unavailable; timing the fallback only")

    rows = []
    for name, kern in backends:
        rows.append((
            name,
            bench_rhs(kern, args.nodes, args.rhs_reps),
            bench_step(kern, args.nodes, args.steps),
            bench_iteration(kern),
        ))

    print(f"{'backend':<10} {'rhs x' + str(args.rhs_reps):>16} "
          f"{'rk4 x' + str(args.steps):>16} {'iteration':>12}")
    for name, t_rhs, t_step, t_it in rows:
        print(f"{name:<10} {t_rhs:>15.4f}s {t_step:>15.4f}s {t_it:>11.4f}s")
    if len(rows) == 2:
        print(f"{'speedup':<10} {rows[1][1] / rows[0][1]:>15.1f}x "
              f"{rows[1][2] / rows[0][2]:>15.1f}x "
              f"{rows[1][3] / rows[0][3]:>11.1f}x")


if __name__ == "__main__":
    main()
