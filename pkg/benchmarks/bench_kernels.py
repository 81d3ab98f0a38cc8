"""Throughput comparison of the pure-numpy and compiled kernel backends.

Times the three hot kernels on synthetic data and one full split-step
evolution, for each available backend. Usage:

    python3 benchmarks/bench_kernels.py [--nx 4096] [--steps 200] [--repeats 5]
"""

import argparse
import math
import time

import numpy as np

from thirrsim import kernels
from thirrsim.dynamics import (
    EvolutionSpec,
    Grid1D,
    MeanFieldCoefficients,
    evolve,
    init_gaussian,
)


def timeit(fn, repeats):
    """Median wall time of fn() over the given number of repeats."""
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return sorted(times)[len(times) // 2]


def bench_nonlinear(backend, nx, steps, rng):
    pu = rng.normal(size=nx) + 1j * rng.normal(size=nx)
    pd = rng.normal(size=nx) + 1j * rng.normal(size=nx)

    def run():
        for _ in range(steps):
            backend.nonlinear_phase(pu, pd, -0.1 - 0.4j, -0.05 + 0.2j,
                                    -0.05 - 0.3j, -0.1 + 0.1j, 1e-3)
    return run


def bench_kspace(backend, nx, steps, rng):
    fu = rng.normal(size=nx) + 1j * rng.normal(size=nx)
    fd = rng.normal(size=nx) + 1j * rng.normal(size=nx)
    # per-mode unitaries so repeated application keeps the norm bounded
    theta = rng.uniform(0.0, math.pi, size=nx)
    pa = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=nx))
    pb = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=nx))
    c, s = np.cos(theta), np.sin(theta)
    mats = (c * pa, s * pb, -s * np.conj(pb), c * np.conj(pa))

    def run():
        for _ in range(steps):
            backend.apply_kspace(fu, fd, *mats)
    return run


def bench_preelim(backend, nx, steps, rng):
    fields = [rng.normal(size=nx) + 1j * rng.normal(size=nx) for _ in range(4)]
    outs = [np.empty(nx, dtype=np.complex128) for _ in range(4)]
    r = np.array([[1.0, 0.5], [0.3, 1.0]])
    ri = np.linalg.inv(r)
    adv = np.zeros((2, 10))
    for s in (0, 1):
        adv[s, :4] = r.ravel()
        adv[s, 4:8] = ri.ravel()
        adv[s, 8:] = (0.4, -0.4)
    loc = (rng.normal(size=(2, 7)) + 1j * rng.normal(size=(2, 7))) * 0.1

    def run():
        for _ in range(steps):
            backend.preelim_rhs(*fields, adv, loc, 1.0 / nx, *outs)
    return run


def bench_evolve(nx, steps):
    g = Grid1D(length=1.0, nx=nx)
    c = MeanFieldCoefficients(m_nr=(2.0, 3.0), eta=(0.3, -0.3), omega0=0.7,
                              chi_same=(0.4, 0.5), chi_cross=0.2, hbar=1.0)
    state = init_gaussian(g, center=(0.45, 0.55), width=0.06)
    spec = EvolutionSpec(dt=1e-5, n_steps=steps, enforce_stability=False)

    def run():
        evolve(state, c, spec)
    return run


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nx", type=int, default=4096,
                        help="grid points per field (default 4096)")
    parser.add_argument("--steps", type=int, default=200,
                        help="kernel calls per timed run (default 200)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed runs per case, median reported (default 5)")
    args = parser.parse_args()

    names = kernels.available_backends()
    print(f"backends: {', '.join(names)} (active: {kernels.BACKEND})")
    print(f"nx = {args.nx}, {args.steps} calls per run, "
          f"median of {args.repeats}\n")

    cases = (("nonlinear_phase", bench_nonlinear),
             ("apply_kspace", bench_kspace),
             ("preelim_rhs", bench_preelim))
    width = max(len(n) for n, _ in cases) + 2
    header = "kernel".ljust(width) + "".join(n.rjust(14) for n in names)
    if len(names) == 2:
        header += "speedup".rjust(10)
    print(header)
    for case_name, factory in cases:
        rng = np.random.default_rng(0)
        results = []
        for name in names:
            backend = kernels.get_backend(name)
            run = factory(backend, args.nx, args.steps, rng)
            run()  # warm up
            results.append(timeit(run, args.repeats))
        row = case_name.ljust(width)
        for t in results:
            per_call = t / args.steps
            row += f"{per_call * 1e6:11.1f} us"
        if len(results) == 2:
            row += f"{results[0] / results[1]:9.2f}x"
        print(row)

    # end-to-end split-step evolution with whatever backend is active
    run = bench_evolve(args.nx, args.steps)
    run()
    t = timeit(run, args.repeats)
    print(f"\nevolve ({kernels.BACKEND}): "
          f"{t / args.steps * 1e6:.1f} us/step at nx = {args.nx}")
    print("set THIRRSIM_PURE=1 to force the pure backend for the evolve row")


if __name__ == "__main__":
    main()
