"""Timing comparison of the numba and pure-numpy kernel paths.

Times the cyclic Jacobi Hermitian eigensolver at several sizes under both
backends, then an end-to-end QFI sweep (which calls the solver through
the public API under whichever backend the QCONSTEL_DISABLE_NUMBA flag
selected at import).

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 4,8,16,32,64] [--repeats 20]
"""

import argparse
import time

import numpy as np

from qconstel import _kernels
from qconstel.estimation import qfim, ring_model


def random_hermitian(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (z + z.conj().T)


def time_kernel(kernel, h, repeats):
    thresh = 1e-14 * np.linalg.norm(h)
    best = np.inf
    for _ in range(repeats):
        a = h.copy()
        v = np.eye(h.shape[0], dtype=np.complex128)
        t0 = time.perf_counter()
        sweeps = kernel(a, v, 100, thresh)
        best = min(best, time.perf_counter() - t0)
        assert sweeps >= 0
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="4,8,16,32,64")
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    rng = np.random.default_rng(0)
    print(f"active backend: {_kernels.BACKEND}")
    kernels = [("numpy", _kernels.jacobi_cycle_numpy)]
    if _kernels.HAVE_NUMBA:
        # trigger compilation outside the timed region
        warm = random_hermitian(3, rng)
        _kernels.jacobi_cycle_numba(warm, np.eye(3, dtype=np.complex128), 100, 1e-14)
        kernels.append(("numba", _kernels.jacobi_cycle_numba))

    print(f"\njacobi_eigh kernel, best of {args.repeats} runs")
    header = ["n"] + [name for name, _ in kernels]
    if len(kernels) == 2:
        header.append("speedup")
    print("  ".join(f"{h:>10}" for h in header))
    for n in sizes:
        h = random_hermitian(n, rng)
        times = [time_kernel(k, h, args.repeats) for _, k in kernels]
        row = [f"{n:>10}"] + [f"{t * 1e3:>8.3f}ms" for t in times]
        if len(times) == 2:
            row.append(f"{times[0] / times[1]:>9.1f}x")
        print("  ".join(row))

    print(f"\nend-to-end: qfim of an 8-source ring at 25 radii ({_kernels.BACKEND} backend)")
    model = ring_model(8, 1.0)
    qfim(model, [0.5])  # warm path
    t0 = time.perf_counter()
    for r in np.linspace(0.1, 1.3, 25):
        qfim(model, [r])
    print(f"  {time.perf_counter() - t0:.3f}s")


if __name__ == "__main__":
    main()
