"""Hot numerical kernels with optional numba acceleration.

The jitted path is the default whenever numba imports cleanly.  Set the
environment variable ``QCONSTEL_DISABLE_NUMBA=1`` before import to force
the pure-numpy implementations (same code, no compilation).  Both paths
are exercised by ``benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import math
import os

import numpy as np


def _numba_disabled() -> bool:
    flag = os.environ.get("QCONSTEL_DISABLE_NUMBA", "")
    return flag.strip().lower() not in ("", "0", "false", "no")


def _jacobi_cycle_impl(a, v, max_sweeps, thresh):
    """Cyclic complex Jacobi sweeps on the Hermitian matrix ``a`` (in place).

    ``v`` accumulates the rotations so that a_in = v @ a_out @ v^H.
    Returns the number of sweeps used, or -1 if the off-diagonal
    Frobenius norm is still above ``thresh`` after ``max_sweeps``.
    """
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                x = a[p, q]
                off += x.real * x.real + x.imag * x.imag
        if math.sqrt(2.0 * off) <= thresh:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                m = abs(apq)
                if m == 0.0:
                    continue
                ph = apq / m
                theta = 0.5 * math.atan2(2.0 * m, a[q, q].real - a[p, p].real)
                c = math.cos(theta)
                s = math.sin(theta)
                # columns p, q of a (right-multiply by the rotation)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * np.conj(ph) * akq
                    a[k, q] = s * ph * akp + c * akq
                # rows p, q (left-multiply by the adjoint rotation)
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * ph * aqk
                    a[q, k] = s * np.conj(ph) * apk + c * aqk
                # accumulate eigenvectors
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * np.conj(ph) * vkq
                    v[k, q] = s * ph * vkp + c * vkq
    off = 0.0
    for p in range(n - 1):
        for q in range(p + 1, n):
            x = a[p, q]
            off += x.real * x.real + x.imag * x.imag
    if math.sqrt(2.0 * off) <= thresh:
        return max_sweeps
    return -1


jacobi_cycle_numpy = _jacobi_cycle_impl

try:
    import numba

    jacobi_cycle_numba = numba.njit(cache=True)(_jacobi_cycle_impl)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable
    jacobi_cycle_numba = None
    HAVE_NUMBA = False

if HAVE_NUMBA and not _numba_disabled():
    jacobi_cycle = jacobi_cycle_numba
    BACKEND = "numba"
else:
    jacobi_cycle = jacobi_cycle_numpy
    BACKEND = "numpy"


def backend_name() -> str:
    """Active kernel backend, ``"numba"`` or ``"numpy"``."""
    return BACKEND
