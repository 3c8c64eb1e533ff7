"""Hot numeric kernels: RK4 propagation of the complex matrix ODE.

The numba-compiled kernel is the default; set DEGINDEX_BACKEND=numpy to force
the pure-numpy fallback (same algorithm, Python loop).  Both take the system
matrix JB pre-evaluated at all step endpoints and midpoints:
jb[2*i] = JB(x_i), jb[2*i+1] = JB(x_i + h/2), shape (2*steps+1, 2N, 2N).
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "DEGINDEX_BACKEND"


def rk4_numpy(jb: np.ndarray, h: float, psi0: np.ndarray | None = None) -> np.ndarray:
    steps = (jb.shape[0] - 1) // 2
    dim = jb.shape[1]
    out = np.empty((steps + 1, dim, dim), dtype=np.complex128)
    psi = (np.eye(dim) if psi0 is None else psi0).astype(np.complex128)
    out[0] = psi
    for i in range(steps):
        a0 = jb[2 * i]
        am = jb[2 * i + 1]
        a1 = jb[2 * i + 2]
        k1 = a0 @ psi
        k2 = am @ (psi + (0.5 * h) * k1)
        k3 = am @ (psi + (0.5 * h) * k2)
        k4 = a1 @ (psi + h * k3)
        psi = psi + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        out[i + 1] = psi
    return out


def _build_numba():
    from numba import njit

    @njit(cache=True)
    def rk4(jb, h, psi0):  # pragma: no cover - compiled
        steps = (jb.shape[0] - 1) // 2
        dim = jb.shape[1]
        out = np.empty((steps + 1, dim, dim), dtype=np.complex128)
        psi = psi0.copy()
        out[0] = psi
        for i in range(steps):
            a0 = jb[2 * i]
            am = jb[2 * i + 1]
            a1 = jb[2 * i + 2]
            k1 = a0 @ psi
            k2 = am @ (psi + (0.5 * h) * k1)
            k3 = am @ (psi + (0.5 * h) * k2)
            k4 = a1 @ (psi + h * k3)
            psi = psi + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            out[i + 1] = psi
        return out

    return rk4


rk4_numba = None
if os.environ.get(_ENV_FLAG, "numba").strip().lower() != "numpy":
    try:
        rk4_numba = _build_numba()
    except ImportError:
        rk4_numba = None


def backend_name() -> str:
    return "numba" if rk4_numba is not None else "numpy"


def rk4_propagate(jb: np.ndarray, h: float, psi0: np.ndarray | None = None) -> np.ndarray:
    """Propagate Psi' = JB(x) Psi with classical RK4, returning all samples."""
    jb = np.ascontiguousarray(jb, dtype=np.complex128)
    if psi0 is None:
        psi0 = np.eye(jb.shape[1], dtype=np.complex128)
    psi0 = np.ascontiguousarray(psi0, dtype=np.complex128)
    if rk4_numba is not None:
        return rk4_numba(jb, float(h), psi0)
    return rk4_numpy(jb, float(h), psi0)
