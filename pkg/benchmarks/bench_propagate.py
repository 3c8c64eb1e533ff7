"""Benchmark: compiled RK4 kernel vs the pure-numpy fallback.

Run:  python3 benchmarks/bench_propagate.py
The same comparison is forced at import time by DEGINDEX_BACKEND=numpy, which
makes the whole package use the fallback.
"""

import time

import numpy as np

from degindex import _kernels, constant_spec
from degindex.fundamental import default_steps, jb_matrices


def timeit(fn, *args, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    print(f"default backend: {_kernels.backend_name()}")
    for n, length in ((1, np.pi), (2, 4.0), (4, 4.0), (8, 2.0)):
        base = rng.standard_normal((n, n))
        spec = constant_spec(np.eye(n) + 0.1 * (base + base.T), -rng.standard_normal((n, n)), length)
        steps = default_steps(length)
        h = length / steps
        jb = jb_matrices(spec, 0.3 + 0.4j, 0.5 * h * np.arange(2 * steps + 1))
        ref = _kernels.rk4_numpy(jb, h)
        rows = [("numpy", timeit(_kernels.rk4_numpy, jb, h))]
        if _kernels.rk4_numba is not None:
            _kernels.rk4_numba(jb, h, np.eye(2 * n, dtype=np.complex128))  # warm up
            out = _kernels.rk4_numba(jb, h, np.eye(2 * n, dtype=np.complex128))
            assert np.allclose(out, ref), "backends disagree"
            rows.append(("numba", timeit(_kernels.rk4_propagate, jb, h)))
        base_t = rows[0][1]
        for name, t in rows:
            print(f"  n={n} steps={steps:5d}  {name:6s} {t * 1e3:8.2f} ms"
                  f"  speedup x{base_t / t:5.1f}")


if __name__ == "__main__":
    main()
