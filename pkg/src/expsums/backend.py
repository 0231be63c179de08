"""Hot numeric loops: numba-jitted fast path with a pure-numpy fallback.

The path is fixed once, at import time, from the ``EXPSUMS_BACKEND``
environment variable:

* ``auto`` (default) - use numba when it imports, else numpy;
* ``numba``          - require numba, fail loudly if missing;
* ``numpy``          - force the pure-numpy fallback.

Both paths are deterministic and agree to ~1e-12 relative; the numpy
implementations stay importable (``*_numpy``) so tests and the benchmark in
``benchmarks/bench_backends.py`` can compare them against the jitted ones.
"""

from __future__ import annotations

import os

import numpy as np

#: values of |sin(pi t)| below this are treated as the removable singularity
SINGULARITY_TOL = 1e-12

_CHUNK_ELEMS = 1 << 22  # cap on points*terms per broadcast block in the numpy path

_env = os.environ.get("EXPSUMS_BACKEND", "auto").strip().lower()
if _env not in ("auto", "numba", "numpy"):
    raise RuntimeError(f"EXPSUMS_BACKEND must be auto, numba or numpy, got {_env!r}")

_have_numba = False
if _env != "numpy":
    try:
        from numba import njit

        _have_numba = True
    except ImportError:
        if _env == "numba":
            raise

BACKEND = "numba" if _have_numba else "numpy"


# ---------------------------------------------------------------------------
# pure-numpy implementations


def eval_poly_numpy(freqs, coeffs, ts):
    out = np.zeros(ts.shape[0], np.complex128)
    if freqs.shape[0] == 0:
        return out
    step = max(1, _CHUNK_ELEMS // freqs.shape[0])
    for lo in range(0, ts.shape[0], step):
        block = ts[lo:lo + step]
        phases = np.exp((2j * np.pi) * np.outer(block, freqs.astype(np.float64)))
        out[lo:lo + step] = phases @ coeffs
    return out


def eval_poly_nd_numpy(freqs, coeffs, pts):
    out = np.zeros(pts.shape[0], np.complex128)
    if freqs.shape[0] == 0:
        return out
    step = max(1, _CHUNK_ELEMS // max(1, freqs.shape[0]))
    fT = freqs.astype(np.float64).T
    for lo in range(0, pts.shape[0], step):
        dots = pts[lo:lo + step] @ fT
        out[lo:lo + step] = np.exp((2j * np.pi) * dots) @ coeffs
    return out


def dirichlet_values_numpy(n, ts):
    s = np.sin(np.pi * ts)
    small = np.abs(s) < SINGULARITY_TOL
    safe = np.where(small, 1.0, s)
    vals = np.sin(np.pi * (2 * n + 1) * ts) / safe
    return np.where(small, float(2 * n + 1), vals)


def fejer_values_numpy(n, ts):
    s = np.sin(np.pi * ts)
    small = np.abs(s) < SINGULARITY_TOL
    safe = np.where(small, 1.0, s)
    ratio = np.sin(np.pi * (n + 1) * ts) / safe
    return np.where(small, float(n + 1), ratio * ratio / (n + 1))


def abs_mean_numpy(values):
    if values.size == 0:
        return 0.0
    # np.add.reduce is pairwise on contiguous float arrays, so this is
    # deterministic and accurate enough for the 1e-12 reproducibility contract
    return float(np.mean(np.abs(values)))


# ---------------------------------------------------------------------------
# numba implementations

if _have_numba:

    @njit(cache=True)
    def _eval_poly_numba(freqs, coeffs, ts):
        out = np.empty(ts.shape[0], np.complex128)
        for i in range(ts.shape[0]):
            acc = 0.0 + 0.0j
            t = ts[i]
            for j in range(freqs.shape[0]):
                ang = 2.0 * np.pi * (freqs[j] * t)
                acc += coeffs[j] * complex(np.cos(ang), np.sin(ang))
            out[i] = acc
        return out

    @njit(cache=True)
    def _eval_poly_nd_numba(freqs, coeffs, pts):
        m = pts.shape[0]
        r = pts.shape[1]
        out = np.empty(m, np.complex128)
        for i in range(m):
            acc = 0.0 + 0.0j
            for j in range(freqs.shape[0]):
                dot = 0.0
                for k in range(r):
                    dot += freqs[j, k] * pts[i, k]
                ang = 2.0 * np.pi * dot
                acc += coeffs[j] * complex(np.cos(ang), np.sin(ang))
            out[i] = acc
        return out

    @njit(cache=True)
    def _dirichlet_numba(n, ts):
        out = np.empty(ts.shape[0])
        for i in range(ts.shape[0]):
            s = np.sin(np.pi * ts[i])
            if abs(s) < SINGULARITY_TOL:
                out[i] = 2.0 * n + 1.0
            else:
                out[i] = np.sin(np.pi * (2 * n + 1) * ts[i]) / s
        return out

    @njit(cache=True)
    def _fejer_numba(n, ts):
        out = np.empty(ts.shape[0])
        for i in range(ts.shape[0]):
            s = np.sin(np.pi * ts[i])
            if abs(s) < SINGULARITY_TOL:
                out[i] = n + 1.0
            else:
                ratio = np.sin(np.pi * (n + 1) * ts[i]) / s
                out[i] = ratio * ratio / (n + 1)
        return out

    @njit(cache=True)
    def _abs_mean_numba(values):
        # blocked pairwise reduction, iterative so it stays cache-safe;
        # deterministic for a fixed length
        n = values.shape[0]
        if n == 0:
            return 0.0
        nb = (n + 127) // 128
        partial = np.empty(nb, np.float64)
        for b in range(nb):
            lo = b * 128
            hi = min(lo + 128, n)
            s = 0.0
            for i in range(lo, hi):
                s += abs(values[i])
            partial[b] = s
        m = nb
        while m > 1:
            half = (m + 1) // 2
            for i in range(m // 2):
                partial[i] = partial[2 * i] + partial[2 * i + 1]
            if m % 2 == 1:
                partial[m // 2] = partial[m - 1]
            m = half
        return partial[0] / n


# ---------------------------------------------------------------------------
# public dispatchers (coerce dtypes once, then call the active implementation)


def _as_f64(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def eval_poly(freqs, coeffs, ts):
    """Direct summation sum_j c_j * e(f_j * t) at each t (rank 1)."""
    freqs = np.ascontiguousarray(freqs, dtype=np.int64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    ts = _as_f64(ts)
    if BACKEND == "numba":
        return _eval_poly_numba(freqs, coeffs, ts)
    return eval_poly_numpy(freqs, coeffs, ts)


def eval_poly_nd(freqs, coeffs, pts):
    """Direct summation sum_j c_j * e(f_j . t) at each point t (any rank)."""
    freqs = np.ascontiguousarray(freqs, dtype=np.int64)
    if freqs.ndim != 2:
        raise ValueError("freqs must be a (terms, rank) array")
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    if BACKEND == "numba":
        return _eval_poly_nd_numba(freqs, coeffs, pts)
    return eval_poly_nd_numpy(freqs, coeffs, pts)


def dirichlet_values(n, ts):
    """Closed-form Dirichlet kernel sin(pi(2n+1)t)/sin(pi t) on an array of t."""
    ts = _as_f64(ts)
    if BACKEND == "numba":
        return _dirichlet_numba(np.int64(n), ts)
    return dirichlet_values_numpy(int(n), ts)


def fejer_values(n, ts):
    """Closed-form Fejer kernel on an array of t (nonnegative)."""
    ts = _as_f64(ts)
    if BACKEND == "numba":
        return _fejer_numba(np.int64(n), ts)
    return fejer_values_numpy(int(n), ts)


def abs_mean(values):
    """Mean of |values| with a deterministic pairwise reduction."""
    values = np.ascontiguousarray(values)
    if values.dtype != np.complex128:
        values = values.astype(np.complex128)
    if BACKEND == "numba":
        return float(_abs_mean_numba(values.ravel()))
    return abs_mean_numpy(values.ravel())


def warm_up():
    """Trigger jit compilation of every kernel (no-op on the numpy path)."""
    ts = np.array([0.1, 0.3])
    eval_poly(np.array([1, -2]), np.array([1.0 + 0j, 0.5j]), ts)
    eval_poly_nd(np.array([[1, 0], [0, 2]]), np.array([1.0 + 0j, 1.0 + 0j]),
                 np.array([[0.1, 0.2]]))
    dirichlet_values(3, ts)
    fejer_values(3, ts)
    abs_mean(np.array([1.0 + 1j, -2.0 + 0j]))
