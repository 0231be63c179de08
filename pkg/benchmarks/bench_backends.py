"""Timing comparison between the numpy path and the compiled path.

Runs each hot kernel on identical inputs through both implementations and
prints a table of median wall times.  The compiled column is skipped when
numba is not importable.

    python3 benchmarks/bench_backends.py --size 200000 --repeats 7
"""

import argparse
import statistics
import time
from dataclasses import dataclass

import numpy as np

from expsums import backend
from expsums.core import IntegerSet, indicator_poly
from expsums.quadrature import certified_l1

HAVE_COMPILED = hasattr(backend, "_eval_poly_numba")


@dataclass
class Case:
    name: str
    numpy_fn: object
    compiled_fn: object
    args: tuple


def _median_ms(fn, args, repeats):
    times = []
    fn(*args)  # warm cache / jit
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append((time.perf_counter() - t0) * 1e3)
    return statistics.median(times)


def build_cases(size, seed):
    rng = np.random.default_rng(seed)
    terms = 200
    freqs = rng.integers(-500, 501, size=terms).astype(np.int64)
    coeffs = (rng.standard_normal(terms)
              + 1j * rng.standard_normal(terms)).astype(np.complex128)
    ts = rng.random(size)
    freqs2 = rng.integers(-60, 61, size=(terms, 2)).astype(np.int64)
    pts = rng.random((size // 4, 2))
    values = (rng.standard_normal(size)
              + 1j * rng.standard_normal(size)).astype(np.complex128)

    cases = [
        Case("eval_poly (200 terms)", backend.eval_poly_numpy,
             getattr(backend, "_eval_poly_numba", None),
             (freqs, coeffs, ts)),
        Case("eval_poly_nd rank 2", backend.eval_poly_nd_numpy,
             getattr(backend, "_eval_poly_nd_numba", None),
             (freqs2, coeffs, pts)),
        Case("dirichlet_values n=100",
             lambda n, t: backend.dirichlet_values_numpy(int(n), t),
             getattr(backend, "_dirichlet_numba", None),
             (np.int64(100), ts)),
        Case("fejer_values n=100",
             lambda n, t: backend.fejer_values_numpy(int(n), t),
             getattr(backend, "_fejer_numba", None),
             (np.int64(100), ts)),
        Case("abs_mean", backend.abs_mean_numpy,
             getattr(backend, "_abs_mean_numba", None),
             (values,)),
    ]
    return cases


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=200_000,
                        help="number of sample points per kernel")
    parser.add_argument("--repeats", type=int, default=7,
                        help="timed repetitions, median reported")
    parser.add_argument("--seed", type=int, default=1729)
    args = parser.parse_args(argv)

    print(f"active backend: {backend.BACKEND}"
          f" (compiled path {'available' if HAVE_COMPILED else 'missing'})")
    header = f"{'operation':<26} {'numpy ms':>10} {'compiled ms':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))

    for case in build_cases(args.size, args.seed):
        np_ms = _median_ms(case.numpy_fn, case.args, args.repeats)
        if HAVE_COMPILED and case.compiled_fn is not None:
            nb_ms = _median_ms(case.compiled_fn, case.args, args.repeats)
            ratio = np_ms / nb_ms if nb_ms > 0 else float("inf")
            print(f"{case.name:<26} {np_ms:>10.3f} {nb_ms:>12.3f} "
                  f"{ratio:>7.2f}x")
        else:
            print(f"{case.name:<26} {np_ms:>10.3f} {'-':>12} {'-':>8}")

    # end to end, whichever backend is active
    f = indicator_poly(IntegerSet.from_iterable(range(1, 502)))
    t0 = time.perf_counter()
    enc = certified_l1(f, 0.05)
    dt = (time.perf_counter() - t0) * 1e3
    print(f"\ncertified_l1 interval:501 rel_err=0.05 -> "
          f"[{enc.lo:.6f}, {enc.hi:.6f}] in {dt:.1f} ms")


if __name__ == "__main__":
    main()
