"""Residue-class filtering, good-modulus selection, and block thinning.

``good_modulus`` walks the ladder q = 4, 16, 64, ... and at each level keeps
the residue class with the most elements, stopping at the first level where
that class has at most 2^j elements.  The stopping rule traps the surviving
class size in the window |I|^(1/3)/8 <= |I(q; s)| <= q^(1/2).

``thinning_transform`` multiplies a block-structured polynomial by a
periodized flat-top kernel.  Under its hypotheses the periodized kernel is
exactly 1 on every surviving frequency and exactly 0 on every other occupied
frequency (the kernel values are rationals, so this is checked exactly), so
the transform equals direct selection of the blocks whose index is congruent
to s mod q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import IntegerSet, TrigPoly
from .errors import HypothesisError, SupportError
from .kernels import flat_top_build


@dataclass(frozen=True)
class ResidueFilter:
    """The congruence class s mod q."""

    q: int
    s: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("modulus q must be positive")
        object.__setattr__(self, "s", int(self.s) % int(self.q))

    def to_json_dict(self) -> dict:
        return {"q": self.q, "s": self.s}


def residue_filter(I: IntegerSet, q: int, s: int) -> IntegerSet:
    """Elements of I congruent to s mod q (possibly empty)."""
    f = ResidueFilter(int(q), int(s))
    return IntegerSet.from_iterable(k for k in I if k % f.q == f.s)


@dataclass(frozen=True)
class GoodModulusResult:
    """Outcome of the 4^j ladder: modulus, residue, and the survivors."""

    q: int
    s: int
    j0: int
    filtered: IntegerSet
    trace: tuple[tuple[int, int, int], ...]  # (q_j, best s_j, class size)
    source_size: int

    @property
    def lower_bound(self) -> float:
        return self.source_size ** (1 / 3) / 8

    @property
    def upper_bound(self) -> float:
        return math.sqrt(self.q)

    @property
    def bounds_ok(self) -> bool:
        return self.lower_bound <= len(self.filtered) <= self.upper_bound

    def to_json_dict(self) -> dict:
        return {"q": self.q, "s": self.s, "j0": self.j0,
                "filtered": self.filtered.to_json_dict(),
                "trace": [list(row) for row in self.trace],
                "source_size": self.source_size,
                "lower_bound": self.lower_bound,
                "upper_bound": self.upper_bound}


def _best_class(elements: np.ndarray, q: int) -> tuple[int, int]:
    """(smallest residue with the largest class, that class size) mod q."""
    residues, counts = np.unique(elements % q, return_counts=True)
    at = int(np.argmax(counts))
    return int(residues[at]), int(counts[at])


def good_modulus(I: IntegerSet) -> GoodModulusResult:
    """Pick q = 4^j0 and s so that |I(q; s)| lands in the certified window.

    For j = 1, 2, ... choose s_j as the smallest residue maximizing the
    class size mod 4^j; stop at the first j with that size at most 2^j.
    Requires |I| >= 8.
    """
    if len(I) < 8:
        raise HypothesisError("|I| >= 8", f"|I| = {len(I)}")
    elements = np.array(I.elements, dtype=np.int64)
    trace: list[tuple[int, int, int]] = []
    j = 0
    while True:
        j += 1
        q = 4 ** j
        s, size = _best_class(elements, q)
        trace.append((q, s, size))
        if size <= 2 ** j:
            filtered = residue_filter(I, q, s)
            return GoodModulusResult(q, s, j, filtered, tuple(trace), len(I))


def _block_index(freq: int, d1: int, d2: int) -> tuple[int, int]:
    # unique k, l with freq = k*d2 + l and |l| <= d1 < d2/2
    k = (freq + d2 // 2) // d2
    l = freq - k * d2
    if abs(l) > d1:
        raise SupportError(
            f"frequency {freq} is not within d1 = {d1} of a multiple of d2 = {d2}")
    return k, l


def block_structure(F: TrigPoly, d1: int, d2: int) -> dict[int, TrigPoly]:
    """Split F = sum_k f_k(t) e(d2*k*t) into its blocks {k: f_k}.

    Each f_k collects the coefficients at frequencies d2*k + l, |l| <= d1,
    re-indexed to l.  Raises SupportError if any frequency fits no block.
    """
    if F.rank != 1:
        raise ValueError("rank-1 polynomials only")
    if not 0 <= 2 * d1 < d2:
        raise ValueError("need 0 <= 2*d1 < d2 for unique block decomposition")
    blocks: dict[int, dict[int, complex]] = {}
    for (f,), c in F.terms.items():
        k, l = _block_index(f, d1, d2)
        blocks.setdefault(k, {})[l] = c
    return {k: TrigPoly(1, terms) for k, terms in sorted(blocks.items())}


def thinning_bound_factor(delta: float) -> float:
    """The guaranteed norm ratio 32*pi*(2 + log(1 + 2/delta))."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return 32 * math.pi * (2 + math.log(1 + 2 / delta))


def thinning_transform(F: TrigPoly, d1: int, d2: int, delta: float,
                       filter: ResidueFilter) -> tuple[TrigPoly, float]:
    """Keep the blocks of F whose index is congruent to s mod q.

    The construction multiplies the (translated) coefficients by the
    qd2-periodized flat-top kernel with M = ceil(delta*d1/2), N = d1, then
    checks exactly that the result equals direct block selection; the two
    agreeing is the content of the thinning identity.  Returns the thinned
    polynomial (at its original frequencies) and the certified factor
    bounding ||thinned||_1 / ||F||_1.
    """
    d1, d2 = int(d1), int(d2)
    q, s = filter.q, filter.s
    if F.rank != 1:
        raise ValueError("rank-1 polynomials only")
    if not (2 + 2 * delta) * d1 + 4 <= d2:
        raise HypothesisError("(2+2*delta)*d1 + 4 <= d2",
                              f"(2+2*delta)*d1 + 4 = {(2 + 2 * delta) * d1 + 4}, "
                              f"d2 = {d2}")
    if q < 4:
        raise HypothesisError("q >= 4", f"q = {q}")
    m = math.ceil(delta * d1 / 2)
    n = d1
    if m < 2:
        raise HypothesisError("M >= 2", f"M = ceil(delta*d1/2) = {m}; "
                              "delta*d1 too small for a flat-top kernel")
    if not m < n:
        raise HypothesisError("M < N", f"M = {m}, N = d1 = {n}")
    period = q * d2
    if period < 2 * n + 4 * m + 1:
        raise HypothesisError("q*d2 >= 2N+4M+1",
                              f"q*d2 = {period}, 2N+4M+1 = {2 * n + 4 * m + 1}")

    occupied = block_structure(F, d1, d2)  # validates the support shape
    kern = flat_top_build(m, n)

    def periodized(freq: int) -> Fraction:
        r = freq % period
        return kern.value(r) + kern.value(r - period)

    shifted = F.shifted(-s * d2)
    kept: dict[int, complex] = {}
    for (f,), c in shifted.terms.items():
        w = periodized(f)
        if w == 1:
            kept[f] = c
        elif w != 0:
            raise RuntimeError(
                f"periodized kernel is {w} at occupied frequency {f}; "
                "the exactness hypotheses should make this impossible")
    by_kernel = TrigPoly(1, kept).shifted(s * d2)

    direct_terms: dict[tuple[int, ...], complex] = {}
    for k, f_k in occupied.items():
        if k % q == s:
            for (l,), c in f_k.terms.items():
                direct_terms[(k * d2 + l,)] = c
    direct = TrigPoly(1, direct_terms)

    if by_kernel.terms != direct.terms:
        raise RuntimeError("periodized kernel selection disagrees with direct "
                           "block selection")
    return direct, thinning_bound_factor(delta)


def brute_force_modulus(I: IntegerSet) -> tuple[int, int]:
    """Independent replay of the ladder by per-element counting.

    Returns (j0, class size at j0); used to cross-check good_modulus.
    """
    from collections import Counter

    j = 0
    while True:
        j += 1
        q = 4 ** j
        counts = Counter(k % q for k in I)
        size = max(counts.values())
        if size <= 2 ** j:
            return j, size
