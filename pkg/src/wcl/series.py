"""Certified enclosures of the positive series the verifiers need.

Partial sums are accumulated in interval arithmetic (``mpmath.iv``) so the
rounding error is inside the enclosure; the omitted tail is bracketed by
integral comparison.
"""

from __future__ import annotations

import math
import threading
from contextlib import contextmanager
from dataclasses import dataclass

from mpmath import iv, mpf

from .errors import ParameterError


@dataclass(frozen=True)
class Enclosure:
    lo: float
    hi: float
    terms: int = 0

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def scaled(self, factor: float) -> "Enclosure":
        lo, hi = sorted((self.lo * factor, self.hi * factor))
        return Enclosure(math.nextafter(lo, -math.inf), math.nextafter(hi, math.inf), self.terms)


# mpmath's interval precision is global; hold the lock while it is changed
_IV_LOCK = threading.RLock()


@contextmanager
def _precision(bits: int):
    with _IV_LOCK:
        old = iv.prec
        iv.prec = bits
        try:
            yield
        finally:
            iv.prec = old


def _outward(x) -> tuple[float, float]:
    # interval endpoints -> floats rounded outward
    a, b = x.a.a, x.b.b
    lo, hi = float(a), float(b)
    if mpf(lo) > a:
        lo = math.nextafter(lo, -math.inf)
    if mpf(hi) < b:
        hi = math.nextafter(hi, math.inf)
    return lo, hi


def power_sum_enclosure(s: float, width: float = 1e-9, start: int = 64) -> Enclosure:
    """Enclose ``sum_{m>=1} m^{-s}`` for ``s > 1``.

    With ``f(x) = x^{-s}`` convex and decreasing, the tail after ``M`` lies in
    ``[int_{M+1}^inf f + f(M+1)/2, int_{M+1/2}^inf f]``.  ``M`` doubles until
    the enclosure is narrower than ``width``.
    """
    if not s > 1:
        raise ParameterError(f"sum of m^-{s} diverges")
    with _precision(96):
        S = iv.mpf(s)
        partial = iv.mpf(0)
        done = 0
        M = start
        while True:
            for m in range(done + 1, M + 1):
                partial += iv.mpf(m) ** (-S)
            done = M
            tail_lo = iv.mpf(M + 1) ** (1 - S) / (S - 1) + iv.mpf(M + 1) ** (-S) / 2
            tail_hi = (iv.mpf(M) + iv.mpf(0.5)) ** (1 - S) / (S - 1)
            lo, _ = _outward(partial + tail_lo)
            _, hi = _outward(partial + tail_hi)
            if hi - lo < width or M > 1 << 22:
                return Enclosure(lo, hi, M)
            M *= 2


def theorem1_constant(a: float, width: float = 1e-9) -> Enclosure:
    """Enclosure of ``C_a = sum_{k>=0} (k+1)^{1-a}`` (``pi^2/6`` at ``a = 3``)."""
    if not a > 2:
        raise ParameterError(f"C_a diverges for a = {a} <= 2")
    return power_sum_enclosure(a - 1, width)


def even_poly_sum_enclosure(
    d: float, q: float, width: float = 1e-6, scale=1, N: int | None = None
) -> Enclosure:
    """Enclose ``sum_{t in Z} (scale * (1 + |t|^d))^{-q}``.

    The partial sum runs over ``|t| <= N``; the rest is bounded above by
    ``2 scale^{-q} N^{1-dq} / (dq - 1)`` (majorant ``|x|^{-dq}``) and below
    by zero.  ``N`` is the least value meeting ``width`` unless given.
    """
    dq = d * q
    if not dq > 1:
        raise ParameterError(f"d*q = {dq} <= 1: series diverges")
    with _precision(96):
        c = iv.mpf(scale) if not hasattr(scale, "numerator") else iv.mpf(scale.numerator) / scale.denominator
        cq = c ** (-iv.mpf(q))
        if N is None:
            # tail_bound(N) <= width/2 leaves room for rounding
            N = 1
            while float((2 * cq * iv.mpf(N) ** (1 - iv.mpf(dq)) / (dq - 1)).b) > width / 2:
                N = max(N + 1, int(N * 1.25))
        Q, D = iv.mpf(q), iv.mpf(d)
        partial = iv.mpf(1) ** (-Q)
        for t in range(1, N + 1):
            partial += 2 * (1 + iv.mpf(t) ** D) ** (-Q)
        partial *= cq
        tail = 2 * cq * iv.mpf(N) ** (1 - iv.mpf(dq)) / (dq - 1)
        lo, _ = _outward(partial)
        _, hi = _outward(partial + tail)
    return Enclosure(lo, hi, N)


def tail_bound_even_poly(d: float, q: float, N: int, scale=1.0) -> float:
    """Upper bound of ``sum_{|t|>N} (scale (1+|t|^d))^{-q}``."""
    dq = d * q
    if not dq > 1:
        raise ParameterError(f"d*q = {dq} <= 1: series diverges")
    return math.nextafter(2 * float(scale) ** (-q) * N ** (1 - dq) / (dq - 1), math.inf)
