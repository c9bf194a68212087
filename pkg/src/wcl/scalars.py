"""Exact scalars for the rational verification path.

Real rationals are plain :class:`fractions.Fraction`.  Complex rationals use
:class:`QComplex`, a minimal Gaussian-rational number that supports the ring
operations, conjugation and the squared modulus.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class QComplex:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, QComplex):
            return other
        if isinstance(other, (int, Rational)):
            return QComplex(other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("QComplex division by zero")
        n = self * o.conjugate()
        return QComplex(n.re / d, n.im / d)

    def __neg__(self):
        return QComplex(-self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, QComplex):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def conjugate(self):
        return QComplex(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __repr__(self):
        return f"QComplex({self.re}, {self.im})"


def is_exact(x) -> bool:
    return isinstance(x, (int, Rational, QComplex)) and not isinstance(x, bool)


def abs2(x):
    """Squared modulus; exact for exact inputs."""
    if isinstance(x, QComplex):
        return x.abs2()
    if isinstance(x, (int, Rational)):
        return Fraction(x) * x
    x = complex(x)
    return x.real * x.real + x.imag * x.imag


def real_part(x):
    if isinstance(x, QComplex):
        return x.re
    if isinstance(x, (int, Rational)):
        return x
    return complex(x).real


def imag_part(x):
    if isinstance(x, QComplex):
        return x.im
    if isinstance(x, (int, Rational)):
        return 0
    return complex(x).imag
