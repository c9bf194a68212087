"""Weights on discrete groups and the two classical algebra conditions.

Submultiplicativity ``w(st) <= w(s) w(t)`` suffices for ``p = 1``; for
``p > 1`` the convolution condition ``w^{-q} * w^{-q} <= w^{-q}`` does.
"""

from __future__ import annotations

import math
import re
import time
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import InvalidWeightError, ParameterError
from .groups import DEFAULT_SPHERE_CAP, CyclicGroup, Group, IntGroup, enumerate_ball
from .reports import FAIL, INCONCLUSIVE, PASS, VIOLATED, VerificationReport
from .scalars import is_exact
from .series import even_poly_sum_enclosure, tail_bound_even_poly


def _num(x):
    """Ints and ``p/q`` stay exact; decimals go through float and stay exact
    only when that float is a dyadic rational with a small denominator, so a
    float written with ``repr`` parses back to the same value."""
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, str) and "/" not in x:
        try:
            return _num(int(x))
        except ValueError:
            x = float(x)
    if isinstance(x, float):
        fx = Fraction(x)
        return fx if fx.denominator <= 1024 else x
    try:
        v = Fraction(str(x))
    except ValueError:
        return float(x)
    return v.numerator if v.denominator == 1 else v


def _integral(e) -> bool:
    if isinstance(e, (int, Rational)):
        return Fraction(e).denominator == 1
    return float(e).is_integer()


def _fmt(x) -> str:
    return str(x)


class Weight:
    """A strictly positive function on a group."""

    group: Group | None = None

    def __call__(self, x):
        raise NotImplementedError

    def pow(self, x, e):
        """``w(x) ** e``, exact when ``w(x)`` is exact and ``e`` integral."""
        v = self(x)
        if is_exact(v) and _integral(e):
            return Fraction(v) ** int(e)
        return float(v) ** float(e)

    def spec(self) -> str:
        raise NotImplementedError

    def is_length_based(self) -> bool:
        return False

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec()}>"


class LengthPolyWeight(Weight):
    """``(|x| + 1)^a``; integer exponents give integer values."""

    def __init__(self, a, group: Group | None = None):
        a = _num(a)
        if not a >= 0:
            raise InvalidWeightError(f"exponent a = {a} must be >= 0")
        self.a = a
        self.group = group

    def at_length(self, n: int):
        if _integral(self.a):
            return (n + 1) ** int(self.a)
        return (n + 1.0) ** float(self.a)

    def __call__(self, x):
        n = len(x) if isinstance(x, tuple) else self.group.word_length(x)
        return self.at_length(n)

    def lengths(self, n: np.ndarray) -> np.ndarray:
        return (np.asarray(n, dtype=np.float64) + 1.0) ** float(self.a)

    def is_length_based(self):
        return True

    def spec(self):
        return f"lenpoly:a={_fmt(self.a)}"


class EvenPolyWeightZ(Weight):
    """``c (1 + |t|^d)`` on the integers."""

    def __init__(self, c=1, d=2):
        c, d = _num(c), _num(d)
        if not c > 0:
            raise InvalidWeightError(f"scale c = {c} must be > 0")
        if not d >= 0:
            raise InvalidWeightError(f"degree d = {d} must be >= 0")
        self.c = c
        self.d = d
        self.group = IntGroup()

    def __call__(self, t):
        if _integral(self.d):
            base = 1 + abs(t) ** int(self.d)
            if is_exact(self.c):
                v = Fraction(self.c) * base
                return v.numerator if v.denominator == 1 else v
            return float(self.c) * base
        return float(self.c) * (1.0 + abs(t) ** float(self.d))

    def with_scale(self, c) -> "EvenPolyWeightZ":
        return EvenPolyWeightZ(c, self.d)

    def spec(self):
        return f"evenpolyZ:c={_fmt(self.c)},d={_fmt(self.d)}"


class ConstantWeight(Weight):
    """Constant ``c``, or ``base^{1/root}`` when built with :meth:`root`.

    The root form keeps ``c^root == base`` exact.
    """

    def __init__(self, c, group: Group | None = None):
        c = _num(c)
        if not c > 0:
            raise InvalidWeightError(f"constant c = {c} must be > 0")
        self.c = c
        self.group = group
        self._root = None

    @classmethod
    def root(cls, base, root, group: Group | None = None) -> "ConstantWeight":
        base, root = _num(base), _num(root)
        w = cls(float(base) ** (1.0 / float(root)), group)
        w._root = (Fraction(base), Fraction(root))
        return w

    def __call__(self, x):
        return self.c

    def pow(self, x, e):
        if self._root is not None and is_exact(_num(e)):
            base, r = self._root
            k = Fraction(_num(e)) / r
            if k.denominator == 1:
                return base ** int(k)
        return super().pow(x, e)

    def spec(self):
        if self._root is not None:
            base, r = self._root
            return f"const:c={_fmt(base)},root={_fmt(r)}"
        return f"const:c={_fmt(self.c)}"


class MaxWeight(Weight):
    def __init__(self, w1: Weight, w2: Weight):
        self.w1, self.w2 = w1, w2
        self.group = w1.group or w2.group

    def __call__(self, x):
        return max(self.w1(x), self.w2(x))

    def spec(self):
        return f"max({self.w1.spec()},{self.w2.spec()})"


class ReflectedWeight(Weight):
    """``x -> w(x^{-1})``."""

    def __init__(self, w: Weight, group: Group | None = None):
        self.w = w
        self.group = group or w.group
        if self.group is None:
            raise ValueError("ReflectedWeight needs a group")

    def __call__(self, x):
        return self.w(self.group.invert(x))

    def pow(self, x, e):
        return self.w.pow(self.group.invert(x), e)

    def spec(self):
        return f"reflect({self.w.spec()})"


class ReciprocalWeight(Weight):
    """``1 / w``; the weight of the dual space."""

    def __init__(self, w: Weight):
        self.w = w
        self.group = w.group

    def __call__(self, x):
        v = self.w(x)
        return 1 / Fraction(v) if is_exact(v) else 1.0 / v

    def pow(self, x, e):
        return self.w.pow(x, -_num(e) if is_exact(_num(e)) else -float(e))

    def spec(self):
        return f"recip({self.w.spec()})"


class TableWeight(Weight):
    """Explicit values on finitely many elements, ``default`` elsewhere."""

    def __init__(self, table: dict, default=1, group: Group | None = None):
        self.table = {k: _num(v) for k, v in table.items()}
        self.default = _num(default)
        self.group = group
        if any(not v > 0 for v in self.table.values()) or not self.default > 0:
            raise InvalidWeightError("table weight values must be > 0")

    def __call__(self, x):
        return self.table.get(x, self.default)

    def spec(self):
        items = ";".join(f"{k}:{v}" for k, v in sorted(self.table.items(), key=repr))
        return f"table:{items};default={self.default}"


def transform_weights(w: Weight, p=None) -> tuple[Weight, Weight, type]:
    """Weights for the involution-related constructions.

    Returns ``(tilde, symmetrized, MaxWeight)``: ``tilde = w o invert`` (the
    modular factor is 1 on discrete groups), ``symmetrized = max(w, tilde)``
    and the general binary max constructor.  ``p`` does not enter because
    the modular factor is identically 1.
    """
    tilde = ReflectedWeight(w)
    return tilde, MaxWeight(w, tilde), MaxWeight


# -- weight spec strings -------------------------------------------------------

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_PARAM = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)=([^,()]+)")


def parse_weight(spec: str, group: Group | None = None) -> Weight:
    """Parse ``lenpoly:a=3``, ``evenpolyZ:c=1,d=2``, ``const:c=2``,
    ``const:c=6,root=2``, ``max(S,S)`` and ``reflect(S)``."""
    w, pos = _parse(spec.strip(), 0, group)
    if pos != len(spec.strip()):
        raise ParameterError(f"trailing text in weight spec {spec!r} at {pos}")
    return w


def _parse(s: str, pos: int, group):
    m = _NAME.match(s, pos)
    if not m:
        raise ParameterError(f"bad weight spec {s!r} at {pos}")
    name = m.group(0)
    pos = m.end()
    if name in ("max", "reflect"):
        if pos >= len(s) or s[pos] != "(":
            raise ParameterError(f"expected '(' after {name} in {s!r}")
        a, pos = _parse(s, pos + 1, group)
        if name == "max":
            if pos >= len(s) or s[pos] != ",":
                raise ParameterError(f"max needs two arguments in {s!r}")
            b, pos = _parse(s, pos + 1, group)
            w = MaxWeight(a, b)
        else:
            w = ReflectedWeight(a, group)
        if pos >= len(s) or s[pos] != ")":
            raise ParameterError(f"expected ')' in {s!r} at {pos}")
        return w, pos + 1
    params = {}
    if pos < len(s) and s[pos] == ":":
        pos += 1
        while True:
            pm = _PARAM.match(s, pos)
            if not pm:
                raise ParameterError(f"bad parameter in {s!r} at {pos}")
            params[pm.group(1)] = pm.group(2).strip()
            pos = pm.end()
            # a comma continues the list only if another key=value follows
            if pos < len(s) and s[pos] == "," and _PARAM.match(s, pos + 1):
                pos += 1
                continue
            break
    try:
        if name == "lenpoly":
            return LengthPolyWeight(params.get("a", 3), group), pos
        if name == "evenpolyZ":
            return EvenPolyWeightZ(params.get("c", 1), params.get("d", 2)), pos
        if name == "const":
            if "root" in params:
                return ConstantWeight.root(params["c"], params["root"], group), pos
            return ConstantWeight(params.get("c", 1), group), pos
    except (KeyError, ValueError) as exc:
        raise ParameterError(f"bad parameters for {name}: {exc}") from None
    raise ParameterError(f"unknown weight kind {name!r}")


# -- condition (1) -----------------------------------------------------------


def check_condition1(
    w: Weight,
    group: Group,
    trials: int = 10_000,
    seed=0,
    max_length: int = 12,
    sampler=None,
    tolerance: float = 1e-12,
) -> VerificationReport:
    """Sample pairs and test ``w(st) <= w(s) w(t)``.

    ``sampler(rng)`` returns one element; the default draws random elements
    of length at most ``max_length``.  Exact values are compared exactly.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    draw = sampler or (lambda r: group.random_element(r, max_length))
    worst = None
    worst_ratio = None
    violation = None
    for _ in range(trials):
        s, t = draw(rng), draw(rng)
        lhs = w(group.multiply(s, t))
        rhs_ = _mul_exact(w(s), w(t))
        ratio = Fraction(lhs) / rhs_ if is_exact(lhs) and is_exact(rhs_) else float(lhs) / float(rhs_)
        if worst_ratio is None or ratio > worst_ratio:
            worst_ratio, worst = ratio, (s, t, lhs, rhs_)
        bad = ratio > 1 if isinstance(ratio, Fraction) else ratio > 1 + tolerance
        if bad and violation is None:
            violation = (s, t, lhs, rhs_)
    s, t, lhs, rhs_ = violation or worst
    witness = {
        "s": group.format_element(s),
        "t": group.format_element(t),
        "w(st)": lhs,
        "w(s)w(t)": rhs_,
    }
    return VerificationReport(
        check="condition1",
        verdict=FAIL if violation else PASS,
        lhs=lhs,
        rhs=rhs_,
        ratio=worst_ratio,
        params={"weight": w.spec(), "group": group.header(), "max_length": max_length},
        witnesses=[witness],
        trials=trials,
        seed=seed,
        wall_time=time.perf_counter() - t0,
    )


def _mul_exact(a, b):
    if is_exact(a) and is_exact(b):
        return Fraction(a) * Fraction(b)
    return float(a) * float(b)


# -- condition (2) -----------------------------------------------------------


def condition2_partial_sum(w: Weight, q, point, group: Group, radius: int | None, cap: int = DEFAULT_SPHERE_CAP):
    """``sum_{|b| <= radius} w(b)^{-q} w(b^{-1} point)^{-q}`` and the term count.

    ``radius=None`` sums over a whole finite group.
    """
    if radius is None:
        if not isinstance(group, CyclicGroup):
            raise ParameterError("radius=None needs a finite group")
        elements = group.elements()
    else:
        elements = enumerate_ball(group, radius, cap)
    neg_q = -q
    total = 0
    count = 0
    for b in elements:
        term = _mul_exact(w.pow(b, neg_q), w.pow(group.multiply(group.invert(b), point), neg_q))
        total = total + term
        count += 1
    return total, count


def condition2_witness(
    w: Weight,
    q,
    group: Group,
    point=None,
    radius: int | None = 1,
    cap: int = DEFAULT_SPHERE_CAP,
    expected: str | None = None,
) -> VerificationReport:
    """Certify a violation of ``w^{-q} * w^{-q} <= w^{-q}`` at ``point``.

    All omitted terms are positive, so a partial sum above ``w(point)^{-q}``
    proves the violation (VIOLATED); otherwise nothing is proved
    (INCONCLUSIVE).  Summing over a whole finite group (``radius=None``)
    decides the inequality at ``point`` exactly: PASS or VIOLATED.
    """
    t0 = time.perf_counter()
    q = _num(q)
    if point is None:
        point = group.identity
    point = group.validate(point)
    S, count = condition2_partial_sum(w, q, point, group, radius, cap)
    target = w.pow(point, -q)
    violated = S > target
    if violated:
        verdict = VIOLATED
    elif radius is None:
        verdict = PASS
    else:
        verdict = INCONCLUSIVE
    ratio = Fraction(S) / Fraction(target) if is_exact(S) and is_exact(target) else float(S) / float(target)
    return VerificationReport(
        check="condition2-witness",
        verdict=verdict,
        lhs=S,
        rhs=target,
        ratio=ratio,
        params={
            "weight": w.spec(),
            "group": group.header(),
            "q": q,
            "point": group.format_element(point),
            "radius": "full" if radius is None else radius,
        },
        witnesses=[
            {
                "point": group.format_element(point),
                "radius": "full" if radius is None else radius,
                "partial_sum": S,
                "terms": count,
                "w(point)^-q": target,
            }
        ],
        wall_time=time.perf_counter() - t0,
        expected=expected or verdict,
    )


class Condition2Z:
    """Certified upper bounds for ``(w^{-q} * w^{-q})(t)`` on the integers.

    ``w = c (1 + |t|^d)``.  Terms with ``|s| <= N`` are summed; the rest is
    bounded by ``c^{-2q} * 2 N^{1-dq} / (dq - 1)`` because
    ``w(t-s)^{-q} <= c^{-q}`` and ``w(s)^{-q} <= c^{-q} |s|^{-dq}``.
    All quantities are computed for ``c = 1`` and rescaled, since ``c`` scales
    the left side by ``c^{-2q}`` and the right side by ``c^{-q}``.
    """

    # relative pad covering float rounding of the partial sums
    ROUNDING_PAD = 1e-12

    def __init__(self, d, q, T: int = 50, N: int = 10_000):
        d, q = float(d), float(q)
        if not d * q > 1:
            raise ParameterError(f"d*q = {d * q} <= 1: w^-q is not summable")
        if N < T:
            raise ParameterError("truncation N must be >= range T")
        self.d, self.q, self.T, self.N = d, q, T, N
        s = np.arange(-N, N + 1, dtype=np.float64)
        inner = (1.0 + np.abs(s) ** d) ** (-q)
        self.tail = tail_bound_even_poly(d, q, N) * 1.0  # w(t-s)^-q <= 1 at c = 1
        ts = np.arange(-T, T + 1)
        self.t = ts
        upper = np.empty(len(ts))
        for i, t in enumerate(ts):
            outer = (1.0 + np.abs(t - s) ** d) ** (-q)
            upper[i] = math.fsum((inner * outer).tolist()) * (1 + self.ROUNDING_PAD) + self.tail
        self.upper = upper
        self.target = (1.0 + np.abs(ts).astype(np.float64) ** d) ** (-q)

    def margins(self, c=1.0) -> np.ndarray:
        """``w(t)^{-q} - U(t)`` for the weight scaled by ``c``."""
        c = float(c)
        return c ** (-self.q) * self.target - c ** (-2 * self.q) * self.upper

    def calibrate(self) -> float:
        """Least ``c`` with nonnegative margin at every tested ``t``."""
        need = np.max(self.upper / self.target)
        c = need ** (1.0 / self.q)
        return math.nextafter(c, math.inf)

    def certified_scale(self, width: float = 1e-9) -> float:
        """A scale valid for every ``t`` in Z, not only ``|t| <= T``.

        For ``d >= 1`` and ``q >= 1``, ``1 + |t|^d <= 2^{d-1}(w(s) + w(t-s))``
        with ``w = 1 + |.|^d``, so ``w(t)^q (w^{-q} * w^{-q})(t) <= 2^{qd} S``
        with ``S = sum_s w(s)^{-q}``; any ``c`` with ``c^q >= 2^{qd} S``
        satisfies the condition everywhere.
        """
        if self.d < 1 or self.q < 1:
            raise ParameterError("global certificate needs d >= 1 and q >= 1")
        S = even_poly_sum_enclosure(self.d, self.q, width)
        need = 2.0 ** (self.q * self.d) * S.hi
        c = need ** (1.0 / self.q)
        return math.nextafter(math.nextafter(c, math.inf), math.inf)


def check_condition2_Z(
    w: EvenPolyWeightZ, q, T: int = 50, N: int = 10_000, cache: Condition2Z | None = None
) -> VerificationReport:
    """Upper-bound ``(w^{-q} * w^{-q})(t)`` for ``|t| <= T`` and compare."""
    t0 = time.perf_counter()
    if not isinstance(w, EvenPolyWeightZ):
        raise ParameterError("check_condition2_Z needs an EvenPolyWeightZ")
    q = float(q)
    if not float(w.d) * q > 1:
        raise ParameterError(f"d*q = {float(w.d) * q} <= 1: w^-q is not summable")
    cz = cache or Condition2Z(w.d, q, T, N)
    margins = cz.margins(w.c)
    worst = int(np.argmin(margins))
    c = float(w.c)
    lhs = c ** (-2 * q) * cz.upper[worst]
    rhs = c ** (-q) * cz.target[worst]
    ok = bool(np.all(margins >= 0))
    return VerificationReport(
        check="condition2-Z",
        verdict=PASS if ok else FAIL,
        lhs=lhs,
        rhs=rhs,
        ratio=lhs / rhs,
        params={"weight": w.spec(), "q": q, "T": T, "N": N},
        witnesses=[{"t": int(cz.t[worst]), "upper": lhs, "w(t)^-q": rhs, "margin": float(margins[worst])}],
        trials=len(cz.t),
        wall_time=time.perf_counter() - t0,
        details={
            "tail_bound": cz.tail * c ** (-2 * q),
            "calibrated_scale": cz.calibrate(),
            "margins": {int(t): float(m) for t, m in zip(cz.t, margins)},
        },
        expected=PASS if ok else FAIL,
    )
