"""Finitely supported functions on a discrete group.

A :class:`SparseFunction` maps group elements to scalars.  Float and complex
values take the fast path; ``Fraction``/:class:`~wcl.scalars.QComplex` values
stay exact through convolution, involution and integer-exponent norms.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from . import _freeconv
from .errors import BudgetExceededError, GroupMismatchError, InvalidWeightError, ParameterError
from .groups import CyclicGroup, FreeGroup, Group, IntGroup, _mul, group_from_header
from .scalars import QComplex, abs2, imag_part, is_exact, real_part

DEFAULT_CONV_BUDGET = 10**7


class SparseFunction:
    """Immutable finitely supported function ``group -> scalars``.

    Zero values are never stored.  Results of the vectorised free-group
    convolution keep their entries packed as word codes until ``entries`` is
    first read.
    """

    __slots__ = ("group", "_entries", "_packed")

    def __init__(self, group: Group, entries=None):
        self.group = group
        self._packed = None
        d = {}
        if entries is not None:
            items = entries.items() if isinstance(entries, Mapping) else entries
            for x, v in items:
                x = group.validate(x)
                if v != 0:
                    d[x] = v
        self._entries = d

    @classmethod
    def _wrap(cls, group, entries: dict):
        obj = cls.__new__(cls)
        obj.group = group
        obj._entries = entries
        obj._packed = None
        return obj

    @classmethod
    def _from_codes(cls, group, codec, codes, values):
        obj = cls.__new__(cls)
        obj.group = group
        obj._entries = None
        obj._packed = (codec, codes, values)
        return obj

    @classmethod
    def delta(cls, group, x, value=1):
        return cls(group, {x: value})

    @classmethod
    def indicator(cls, group, elements, value=1):
        return cls(group, {x: value for x in elements})

    @property
    def entries(self) -> dict:
        if self._entries is None:
            codec, codes, values = self._packed
            words = codec.decode_words(codes)
            self._entries = dict(zip(words, values.tolist()))
        return self._entries

    @property
    def support_size(self) -> int:
        if self._entries is None:
            return len(self._packed[1])
        return len(self._entries)

    def __len__(self):
        return self.support_size

    def __getitem__(self, x):
        return self.entries.get(x, 0)

    def __iter__(self):
        return iter(self.entries)

    def items(self) -> list:
        """Entries in canonical element order."""
        key = self.group.sort_key
        return sorted(self.entries.items(), key=lambda kv: key(kv[0]))

    def support(self) -> list:
        return [x for x, _ in self.items()]

    def values(self) -> list:
        return list(self.entries.values())

    @property
    def is_exact(self) -> bool:
        if self._entries is None:
            return False
        return all(is_exact(v) for v in self._entries.values())

    def __eq__(self, other):
        if not isinstance(other, SparseFunction):
            return NotImplemented
        return self.group == other.group and self.entries == other.entries

    __hash__ = None

    def __add__(self, other: "SparseFunction") -> "SparseFunction":
        _same_group(self, other)
        d = dict(self.entries)
        for x, v in other.entries.items():
            d[x] = d.get(x, 0) + v
        return SparseFunction._wrap(self.group, {x: v for x, v in d.items() if v != 0})

    def __neg__(self):
        return self.map(lambda v: -v)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, SparseFunction):
            return NotImplemented
        return self.map(lambda v: v * scalar)

    __rmul__ = __mul__

    def map(self, fn) -> "SparseFunction":
        d = {}
        for x, v in self.entries.items():
            y = fn(v)
            if y != 0:
                d[x] = y
        return SparseFunction._wrap(self.group, d)

    def abs(self) -> "SparseFunction":
        def mod(v):
            if isinstance(v, QComplex):
                return abs(v.re) if v.im == 0 else abs(v)
            return abs(v)

        return self.map(mod)

    def to_float(self) -> "SparseFunction":
        def conv(v):
            if isinstance(v, QComplex):
                return complex(v)
            return complex(v) if isinstance(v, complex) else float(v)

        return self.map(conv)

    def reflect(self) -> "SparseFunction":
        """``x -> f(x^{-1})`` (no conjugation)."""
        inv = self.group.invert
        return SparseFunction._wrap(self.group, {inv(x): v for x, v in self.entries.items()})

    def restrict(self, predicate) -> "SparseFunction":
        return SparseFunction._wrap(
            self.group, {x: v for x, v in self.entries.items() if predicate(x)}
        )

    def total(self):
        return sum(self.entries.values())

    def __repr__(self):
        n = self.support_size
        if n <= 6:
            body = ", ".join(
                f"{self.group.format_element(x)!r}: {v!r}" for x, v in self.items()
            )
            return f"SparseFunction({self.group!r}, {{{body}}})"
        return f"SparseFunction({self.group!r}, <{n} entries>)"


def _same_group(f: SparseFunction, g: SparseFunction):
    if f.group != g.group:
        raise GroupMismatchError(f"{f.group!r} vs {g.group!r}")


@dataclass(frozen=True)
class PExponent:
    """An exponent ``p >= 1`` with its conjugate ``q``.

    Rational ``p`` (ints, Fractions, decimal strings, floats with a small
    denominator) is kept exact so that ``1/p + 1/q == 1`` holds exactly.
    """

    p: object

    def __post_init__(self):
        p = self.p
        if isinstance(p, PExponent):
            p = p.p
        if isinstance(p, str):
            p = Fraction(p)
        elif isinstance(p, float):
            fp = Fraction(p)
            p = fp if fp.denominator <= 1024 else p
        elif isinstance(p, int):
            p = Fraction(p)
        if not p >= 1:
            raise ParameterError(f"exponent p = {p} must be >= 1")
        object.__setattr__(self, "p", p)

    @property
    def exact(self) -> bool:
        return isinstance(self.p, Fraction)

    @property
    def q(self):
        if self.p == 1:
            return math.inf
        return self.p / (self.p - 1)

    def __float__(self):
        return float(self.p)

    def __repr__(self):
        return f"PExponent({self.p})"


def as_exponent(p) -> PExponent:
    return p if isinstance(p, PExponent) else PExponent(p)


def _is_integral(e) -> bool:
    if isinstance(e, (int, Rational)):
        return Fraction(e).denominator == 1
    return float(e).is_integer()


def _weight_value(w, x):
    v = w(x)
    if not v > 0:
        raise InvalidWeightError(f"weight {w!r} is {v!r} at {x!r}")
    return v


# -- convolution -----------------------------------------------------------


def _group_mul(group: Group):
    if isinstance(group, FreeGroup):
        return _mul
    if isinstance(group, CyclicGroup):
        n = group.n
        return lambda x, y: (x + y) % n
    if isinstance(group, IntGroup):
        return lambda x, y: x + y
    return group.multiply


def convolve_direct(f: SparseFunction, g: SparseFunction) -> SparseFunction:
    """Pairwise accumulation over ``supp f x supp g`` in canonical order."""
    _same_group(f, g)
    mul = _group_mul(f.group)
    acc: dict = {}
    gi = g.items()
    for x, a in f.items():
        for y, b in gi:
            z = mul(x, y)
            acc[z] = acc.get(z, 0) + a * b
    return SparseFunction._wrap(f.group, {z: v for z, v in acc.items() if v != 0})


def _float_array(values):
    if all(isinstance(v, float) or (isinstance(v, int) and not isinstance(v, bool)) for v in values):
        return np.array(values, dtype=np.float64)
    if all(isinstance(v, (float, complex, int)) for v in values):
        return np.array(values, dtype=np.complex128)
    return None


def _packed_inputs(f: SparseFunction, codec):
    """(letters, lengths) and value array for ``f`` in canonical order."""
    if f._entries is None:
        fcodec, codes, values = f._packed
        mat, lengths = fcodec.decode(codes)
        return (mat, lengths), values
    items = f.items()
    words = [x for x, _ in items]
    vals = _float_array([v for _, v in items])
    return codec.letters(words), vals


def _max_length(f: SparseFunction) -> int:
    if f._entries is None:
        codec, codes, _ = f._packed
        return int(codec.lengths_of(codes[-1:])[0]) if len(codes) else 0
    return max((len(x) for x in f._entries), default=0)


def _can_vectorise(f: SparseFunction, g: SparseFunction) -> bool:
    if not isinstance(f.group, FreeGroup):
        return False
    for h in (f, g):
        if h._entries is not None and _float_array(list(h._entries.values())) is None:
            return False
    return _freeconv.WordCodec.fits(f.group.rank, _max_length(f) + _max_length(g))


def _convolve_free(f: SparseFunction, g: SparseFunction, jobs: int = 1) -> SparseFunction:
    rank = f.group.rank
    codec = _freeconv.WordCodec(rank, _max_length(f) + _max_length(g))
    fw, fv = _packed_inputs(f, codec)
    gw, gv = _packed_inputs(g, codec)
    codes, _ = _freeconv.pair_products(codec, fw, gw, jobs=jobs)
    uniq, inv = np.unique(codes, return_inverse=True)
    prod = np.multiply.outer(fv, gv).ravel()
    if np.iscomplexobj(prod):
        vals = np.bincount(inv, weights=prod.real, minlength=len(uniq)) + 1j * np.bincount(
            inv, weights=prod.imag, minlength=len(uniq)
        )
    else:
        vals = np.bincount(inv, weights=prod, minlength=len(uniq))
    keep = vals != 0
    return SparseFunction._from_codes(f.group, codec, uniq[keep], vals[keep])


def convolve(
    f: SparseFunction,
    g: SparseFunction,
    *,
    budget: int | None = None,
    jobs: int = 1,
    method: str = "auto",
) -> SparseFunction:
    """``(f * g)(a) = sum_b f(b) g(b^{-1} a)``.

    ``method`` is ``"auto"``, ``"direct"`` or ``"vectorised"``.  Both methods
    sum each output value in the same order, so float results agree bit for
    bit.
    """
    _same_group(f, g)
    budget = DEFAULT_CONV_BUDGET if budget is None else budget
    work = f.support_size * g.support_size
    if work > budget:
        raise BudgetExceededError(f"convolution needs {work} products (budget {budget})")
    if work == 0:
        return SparseFunction._wrap(f.group, {})
    if method == "direct":
        return convolve_direct(f, g)
    if method == "vectorised" or (method == "auto" and work >= 256 and _can_vectorise(f, g)):
        return _convolve_free(f, g, jobs=jobs)
    return convolve_direct(f, g)


# -- pointwise operations ----------------------------------------------------


def _divide(v, d):
    if is_exact(v) and is_exact(d):
        if isinstance(v, QComplex):
            return v / Fraction(d)
        return Fraction(v) / Fraction(d)
    return v / float(d)


def _numeric(v):
    if isinstance(v, QComplex):
        return complex(v)
    if isinstance(v, Rational):
        return float(v)
    return v


def _times(v, m):
    if is_exact(v) and is_exact(m):
        return v * Fraction(m)
    return _numeric(v) * float(m)


def scale_and_divide(f: SparseFunction, w, mode: str = "divide") -> SparseFunction:
    """Pointwise ``f * w`` (``mode="multiply"``) or ``f / w`` (``"divide"``)."""
    if mode not in ("multiply", "divide"):
        raise ValueError(f"unknown mode {mode!r}")
    op = _times if mode == "multiply" else _divide
    out = {}
    for x, v in f.entries.items():
        y = op(v, _weight_value(w, x))
        if y != 0:
            out[x] = y
    return SparseFunction._wrap(f.group, out)


def involution(f: SparseFunction) -> SparseFunction:
    """``f*(t) = conj(f(t^{-1})) * modular(t^{-1})``."""
    g = f.group
    out = {}
    for x, v in f.entries.items():
        # t = x^{-1}, so t^{-1} = x
        out[g.invert(x)] = v.conjugate() * g.modular_function(x)
    return SparseFunction._wrap(g, out)


def conjugate(f: SparseFunction) -> SparseFunction:
    return f.map(lambda v: v.conjugate())


def pairing(a: SparseFunction, b: SparseFunction):
    """Bilinear pairing ``sum_t a(t) b(t)``."""
    _same_group(a, b)
    small, big = (a, b) if a.support_size <= b.support_size else (b, a)
    be = big.entries
    total = 0
    for x, v in small.items():
        if x in be:
            total = total + v * be[x]
    return total


# -- norms -------------------------------------------------------------------


def _exact_pow_term(v, wv, n: int):
    if not (is_exact(v) and is_exact(wv)):
        return None
    if n % 2 == 0:
        mod = abs2(v) ** (n // 2)
    elif isinstance(v, QComplex) and v.im != 0:
        return None
    else:
        mod = abs(Fraction(real_part(v))) ** n
    return mod * Fraction(wv) ** n


def weighted_norm_pow(f: SparseFunction, w, p):
    """``sum_x |f(x) w(x)|^p``; exact for exact values and weight and integer ``p``.

    ``w=None`` means the unweighted norm.
    """
    pe = as_exponent(p)
    P = pe.p
    n = int(P) if pe.exact and P.denominator == 1 else None
    exact_terms, float_terms = [], []
    for x, v in f.entries.items():
        wv = 1 if w is None else _weight_value(w, x)
        t = None if n is None else _exact_pow_term(v, wv, n)
        if t is None:
            float_terms.append((abs(_numeric(v)) * float(wv)) ** float(P))
        else:
            exact_terms.append(t)
    if not float_terms:
        return sum(exact_terms, Fraction(0))
    return math.fsum([float(t) for t in exact_terms] + float_terms)


def weighted_norm(f: SparseFunction, w, p) -> float:
    """``(sum_x |f(x) w(x)|^p)^{1/p}`` as a float."""
    pe = as_exponent(p)
    if pe.p == math.inf:
        return max(
            (abs(_numeric(v)) * float(1 if w is None else _weight_value(w, x)) for x, v in f.entries.items()),
            default=0.0,
        )
    s = weighted_norm_pow(f, w, pe)
    if s == 0:
        return 0.0
    return float(s) ** (1.0 / float(pe.p))


def lp_norm(f: SparseFunction, p) -> float:
    return weighted_norm(f, None, p)


# -- random inputs -----------------------------------------------------------

VALUE_LAWS = ("nonneg-uniform", "complex-gaussian", "rational-small", "rational-nonneg", "rational-complex")


def _draw_value(rng, law):
    if law == "nonneg-uniform":
        return 1.0 - float(rng.random())
    if law == "complex-gaussian":
        return complex(float(rng.normal()), float(rng.normal()))
    if law == "rational-small":
        num = int(rng.integers(1, 10)) * (1 if rng.random() < 0.5 else -1)
        return Fraction(num, int(rng.integers(1, 10)))
    if law == "rational-nonneg":
        return Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 10)))
    if law == "rational-complex":
        re = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
        im = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
        if re == 0 and im == 0:
            re = Fraction(1)
        return QComplex(re, im)
    raise ParameterError(f"unknown value law {law!r}")


def _available(group: Group, max_length: int):
    if isinstance(group, CyclicGroup):
        return group.n
    if isinstance(group, IntGroup):
        return 2 * max_length + 1
    if isinstance(group, FreeGroup):
        return sum(group.sphere_size(n) for n in range(max_length + 1))
    return math.inf


def random_sparse(
    group: Group,
    seed,
    support_size: int,
    max_length: int = 8,
    value_law: str = "nonneg-uniform",
) -> SparseFunction:
    """Deterministic random function with exactly ``support_size`` entries.

    ``seed`` is anything ``numpy.random.default_rng`` accepts, or a Generator.
    Free-group support words are non-backtracking walks of length at most
    ``max_length``; collisions are redrawn.
    """
    if support_size < 0:
        raise ParameterError("support_size must be >= 0")
    if value_law not in VALUE_LAWS:
        raise ParameterError(f"unknown value law {value_law!r}")
    if support_size > _available(group, max_length):
        raise ParameterError(
            f"{support_size} distinct elements requested, {group!r} has "
            f"{_available(group, max_length)} within length {max_length}"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    entries = {}
    while len(entries) < support_size:
        x = group.random_element(rng, max_length)
        if x in entries:
            continue
        entries[x] = _draw_value(rng, value_law)
    return SparseFunction._wrap(group, entries)


# -- text format -------------------------------------------------------------


def _format_scalar(x) -> str:
    if isinstance(x, (int, Fraction)):
        return str(x)
    return repr(float(x))


def _parse_scalar(s: str):
    s = s.strip()
    if any(ch in s for ch in ".eEn") and "/" not in s:
        return float(s)
    return Fraction(s)


def format_function(f: SparseFunction) -> str:
    lines = [f"# {f.group.header()}"]
    for x, v in f.items():
        re, im = real_part(v), imag_part(v)
        if isinstance(v, complex) or (isinstance(v, float)):
            re, im = float(re), float(im)
        lines.append(f"{f.group.format_element(x)}\t{_format_scalar(re)}\t{_format_scalar(im)}")
    return "\n".join(lines) + "\n"


def parse_function(text: str) -> SparseFunction:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError("function file must start with a '# group=...' header")
    group = group_from_header(lines[0])
    entries = {}
    for ln in lines[1:]:
        if ln.startswith("#"):
            continue
        parts = ln.split("\t")
        if len(parts) != 3:
            raise ValueError(f"malformed line {ln!r}")
        x = group.parse_element(parts[0])
        re, im = _parse_scalar(parts[1]), _parse_scalar(parts[2])
        if isinstance(re, Fraction) and isinstance(im, Fraction):
            v = re if im == 0 else QComplex(re, im)
        elif im == 0:
            v = float(re)
        else:
            v = complex(float(re), float(im))
        if v != 0:
            entries[x] = v
    return SparseFunction._wrap(group, entries)


def write_function(f: SparseFunction, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_function(f))


def read_function(path) -> SparseFunction:
    with open(path) as fh:
        return parse_function(fh.read())
