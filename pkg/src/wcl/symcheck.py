"""Checks for symmetric weighted algebras on small groups.

A fixture bundles a group, an even weight and an exponent together with a
certificate that ``||f*g||_{p,w} <= ||f||_{p,w} ||g||_{p,w}`` holds with
constant 1.  The certificate comes from ``w^{-q} * w^{-q} <= w^{-q}``: by
Hoelder, ``|f*g|(x) w(x) <= (sum_y |fw|^p(y) |gw|^p(y^{-1}x))^{1/p}``, and
summing over ``x`` gives the bound.  On a finite group the condition is
checked exactly at every point; on the integers it is certified globally
by :meth:`Condition2Z.certified_scale`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import (
    PExponent,
    SparseFunction,
    as_exponent,
    convolve,
    involution,
    pairing,
    random_sparse,
    scale_and_divide,
    weighted_norm,
)
from .errors import ParameterError
from .groups import CyclicGroup, Group, IntGroup, group_from_header
from .reports import FAIL, PASS, VerificationReport
from .scalars import is_exact
from .series import even_poly_sum_enclosure
from .weights import (
    Condition2Z,
    ConstantWeight,
    EvenPolyWeightZ,
    ReciprocalWeight,
    Weight,
    condition2_witness,
    parse_weight,
)

SLACK = 1e-9


class UncertifiedFixtureError(ParameterError):
    pass


@dataclass
class SymmetricAlgebraFixture:
    group: Group
    weight: Weight
    p: PExponent
    certified_unit_norm_bound: bool = False
    certificate: dict = field(default_factory=dict)
    # support window for random test functions on infinite groups
    window: int = 20

    @property
    def q(self):
        return self.p.q

    def require(self):
        if not self.certified_unit_norm_bound:
            raise UncertifiedFixtureError(f"fixture {self.name()} has no unit-norm certificate")

    def name(self) -> str:
        return f"{self.group.header()} weight={self.weight.spec()} p={self.p.p}"

    def describe(self) -> dict:
        """Parameters from which :func:`fixture_from_params` rebuilds the fixture."""
        return {"group": self.group.header(), "weight": self.weight.spec(), "p": self.p.p, "window": self.window}

    def random_function(self, rng, support_size: int, value_law: str = "complex-gaussian") -> SparseFunction:
        if isinstance(self.group, CyclicGroup):
            support_size = min(support_size, self.group.n)
            return random_sparse(self.group, rng, support_size, value_law=value_law)
        support_size = min(support_size, 2 * self.window + 1)
        return random_sparse(self.group, rng, support_size, max_length=self.window, value_law=value_law)


def _is_even(group: Group, w: Weight, rng=None, samples: int = 200) -> bool:
    if isinstance(group, CyclicGroup):
        xs = group.elements()
    else:
        rng = rng or np.random.default_rng(0)
        xs = [group.random_element(rng, 1000) for _ in range(samples)]
    return all(w(x) == w(group.invert(x)) for x in xs)


def cyclic_fixture(n: int, p=2, weight: Weight | None = None) -> SymmetricAlgebraFixture:
    """``Z_n`` with ``ConstantWeight(n^{1/q})`` unless another weight is given.

    Certification sums ``w^{-q} * w^{-q}`` over the whole group at every
    point, so it is exact whenever the weight powers are.
    """
    G = CyclicGroup(n)
    pe = as_exponent(p)
    if weight is None:
        weight = ConstantWeight.root(n, pe.q, G)
    return make_fixture(G, weight, pe)


def int_fixture(p=2, d=2, T: int = 50, N: int = 10_000, window: int = 20) -> SymmetricAlgebraFixture:
    """``Z`` with ``c (1 + |t|^d)`` scaled by the global certified constant."""
    pe = as_exponent(p)
    cz = Condition2Z(d, float(pe.q), T, N)
    c = cz.certified_scale()
    return make_fixture(IntGroup(), EvenPolyWeightZ(c, d), pe, window=window, cache=cz)


def make_fixture(
    group: Group,
    weight: Weight,
    p,
    window: int = 20,
    cache: Condition2Z | None = None,
) -> SymmetricAlgebraFixture:
    """Build a fixture and try to certify it; uncertified fixtures refuse checks."""
    pe = as_exponent(p)
    q = pe.q
    cert: dict = {"even": _is_even(group, weight)}
    ok = False
    if isinstance(group, CyclicGroup):
        reports = [condition2_witness(weight, q, group, x, radius=None) for x in group.elements()]
        worst = max(reports, key=lambda r: r.ratio)
        ok = all(r.verdict == PASS for r in reports)
        cert.update(method="exact-sum", worst_point=worst.params["point"], worst_ratio=worst.ratio)
    elif isinstance(group, IntGroup) and isinstance(weight, EvenPolyWeightZ):
        cz = cache or Condition2Z(weight.d, float(q))
        need = cz.certified_scale()
        ok = float(weight.c) >= need
        cert.update(method="global-scale", required_scale=need, scale=float(weight.c))
    else:
        cert["method"] = "none"
    return SymmetricAlgebraFixture(group, weight, pe, bool(ok and cert["even"]), cert, window)


def fixture_from_params(d: dict) -> SymmetricAlgebraFixture:
    group = group_from_header(d["group"])
    return make_fixture(group, parse_weight(d["weight"], group), d["p"], window=int(d.get("window", 20)))


def _ratio(lhs, rhs):
    if rhs == 0:
        return 0.0 if lhs == 0 else math.inf
    if is_exact(lhs) and is_exact(rhs):
        return Fraction(lhs) / Fraction(rhs)
    return float(lhs) / float(rhs)


def _dump(f: SparseFunction) -> list:
    return [[f.group.format_element(x), v] for x, v in f.items()]


# -- Lemma: ||f*g||_{q,1/w} <= ||f||_{p,w} ||g||_{q,1/w} -------------------------


def _norms_lemma25(fx: SymmetricAlgebraFixture, f, g):
    inv = ReciprocalWeight(fx.weight)
    fg = convolve(f, g)
    lhs = weighted_norm(fg, inv, fx.q)
    rhs = weighted_norm(f, fx.weight, fx.p) * weighted_norm(g, inv, fx.q)
    return fg, lhs, rhs


def duality_pairing(f: SparseFunction, g: SparseFunction, phi: SparseFunction):
    """``(<phi, f*g>, <conj(f)* * phi, g>)``; equal for any three functions."""
    fbar_star = involution(f.map(lambda v: v.conjugate()))
    return pairing(phi, convolve(f, g)), pairing(convolve(fbar_star, phi), g)


def check_lemma25(fx: SymmetricAlgebraFixture, f: SparseFunction, g: SparseFunction, slack=SLACK) -> VerificationReport:
    fx.require()
    t0 = time.perf_counter()
    _, lhs, rhs = _norms_lemma25(fx, f, g)
    ok = lhs <= rhs * (1 + slack)
    return VerificationReport(
        check="lemma25",
        verdict=PASS if ok else FAIL,
        lhs=lhs,
        rhs=rhs,
        ratio=_ratio(lhs, rhs),
        params=fx.describe(),
        witnesses=[] if ok else [{"f": _dump(f), "g": _dump(g)}],
        wall_time=time.perf_counter() - t0,
    )


# -- Theorem: ||f*g||_2 <= ||f||_{p,w} ||g||_2 --------------------------------------


def _gpow(v, e):
    if is_exact(v) and is_exact(e) and Fraction(e).denominator == 1:
        return Fraction(v) ** int(e)
    return float(v) ** float(e)


def factor_pair(g: SparseFunction, w: Weight, p: PExponent):
    """``phi = g^{2/p} / w`` and ``psi = g^{2/q} w`` for nonnegative ``g``."""
    a = Fraction(2) / p.p if p.exact else 2.0 / float(p.p)
    b = 2 - a
    phi = scale_and_divide(g.map(lambda v: _gpow(v, a)), w, "divide")
    psi = scale_and_divide(g.map(lambda v: _gpow(v, b)), w, "multiply")
    return phi, psi


def check_thm26_part1(fx: SymmetricAlgebraFixture, f: SparseFunction, g: SparseFunction, slack=SLACK) -> VerificationReport:
    """Headline inequality plus the two steps of its proof.

    * pointwise ``(|f|*|g|)(s) <= sqrt((|f|*phi)(s) (|f|*psi)(s))``;
    * bookkeeping ``||phi||_{p,w} ||psi||_{q,1/w} = ||g||_2^2``.  Separately
      ``||phi||_{p,w} = ||g||_2^{2/p}`` and ``||psi||_{q,1/w} = ||g||_2^{2/q}``,
      which both equal ``||g||_2`` only when ``p = 2`` or ``||g||_2 = 1``.
    """
    fx.require()
    t0 = time.perf_counter()
    w, pe = fx.weight, fx.p
    lhs = weighted_norm(convolve(f, g), None, 2)
    g2 = weighted_norm(g, None, 2)
    rhs = weighted_norm(f, w, pe) * g2
    headline = lhs <= rhs * (1 + slack)

    fa, ga = f.abs(), g.abs()
    phi, psi = factor_pair(ga, w, pe)
    fg = convolve(fa, ga).entries
    fphi = convolve(fa, phi).entries
    fpsi = convolve(fa, psi).entries
    worst_pt = 0.0
    pointwise = True
    for s, v in fg.items():
        v = float(v)
        bound = math.sqrt(float(fphi.get(s, 0)) * float(fpsi.get(s, 0)))
        if v > bound * (1 + slack):
            pointwise = False
        if bound:
            worst_pt = max(worst_pt, v / bound)
    nphi = weighted_norm(phi, w, pe)
    npsi = weighted_norm(psi, ReciprocalWeight(w), pe.q)
    prod_ok = math.isclose(nphi * npsi, g2 * g2, rel_tol=1e-12, abs_tol=0.0) or g2 == 0
    each_ok = (
        math.isclose(nphi, g2 ** (2 / float(pe.p)), rel_tol=1e-12, abs_tol=1e-300)
        and math.isclose(npsi, g2 ** (2 / float(pe.q)), rel_tol=1e-12, abs_tol=1e-300)
    ) or g2 == 0
    bookkeeping = prod_ok and each_ok
    ok = headline and pointwise and bookkeeping
    failed = [n for n, good in (("headline", headline), ("pointwise", pointwise), ("bookkeeping", bookkeeping)) if not good]
    return VerificationReport(
        check="thm26-part1",
        verdict=PASS if ok else FAIL,
        lhs=lhs,
        rhs=rhs,
        ratio=_ratio(lhs, rhs),
        params=fx.describe(),
        witnesses=[] if ok else [{"failed": failed, "f": _dump(f), "g": _dump(g)}],
        wall_time=time.perf_counter() - t0,
        details={
            "pointwise_max_ratio": worst_pt,
            "norm_phi": nphi,
            "norm_psi": npsi,
            "norm_g_2": g2,
            "headline": headline,
            "pointwise": pointwise,
            "bookkeeping": bookkeeping,
        },
    )


def involution_checks(fx: SymmetricAlgebraFixture, f: SparseFunction, g: SparseFunction) -> dict:
    """``(f*)* = f``, ``(f*g)* = g* * f*`` and ``||f*||_{p,w} = ||f||_{p,w}``."""
    fs = involution(f)
    twice = involution(fs) == f
    anti = involution(convolve(f, g)) == convolve(involution(g), fs)
    a = weighted_norm(fs, fx.weight, fx.p)
    b = weighted_norm(f, fx.weight, fx.p)
    iso = math.isclose(a, b, rel_tol=1e-12, abs_tol=0.0) or a == b
    return {"double": twice, "anti": anti, "isometry": iso, "norm_f": b, "norm_fstar": a}


def symmetric_suite(
    fx: SymmetricAlgebraFixture,
    pairs: int = 500,
    seed=0,
    support_size: int = 8,
    value_law: str = "complex-gaussian",
) -> list[VerificationReport]:
    """Lemma and theorem checks on ``pairs`` seeded random pairs, one report each."""
    fx.require()
    out = []
    for i in range(pairs):
        rng = np.random.default_rng([int(seed), i])
        f = fx.random_function(rng, int(rng.integers(1, support_size + 1)), value_law)
        g = fx.random_function(rng, int(rng.integers(1, support_size + 1)), value_law)
        for r in (check_lemma25(fx, f, g), check_thm26_part1(fx, f, g)):
            r.params.update(trial=i, support_size=support_size, value_law=value_law)
            r.seed = seed
            out.append(r)
    return out


# -- product sets -----------------------------------------------------------------


def _popcount_table(bits: int) -> np.ndarray:
    t = np.zeros(1 << bits, dtype=np.int64)
    for i in range(1, 1 << bits):
        t[i] = t[i >> 1] + (i & 1)
    return t


def product_set_sizes(n: int) -> np.ndarray:
    """``|A + B|`` in ``Z_n`` for every pair of subset masks, shape ``(2^n, 2^n)``.

    Row ``A`` is built from row ``A`` minus its lowest element by OR-ing in
    ``B`` shifted by that element.
    """
    if n > 12:
        raise ParameterError("exhaustive product sets limited to n <= 12")
    size = 1 << n
    full = size - 1
    B = np.arange(size, dtype=np.int64)
    shifted = [((B << a) | (B >> (n - a))) & full if a else B for a in range(n)]
    AB = np.zeros((size, size), dtype=np.int64)
    for A in range(1, size):
        low = (A & -A).bit_length() - 1
        AB[A] = AB[A & (A - 1)] | shifted[low]
    return _popcount_table(n)[AB]


def check_lemma31(
    fx: SymmetricAlgebraFixture,
    mode: str = "exhaustive",
    samples: int = 10_000,
    seed=0,
) -> VerificationReport:
    """``|AB| >= |B| ||I_A||^2_{q,1/w}`` over nonempty subsets of ``Z_n``.

    With ``s_A = sum_A w^{-q}`` the right side is ``|B| s_A^{2/q}``.  When
    ``q = 2`` and the weight powers are rational the comparison is exact.
    """
    fx.require()
    G = fx.group
    if not isinstance(G, CyclicGroup):
        raise ParameterError("check_lemma31 needs a cyclic group")
    t0 = time.perf_counter()
    n = G.n
    q = fx.q
    wq = [fx.weight.pow(x, -q) for x in range(n)]
    exact = q == 2 and all(is_exact(v) for v in wq)
    size = 1 << n
    masks = np.arange(size)
    pop = _popcount_table(n)
    if exact:
        L = math.lcm(*(Fraction(v).denominator for v in wq))
        ints = [int(Fraction(v) * L) for v in wq]
        sA = np.zeros(size, dtype=object)
        for A in range(1, size):
            low = (A & -A).bit_length() - 1
            sA[A] = sA[A & (A - 1)] + ints[low]
        # |AB| * L >= |B| * sum_A (L w^{-2})
        sA = sA.astype(np.int64)
        scale = L
    else:
        vals = [float(v) for v in wq]
        sA = np.zeros(size)
        for A in range(1, size):
            low = (A & -A).bit_length() - 1
            sA[A] = sA[A & (A - 1)] + vals[low]
        sA = sA ** (2.0 / float(q))
        scale = 1
    if mode == "exhaustive":
        ab = product_set_sizes(n)[1:, 1:]
        lhs = ab * scale
        rhs = np.outer(sA[1:], pop[1:])  # row A, column B
        pairs = (size - 1) ** 2
        A_idx, B_idx = np.meshgrid(masks[1:], masks[1:], indexing="ij")
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        A_idx = rng.integers(1, size, samples)
        B_idx = rng.integers(1, size, samples)
        ab = np.array([_product_size(n, a, b) for a, b in zip(A_idx, B_idx)])
        lhs = ab * scale
        rhs = sA[A_idx] * pop[B_idx]
        pairs = samples
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    if exact:
        bad = lhs < rhs
        margin = lhs - rhs
    else:
        bad = lhs < rhs * (1 - 1e-12)
        margin = lhs - rhs
    flat = np.ravel(margin)
    k = int(np.argmin(flat))  # first minimum: lowest pair index
    Aw, Bw = int(np.ravel(A_idx)[k]), int(np.ravel(B_idx)[k])
    nbad = int(np.count_nonzero(bad))
    witness = {
        "A": _mask_elements(Aw, n),
        "B": _mask_elements(Bw, n),
        "|AB|": _product_size(n, Aw, Bw),
        "|B|": int(pop[Bw]),
        "margin": Fraction(int(flat[k]), scale) if exact else float(flat[k]),
    }
    min_lhs = Fraction(int(np.ravel(lhs)[k]), scale) if exact else float(np.ravel(lhs)[k])
    min_rhs = Fraction(int(np.ravel(rhs)[k]), scale) if exact else float(np.ravel(rhs)[k])
    return VerificationReport(
        check="lemma31",
        verdict=FAIL if nbad else PASS,
        lhs=min_lhs,
        rhs=min_rhs,
        ratio=_ratio(min_lhs, min_rhs),
        params={**fx.describe(), "mode": mode, "samples": samples},
        witnesses=[witness],
        trials=pairs,
        seed=seed if mode == "sampled" else None,
        wall_time=time.perf_counter() - t0,
        details={"violations": nbad, "exact": exact},
    )


def _mask_elements(mask: int, n: int) -> list[int]:
    return [i for i in range(n) if mask >> i & 1]


def _product_size(n: int, A: int, B: int) -> int:
    return len({(a + b) % n for a in _mask_elements(A, n) for b in _mask_elements(B, n)})


# -- summability on Z ------------------------------------------------------------


def check_thm32_summability(
    w: Weight,
    q=2,
    enclosure_width: float = 1e-6,
    windows: int = 100,
) -> VerificationReport:
    """Enclose ``sum_{t in Z} w(t)^{-q}`` and check windows ``{-m..m}``.

    When the enclosure lies below 1 every window sum must too; when it does
    not, the window check is reported but carries no expectation.
    """
    t0 = time.perf_counter()
    if isinstance(w, ConstantWeight):
        raise ParameterError("constant weight: w^-q is not summable on Z")
    if not isinstance(w, EvenPolyWeightZ):
        raise ParameterError("summability check needs an EvenPolyWeightZ")
    q = float(q)
    d = float(w.d)
    if not d * q > 1:
        raise ParameterError(f"d*q = {d * q} <= 1: w^-q is not summable")
    enc = even_poly_sum_enclosure(d, q, enclosure_width, scale=w.c)
    t = np.arange(-windows, windows + 1)
    terms = (float(w.c) * (1.0 + np.abs(t).astype(np.float64) ** d)) ** (-q)
    window_sums = [math.fsum(terms[windows - m: windows + m + 1].tolist()) for m in range(windows + 1)]
    normalised = enc.hi <= 1
    windows_ok = all(s <= 1 for s in window_sums) if normalised else None
    ok = enc.width <= enclosure_width and windows_ok is not False
    return VerificationReport(
        check="thm32",
        verdict=PASS if ok else FAIL,
        lhs=enc.lo,
        rhs=enc.hi,
        ratio=enc.width,
        params={"weight": w.spec(), "q": q, "width": enclosure_width, "windows": windows},
        trials=enc.terms,
        wall_time=time.perf_counter() - t0,
        details={
            "enclosure": [enc.lo, enc.hi],
            "terms": enc.terms,
            "total_at_most_one": normalised,
            "windows_ok": windows_ok,
            "max_window_sum": max(window_sums),
        },
    )
