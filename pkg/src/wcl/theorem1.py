"""The Banach-algebra bound for ``(|x|+1)^a`` weights on free groups.

For nonnegative ``f, g`` in ``l_p`` put ``h = w (f/w * g/w)``.  The chain
verified here is

* ``h <= 2^a (phi + psi)`` pointwise, where ``phi = (f/w) * g`` and
  ``psi = f * (g/w)``;
* ``phi = sum_{k,j} phi_kj / (k+1)^a`` where ``phi_kj`` collects the
  products ``f(b) g(b^{-1} x)`` with ``|b| = k`` sharing a ``j``-letter prefix
  with ``x``;
* ``||phi_kj||_p <= ||f||_p ||g||_p`` for ``1 < p <= 2``;
* hence ``||h||_p <= 2 * 2^a * C_a * ||f||_p ||g||_p`` with
  ``C_a = sum_k (k+1)^{1-a}``.

``psi`` and its blocks are the same construction applied to the reflected
pair ``(g o inv, f o inv)`` and read off at ``x^{-1}``, which turns prefix
matching into suffix matching.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _freeconv
from .algebra import (
    DEFAULT_CONV_BUDGET,
    PExponent,
    SparseFunction,
    as_exponent,
    convolve,
    lp_norm,
    random_sparse,
    scale_and_divide,
)
from .errors import BudgetExceededError, ParameterError
from .groups import FreeGroup, _mul, common_prefix_length
from .reports import FAIL, PASS, VerificationReport
from .scalars import QComplex, is_exact
from .series import Enclosure, theorem1_constant
from .weights import LengthPolyWeight, Weight

REL_SLACK = 1e-9


@lru_cache(maxsize=None)
def constant_enclosure(a, width: float = 1e-9) -> Enclosure:
    return theorem1_constant(float(a), width)


def doubling_factor(a):
    """``2^a``: the bound on ``w(x)/w(b)`` or ``w(x)/w(b^{-1}x)``."""
    if isinstance(a, int) or (isinstance(a, Fraction) and a.denominator == 1):
        return 2 ** int(a)
    return 2.0 ** float(a)


def _check_inputs(p, a):
    pe = as_exponent(p)
    if not 1 < pe.p <= 2:
        raise ParameterError(f"p = {pe.p} outside (1, 2]")
    if not a > 2:
        raise ParameterError(f"a = {a} must exceed 2")
    return pe


def _nonneg(f: SparseFunction, name: str):
    for v in f.entries.values():
        if isinstance(v, (complex, QComplex)) or v < 0:
            raise ParameterError(f"{name} must be nonnegative (got {v!r})")


# -- SparseFunction-level constructions ----------------------------------------


def build_h(f: SparseFunction, g: SparseFunction, w: Weight, **kw) -> SparseFunction:
    """``h = w * ((f/w) * (g/w))``."""
    inner = convolve(scale_and_divide(f, w, "divide"), scale_and_divide(g, w, "divide"), **kw)
    return scale_and_divide(inner, w, "multiply")


def split_phi_psi(f: SparseFunction, g: SparseFunction, w: Weight, **kw):
    """``phi(x) = sum_b f(b) g(b^{-1}x) / w(b)`` and
    ``psi(x) = sum_b f(b) g(b^{-1}x) / w(b^{-1}x)``."""
    _nonneg(f, "f")
    _nonneg(g, "g")
    phi = convolve(scale_and_divide(f, w, "divide"), g, **kw)
    psi = convolve(f, scale_and_divide(g, w, "divide"), **kw)
    return phi, psi


def psi_by_substitution(f: SparseFunction, g: SparseFunction, w: Weight) -> SparseFunction:
    """``psi(x) = sum_c f(x c^{-1}) g(c) / w(c)`` summed over ``c`` directly."""
    G = f.group
    fe = f.entries
    out: dict = {}
    for c, gc in g.items():
        ci = G.invert(c)
        wc = w(c)
        # x ranges over supp(f) * c
        for xi in f.support():
            x = G.multiply(xi, c)
            term = fe[G.multiply(x, ci)] * gc
            out[x] = out.get(x, 0) + (term / Fraction(wc) if is_exact(term) and is_exact(wc) else term / wc)
    return SparseFunction._wrap(G, {x: v for x, v in out.items() if v != 0})


def _prefix_blocks(f: SparseFunction, g: SparseFunction) -> dict:
    # (|b|, common prefix of b*c with b) -> {x: sum f(b) g(c)}
    blocks: dict = {}
    gi = g.items()
    for b, fb in f.items():
        k = len(b)
        for c, gc in gi:
            x = _mul(b, c)
            j = common_prefix_length(x, b)
            d = blocks.setdefault((k, j), {})
            d[x] = d.get(x, 0) + fb * gc
    G = f.group
    return {
        kj: SparseFunction._wrap(G, {x: v for x, v in d.items() if v != 0})
        for kj, d in sorted(blocks.items())
    }


def phi_blocks(f: SparseFunction, g: SparseFunction) -> dict:
    """``{(k, j): phi_kj}`` for nonnegative ``f``, ``g`` on a free group."""
    return _prefix_blocks(f, g)


def psi_blocks(f: SparseFunction, g: SparseFunction) -> dict:
    """``{(k, j): psi_kj}``: ``|c| = k`` and ``c`` shares a ``j``-letter suffix with ``x``."""
    swapped = _prefix_blocks(g.reflect(), f.reflect())
    return {kj: F.reflect() for kj, F in swapped.items()}


def _block_weight(k: int, a):
    if isinstance(a, int) or (isinstance(a, Fraction) and a.denominator == 1):
        return Fraction(1, (k + 1) ** int(a))
    return (k + 1.0) ** (-float(a))


@dataclass
class DecompositionTrace:
    a: object
    p: PExponent
    h: SparseFunction
    phi: SparseFunction
    psi: SparseFunction
    phi_kj: dict
    psi_kj: dict
    norms: dict
    phi_kj_norms: dict
    psi_kj_norms: dict
    factor: object
    C: Enclosure
    total: float
    reconstruction_exact: bool
    reconstruction_error: float = 0.0
    extra: dict = field(default_factory=dict)

    def max_block_ratio(self) -> float:
        fg = self.norms["f"] * self.norms["g"]
        vals = list(self.phi_kj_norms.values()) + list(self.psi_kj_norms.values())
        return max(vals, default=0.0) / fg if fg else 0.0


def reconstruct(blocks: dict, a) -> SparseFunction | None:
    out = None
    for (k, _j), F in blocks.items():
        term = F * _block_weight(k, a)
        out = term if out is None else out + term
    return out


def phi_kj_family(
    f: SparseFunction, g: SparseFunction, w: LengthPolyWeight, p=2, alpha_set=None
) -> DecompositionTrace:
    """Block decomposition of ``phi`` (and ``psi``) with its norms.

    Exact rational inputs with an integer exponent reconstruct ``phi``
    exactly.  ``alpha_set`` restricts every block to those points.
    """
    _nonneg(f, "f")
    _nonneg(g, "g")
    pe = as_exponent(p)
    a = w.a
    phi, psi = split_phi_psi(f, g, w, method="direct")
    h = build_h(f, g, w, method="direct")
    pb, qb = phi_blocks(f, g), psi_blocks(f, g)
    if alpha_set is not None:
        keep = set(alpha_set)
        pb = {kj: F.restrict(keep.__contains__) for kj, F in pb.items()}
        qb = {kj: F.restrict(keep.__contains__) for kj, F in qb.items()}
    rec_phi, rec_psi = reconstruct(pb, a), reconstruct(qb, a)
    target_phi = phi if alpha_set is None else phi.restrict(set(alpha_set).__contains__)
    target_psi = psi if alpha_set is None else psi.restrict(set(alpha_set).__contains__)
    zero = SparseFunction._wrap(f.group, {})
    rec_phi = rec_phi if rec_phi is not None else zero
    rec_psi = rec_psi if rec_psi is not None else zero
    exact = rec_phi.is_exact and target_phi.is_exact
    diff = (rec_phi - target_phi).to_float()
    diff2 = (rec_psi - target_psi).to_float()
    err = max([abs(v) for v in diff.values() + diff2.values()], default=0.0)
    if exact:
        rec_ok = rec_phi == target_phi and rec_psi == target_psi
    else:
        scale = max([abs(complex(v)) for v in target_phi.values()], default=1.0)
        rec_ok = err <= 1e-12 * max(scale, 1.0)
    C = constant_enclosure(a)
    factor = doubling_factor(a)
    norms = {
        "f": lp_norm(f, pe),
        "g": lp_norm(g, pe),
        "h": lp_norm(h, pe),
        "phi": lp_norm(phi, pe),
        "psi": lp_norm(psi, pe),
    }
    return DecompositionTrace(
        a=a,
        p=pe,
        h=h,
        phi=phi,
        psi=psi,
        phi_kj=pb,
        psi_kj=qb,
        norms=norms,
        # block norms only feed float comparisons
        phi_kj_norms={kj: lp_norm(F.to_float(), pe) for kj, F in pb.items()},
        psi_kj_norms={kj: lp_norm(F.to_float(), pe) for kj, F in qb.items()},
        factor=factor,
        C=C,
        total=2 * float(factor) * C.lo,
        reconstruction_exact=rec_ok if exact else False,
        reconstruction_error=err,
        extra={"reconstruction_ok": rec_ok},
    )


# -- vectorised engine -----------------------------------------------------------


class PairTable:
    """All products ``b * c`` for ``b in supp f``, ``c in supp g`` at once.

    For a product with cancellation length ``m`` the shared prefix of
    ``x = b c`` with ``b`` has length ``|b| - m`` and the shared suffix of
    ``x`` with ``c`` has length ``|c| - m``; both block indices therefore come
    straight from the cancellation lengths.
    """

    def __init__(self, f: SparseFunction, g: SparseFunction, jobs: int = 1, budget: int | None = None):
        if not isinstance(f.group, FreeGroup):
            raise ParameterError("PairTable needs a free group")
        budget = DEFAULT_CONV_BUDGET if budget is None else budget
        if f.support_size * g.support_size > budget:
            raise BudgetExceededError(
                f"{f.support_size} x {g.support_size} products exceed the budget {budget}"
            )
        fi, gi = f.items(), g.items()
        fwords = [x for x, _ in fi]
        gwords = [x for x, _ in gi]
        self.fv = np.array([float(v) for _, v in fi])
        self.gv = np.array([float(v) for _, v in gi])
        if np.any(self.fv < 0) or np.any(self.gv < 0):
            raise ParameterError("PairTable needs nonnegative inputs")
        Lf = max((len(x) for x in fwords), default=0)
        Lg = max((len(x) for x in gwords), default=0)
        codec = _freeconv.WordCodec(f.group.rank, Lf + Lg)
        fw, gw = codec.letters(fwords), codec.letters(gwords)
        codes, cancel = _freeconv.pair_products(codec, fw, gw, jobs=jobs)
        nf, ng = len(fwords), len(gwords)
        self.k = np.repeat(fw[1], ng)
        self.lg = np.tile(gw[1], nf)
        self.cancel = cancel
        self.prod = np.multiply.outer(self.fv, self.gv).ravel()
        self.codes, self.inv = np.unique(codes, return_inverse=True)
        self.inv = self.inv.ravel()
        self.nalpha = len(self.codes)
        self.length = self.k + self.lg - 2 * cancel
        self.maxlen = int(max(Lf, Lg, 0))
        K = self.maxlen + 1
        self.K = K
        self.phi_blocks = self._blocks(self.k, self.k - cancel)
        self.psi_blocks = self._blocks(self.lg, self.lg - cancel)
        self.codec = codec

    def _blocks(self, size, shared):
        K = self.K
        key = (self.inv * K + size) * K + shared
        ukey, binv = np.unique(key, return_inverse=True)
        vals = np.bincount(binv.ravel(), weights=self.prod, minlength=len(ukey))
        block_id = ukey % (K * K)
        return vals, block_id

    def _acc(self, weights):
        return np.bincount(self.inv, weights=weights, minlength=self.nalpha)

    def functions(self, a):
        """``h``, ``phi``, ``psi`` as arrays over the sorted product codes."""
        W = (np.arange(2 * self.K + 1, dtype=np.float64) + 1.0) ** float(a)
        wk, wg, wx = W[self.k], W[self.lg], W[self.length]
        h = self._acc(self.prod * (wx / (wk * wg)))
        phi = self._acc(self.prod / wk)
        psi = self._acc(self.prod / wg)
        return h, phi, psi

    def block_norms(self, which: str, p: float) -> dict:
        vals, block_id = self.phi_blocks if which == "phi" else self.psi_blocks
        K = self.K
        s = np.bincount(block_id, weights=vals**p, minlength=K * K)
        out = {}
        for bid in np.nonzero(s)[0]:
            out[(int(bid) // K, int(bid) % K)] = float(s[bid]) ** (1.0 / p)
        return out

    def reconstruction_error(self, a) -> float:
        """``max |phi - sum_kj phi_kj/(k+1)^a|`` on the float path."""
        _, phi, _ = self.functions(a)
        vals, block_id = self.phi_blocks
        K = self.K
        k = block_id // K
        # block entries are keyed by (alpha, k, j); alpha = key // K^2
        ukey_alpha = self._block_alpha(self.k, self.k - self.cancel)
        rec = np.bincount(ukey_alpha, weights=vals / (k + 1.0) ** float(a), minlength=self.nalpha)
        return float(np.max(np.abs(rec - phi))) if len(phi) else 0.0

    def _block_alpha(self, size, shared):
        K = self.K
        key = (self.inv * K + size) * K + shared
        return np.unique(key) // (K * K)

    def words(self) -> list:
        return self.codec.decode_words(self.codes)


def _pnorm(x: np.ndarray, p: float) -> float:
    if len(x) == 0:
        return 0.0
    return float(np.sum(np.abs(x) ** p)) ** (1.0 / p)


def evaluate_chain(table: PairTable, a, p) -> dict:
    """Every quantity of the inequality chain for one ``(a, p)``."""
    pf = float(as_exponent(p).p)
    factor = float(doubling_factor(a))
    C = constant_enclosure(a)
    h, phi, psi = table.functions(a)
    nf, ng = _pnorm(table.fv, pf), _pnorm(table.gv, pf)
    fg = nf * ng
    nh, nphi, npsi = _pnorm(h, pf), _pnorm(phi, pf), _pnorm(psi, pf)
    denom = phi + psi
    pointwise = float(np.max(h / denom)) if len(h) else 0.0
    pb = table.block_norms("phi", pf)
    qb = table.block_norms("psi", pf)
    a_f = float(a)
    tri_phi = sum(v / (k + 1.0) ** a_f for (k, _), v in pb.items())
    tri_psi = sum(v / (k + 1.0) ** a_f for (k, _), v in qb.items())
    worst_phi = max(pb.items(), key=lambda kv: kv[1], default=((0, 0), 0.0))
    worst_psi = max(qb.items(), key=lambda kv: kv[1], default=((0, 0), 0.0))
    return {
        "norm_f": nf,
        "norm_g": ng,
        "norm_h": nh,
        "norm_phi": nphi,
        "norm_psi": npsi,
        "factor": factor,
        "C_lo": C.lo,
        "C_hi": C.hi,
        "bound": 2 * factor * C.lo * fg,
        "pointwise_ratio": pointwise,
        "phi_block_ratio": worst_phi[1] / fg if fg else 0.0,
        "psi_block_ratio": worst_psi[1] / fg if fg else 0.0,
        "phi_block_worst": list(worst_phi[0]),
        "psi_block_worst": list(worst_psi[0]),
        "phi_triangle": tri_phi,
        "psi_triangle": tri_psi,
        "blocks": len(pb) + len(qb),
    }


def chain_violations(c: dict, slack: float = REL_SLACK) -> list[str]:
    """Names of the chain steps that fail at relative ``slack``."""
    fg = c["norm_f"] * c["norm_g"]
    up = 1 + slack
    bad = []
    if c["pointwise_ratio"] > c["factor"] * up:
        bad.append("pointwise h <= 2^a (phi + psi)")
    if c["phi_block_ratio"] > up:
        bad.append("||phi_kj|| <= ||f|| ||g||")
    if c["psi_block_ratio"] > up:
        bad.append("||psi_kj|| <= ||f|| ||g||")
    if c["norm_phi"] > c["phi_triangle"] * up or c["norm_psi"] > c["psi_triangle"] * up:
        bad.append("triangle inequality over blocks")
    if c["phi_triangle"] > c["C_hi"] * fg * up or c["psi_triangle"] > c["C_hi"] * fg * up:
        bad.append("block sum <= C ||f|| ||g||")
    if c["norm_h"] > c["factor"] * (c["norm_phi"] + c["norm_psi"]) * up:
        bad.append("||h|| <= 2^a (||phi|| + ||psi||)")
    if c["norm_h"] > c["bound"] * up:
        bad.append("||h|| <= 2 2^a C ||f|| ||g||")
    return bad


def _chain_from_trace(tr: DecompositionTrace) -> dict:
    n = tr.norms
    fg = n["f"] * n["g"]
    a_f = float(tr.a)
    h = tr.h.to_float()
    phi, psi = tr.phi.to_float(), tr.psi.to_float()
    pointwise = max(
        (float(abs(v)) / float(abs(phi[x]) + abs(psi[x])) for x, v in h.entries.items()), default=0.0
    )
    return {
        "norm_f": n["f"],
        "norm_g": n["g"],
        "norm_h": n["h"],
        "norm_phi": n["phi"],
        "norm_psi": n["psi"],
        "factor": float(tr.factor),
        "C_lo": tr.C.lo,
        "C_hi": tr.C.hi,
        "bound": tr.total * fg,
        "pointwise_ratio": pointwise,
        "phi_block_ratio": max(tr.phi_kj_norms.values(), default=0.0) / fg if fg else 0.0,
        "psi_block_ratio": max(tr.psi_kj_norms.values(), default=0.0) / fg if fg else 0.0,
        "phi_triangle": sum(v / (k + 1.0) ** a_f for (k, _), v in tr.phi_kj_norms.items()),
        "psi_triangle": sum(v / (k + 1.0) ** a_f for (k, _), v in tr.psi_kj_norms.items()),
        "blocks": len(tr.phi_kj) + len(tr.psi_kj),
    }


def verify_theorem1(
    f: SparseFunction,
    g: SparseFunction,
    a=3,
    p=2,
    *,
    table: PairTable | None = None,
    method: str = "auto",
    slack: float = REL_SLACK,
    params: dict | None = None,
) -> VerificationReport:
    """Check ``||h||_p <= 2 * 2^a * C_a * ||f||_p ||g||_p`` and every step before it.

    Complex or signed inputs are replaced by ``|f|``, ``|g|``, which bounds
    ``|h|`` pointwise.  ``method="exact"`` runs the block decomposition on
    SparseFunctions (slow, exact for rational inputs); ``"auto"`` uses the
    vectorised :class:`PairTable`.
    """
    t0 = time.perf_counter()
    pe = _check_inputs(p, a)
    if any(isinstance(v, (complex, QComplex)) or v < 0 for v in f.entries.values()):
        f = f.abs()
    if any(isinstance(v, (complex, QComplex)) or v < 0 for v in g.entries.values()):
        g = g.abs()
    use_exact = method == "exact" or (
        method == "auto"
        and table is None
        and not _freeconv.WordCodec.fits(
            f.group.rank,
            max((len(x) for x in f.entries), default=0) + max((len(x) for x in g.entries), default=0),
        )
    )
    if use_exact:
        tr = phi_kj_family(f, g, LengthPolyWeight(a, f.group), pe)
        chain = _chain_from_trace(tr)
        chain["reconstruction_ok"] = tr.extra["reconstruction_ok"]
    else:
        table = table or PairTable(f, g)
        chain = evaluate_chain(table, a, pe)
    bad = chain_violations(chain, slack)
    if chain.get("reconstruction_ok") is False:
        bad.append("phi reconstruction")
    lhs, rhs = chain["norm_h"], chain["bound"]
    witnesses = []
    if bad:
        witnesses.append({"failed": bad, "f": _dump(f), "g": _dump(g)})
    return VerificationReport(
        check="theorem1",
        verdict=FAIL if bad else PASS,
        lhs=lhs,
        rhs=rhs,
        ratio=lhs / rhs if rhs else 0.0,
        params={"a": a, "p": pe.p, "rank": f.group.rank, **(params or {})},
        witnesses=witnesses,
        wall_time=time.perf_counter() - t0,
        details=chain,
    )


def _dump(f: SparseFunction) -> list:
    return [[f.group.format_element(x), v] for x, v in f.items()]


def sweep_pair(rank: int, seed, trial: int, support_size: int = 200, max_length: int = 12, value_law="nonneg-uniform"):
    """The deterministic random pair used by trial ``trial`` of a sweep."""
    G = FreeGroup(rank)
    rng = np.random.default_rng([int(seed), int(trial)])
    nf = int(rng.integers(1, support_size + 1))
    ng = int(rng.integers(1, support_size + 1))
    f = random_sparse(G, rng, nf, max_length, value_law)
    g = random_sparse(G, rng, ng, max_length, value_law)
    return f, g


def theorem1_sweep(
    rank: int,
    a_values=(3,),
    p_values=(2,),
    trials: int = 1000,
    seed=0,
    support_size: int = 200,
    max_length: int = 12,
    jobs: int = 1,
    slack: float = REL_SLACK,
    budget: int | None = None,
) -> list[VerificationReport]:
    """One report per (trial, a, p), ordered by trial then ``a`` then ``p``."""

    for a in a_values:
        constant_enclosure(a)

    def one(trial):
        f, g = sweep_pair(rank, seed, trial, support_size, max_length)
        table = PairTable(f, g, budget=budget)
        out = []
        for a in a_values:
            for p in p_values:
                r = verify_theorem1(
                    f, g, a, p, table=table, slack=slack,
                    params={"trial": trial, "support_size": support_size, "max_length": max_length},
                )
                r.seed = seed
                out.append(r)
        return out

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(one, range(trials)))
    else:
        chunks = [one(t) for t in range(trials)]
    return [r for chunk in chunks for r in chunk]


# -- case split -------------------------------------------------------------------


def case_split_factor_check(
    w: LengthPolyWeight,
    group: FreeGroup,
    trials: int = 10_000,
    seed=0,
    max_length: int = 12,
) -> VerificationReport:
    """Sample ``(x, b)`` and test the two cases behind the factor ``2^a``.

    With ``n = |x|``, ``k = |b|``: if ``k >= n/2`` then ``w(x)/w(b) <= 2^a``;
    otherwise ``|b^{-1}x| >= n - k`` and ``w(x)/w(b^{-1}x) <= 2^a``.  Half of
    the samples take ``b`` to be a prefix of ``x`` (possibly extended) so the
    second case is exercised with little cancellation slack.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    factor = doubling_factor(w.a)
    worst = {1: (0, None), 2: (0, None)}
    fails = []
    for i in range(trials):
        x = group.random_element(rng, max_length)
        if i % 2 and x:
            cut = int(rng.integers(0, len(x) + 1))
            b = x[:cut]
            ext = group.random_element(rng, 2)
            if ext and b and ext[0] == -b[-1]:
                ext = ()
            b = group.reduce(b + ext)
        else:
            b = group.random_element(rng, max_length)
        n, k = len(x), len(b)
        if 2 * k >= n:
            case, denom = 1, w(b)
        else:
            case = 2
            rest = group.multiply(group.invert(b), x)
            if len(rest) < n - k:
                fails.append({"x": group.format_element(x), "b": group.format_element(b), "reason": "|b^-1 x| < n-k"})
            denom = w(rest)
        wx = w(x)
        ratio = Fraction(wx) / Fraction(denom) if is_exact(wx) and is_exact(denom) else float(wx) / float(denom)
        if ratio > worst[case][0]:
            worst[case] = (ratio, (x, b))
        if ratio > factor * (1 + (0 if is_exact(ratio) else 1e-12)):
            fails.append({"x": group.format_element(x), "b": group.format_element(b), "ratio": ratio})
    top = max(worst[1][0], worst[2][0])
    return VerificationReport(
        check="case-split",
        verdict=FAIL if fails else PASS,
        lhs=top,
        rhs=factor,
        ratio=float(top) / float(factor),
        params={"a": w.a, "rank": group.rank, "max_length": max_length},
        witnesses=fails[:5]
        or [
            {"case": c, "ratio": worst[c][0], "x": group.format_element(worst[c][1][0]), "b": group.format_element(worst[c][1][1])}
            for c in (1, 2)
            if worst[c][1] is not None
        ],
        trials=trials,
        seed=seed,
        wall_time=time.perf_counter() - t0,
        details={"case1_max_ratio": worst[1][0], "case2_max_ratio": worst[2][0]},
    )


def case_ratio(a, n: int, k: int, rest: int | None = None):
    """``w(x)/w(b)`` (``rest=None``) or ``w(x)/w(b^{-1}x)`` for lengths."""
    w = LengthPolyWeight(a)
    num = w.at_length(n)
    den = w.at_length(k if rest is None else rest)
    return Fraction(num, den) if isinstance(num, int) and isinstance(den, int) else num / den


# -- the p <= 2 step -------------------------------------------------------------


def conjugate_norm_step(x, p) -> tuple[float, float, bool]:
    """``(||x||_q, ||x||_p, ||x||_q <= ||x||_p)`` for the conjugate ``q``.

    The block estimate needs ``||x||_q <= ||x||_p``, which holds for every
    ``x`` exactly when ``p <= 2``.
    """
    pe = as_exponent(p)
    pf, qf = float(pe.p), float(pe.q)
    arr = np.abs(np.asarray(x, dtype=np.float64))
    nq = float(np.sum(arr**qf)) ** (1 / qf)
    np_ = float(np.sum(arr**pf)) ** (1 / pf)
    return nq, np_, nq <= np_ * (1 + 1e-15)


# -- p > 2 obstruction -----------------------------------------------------------


def _power_sums(exponents, schedule, chunk: int = 1 << 20):
    """``{N: [sum_{n<=N} n^{-e} for e in exponents]}`` for ``N`` in ``schedule``."""
    schedule = sorted(set(int(N) for N in schedule))
    parts = [[] for _ in exponents]
    out = {}
    start = 1
    for N in schedule:
        lo = start
        while lo <= N:
            hi = min(N, lo + chunk - 1)
            n = np.arange(lo, hi + 1, dtype=np.float64)
            for i, e in enumerate(exponents):
                parts[i].append(float(np.sum(n ** (-e))))
            lo = hi + 1
        start = N + 1
        out[N] = [math.fsum(ps) for ps in parts]
    return out


def prop12_divergence(p, alpha_exp, N_schedule=(10**4, 4 * 10**4, 10**5, 10**6)) -> VerificationReport:
    """Show ``l_p * l_p`` pairings escape ``l_1`` once ``p > 2``.

    ``f(n) = g(n) = n^{-alpha}`` on ``{1..N}`` with ``1/p < alpha < 1/2``:
    the partial ``p``-norms ``P_N`` converge while the pairings
    ``S_N = sum n^{-2 alpha}`` grow without bound.  Both are bracketed by
    integral comparison:

    * ``((N+1)^{1-2a} - 1)/(1-2a) <= S_N <= 1 + (N^{1-2a} - 1)/(1-2a)``;
    * ``sum_{n>N} n^{-pa} <= N^{1-pa}/(pa - 1)``, so
      ``P_inf - P_N <= (P_N^p + tail)^{1/p} - P_N``;
    * ``S_{4N} - S_N >= ((4N+1)^{1-2a} - (N+1)^{1-2a})/(1-2a)``, which
      increases with ``N``.
    """
    t0 = time.perf_counter()
    p = float(p)
    al = float(alpha_exp)
    if not (1.0 / p < al < 0.5):
        raise ParameterError(f"need 1/p < alpha < 1/2; empty for p = {p}" if p <= 2 else f"alpha = {al} outside ({1 / p}, 1/2)")
    Ns = sorted(set(int(N) for N in N_schedule))
    sums = _power_sums((2 * al, p * al), Ns)
    e = 1 - 2 * al
    rows = []
    ok = True
    for N in Ns:
        S, Pp = sums[N]
        P = Pp ** (1 / p)
        s_lo = ((N + 1) ** e - 1) / e
        s_hi = 1 + (N**e - 1) / e
        tail = N ** (1 - p * al) / (p * al - 1)
        cauchy = (Pp + tail) ** (1 / p) - P
        inc_lo = ((4 * N + 1) ** e - (N + 1) ** e) / e
        in_bracket = s_lo * (1 - 1e-12) <= S <= s_hi * (1 + 1e-12)
        ok &= in_bracket
        rows.append(
            {
                "N": N,
                "S_N": S,
                "P_N": P,
                "S_lower": s_lo,
                "S_upper": s_hi,
                "P_tail_bound": cauchy,
                "S_4N_minus_S_N_lower": inc_lo,
            }
        )
    cauchy_shrinks = all(b["P_tail_bound"] < a["P_tail_bound"] for a, b in zip(rows, rows[1:]))
    growth = rows[-1]["S_N"] > rows[0]["S_N"]
    ok = ok and cauchy_shrinks and growth and all(r["S_4N_minus_S_N_lower"] > 0 for r in rows)
    first, last = rows[0], rows[-1]
    return VerificationReport(
        check="prop12",
        verdict=PASS if ok else FAIL,
        lhs=last["S_N"],
        rhs=first["S_N"],
        ratio=last["S_N"] / first["S_N"],
        params={"p": p, "alpha": al, "N_schedule": Ns},
        trials=len(Ns),
        wall_time=time.perf_counter() - t0,
        details={"rows": rows, "increment_floor": ((5**e) - 2**e) / e},
    )
