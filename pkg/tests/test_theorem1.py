import math
from fractions import Fraction

import pytest
from hypothesis import given

from wcl.algebra import SparseFunction, random_sparse
from wcl.errors import BudgetExceededError, ParameterError
from wcl.groups import FreeGroup, common_prefix_length
from wcl.reports import PASS
from wcl.theorem1 import (
    PairTable,
    build_h,
    case_ratio,
    case_split_factor_check,
    conjugate_norm_step,
    evaluate_chain,
    phi_blocks,
    phi_kj_family,
    prop12_divergence,
    psi_blocks,
    psi_by_substitution,
    split_phi_psi,
    sweep_pair,
    verify_theorem1,
)
from wcl.weights import LengthPolyWeight

from strategies import free_functions, nonneg_rationals

F2 = FreeGroup(2)
W3 = LengthPolyWeight(3, F2)


def D(x, v=1):
    return SparseFunction.delta(F2, x, v)


def test_build_h_examples():
    assert build_h(D(()), D(()), W3) == D(())
    assert build_h(D((1,)), D((2,)), W3) == D((1, 2), Fraction(27, 64))


def test_h_nonnegative():
    f = random_sparse(F2, 1, 50, 6)
    g = random_sparse(F2, 2, 50, 6)
    assert all(v >= 0 for v in build_h(f, g, W3).values())


def test_split_single_terms():
    b, c = (1, 2), (-2, -1, 2)
    phi, psi = split_phi_psi(D(b), D(c), W3)
    x = F2.multiply(b, c)
    assert phi == D(x, Fraction(1, W3(b)))
    assert psi == D(x, Fraction(1, W3(c)))


def test_split_rejects_negative():
    with pytest.raises(ParameterError):
        split_phi_psi(D((1,), -1), D(()), W3)
    with pytest.raises(ParameterError):
        split_phi_psi(D((1,), 1j), D(()), W3)


@given(free_functions(values=nonneg_rationals), free_functions(values=nonneg_rationals))
def test_psi_substitution(f, g):
    f, g = SparseFunction(F2, f), SparseFunction(F2, g)
    assert psi_by_substitution(f, g, W3) == split_phi_psi(f, g, W3)[1]


@pytest.mark.parametrize("a", [Fraction(5, 2), 3, 4])
def test_pointwise_domination(a):
    w = LengthPolyWeight(a, F2)
    for seed in range(10):
        f, g = sweep_pair(2, seed, 0, 60, 8)
        h = build_h(f, g, w)
        phi, psi = split_phi_psi(f, g, w)
        for x, v in h.entries.items():
            assert v <= 2 ** float(a) * (phi[x] + psi[x]) * (1 + 1e-12)


def test_blocks_supported_on_sphere():
    f = SparseFunction(F2, {(1,): 1, (-2,): 2})
    g = random_sparse(F2, 0, 20, 4, "rational-nonneg")
    for (k, j), F in phi_blocks(f, g).items():
        assert k == 1 and F.support_size > 0
        # phi_kj vanishes where |x| < j
        assert all(len(x) >= j for x in F.entries)


def test_single_pair_single_block():
    b, c = (1, 2, 1), (-1, 2)
    x = F2.multiply(b, c)
    blocks = phi_blocks(D(b), D(c))
    assert list(blocks) == [(3, common_prefix_length(x, b))]


def test_psi_blocks_by_suffix():
    b, c = (1, 2, 1), (-1, 2)
    x = F2.multiply(b, c)
    blocks = psi_blocks(D(b), D(c))
    k = len(c)
    j = common_prefix_length(x[::-1], c[::-1])
    assert list(blocks) == [(k, j)]


def test_reconstruction_exact():
    for seed in range(8):
        f, g = sweep_pair(2, seed, 1, 40, 7, "rational-nonneg")
        for a in (3, 4):
            tr = phi_kj_family(f, g, LengthPolyWeight(a, F2), 2)
            assert tr.reconstruction_exact
            assert tr.factor == 2**a
            assert tr.total == pytest.approx(2 * 2**a * tr.C.lo)


def test_reconstruction_float_exponent():
    f, g = sweep_pair(2, 3, 1, 40, 7, "rational-nonneg")
    tr = phi_kj_family(f, g, LengthPolyWeight(2.5, F2), 2)
    assert tr.extra["reconstruction_ok"] and tr.reconstruction_error < 1e-12


def test_alpha_restriction():
    f, g = sweep_pair(2, 4, 1, 20, 5, "rational-nonneg")
    full = phi_kj_family(f, g, W3, 2)
    pick = full.phi.support()[:5]
    tr = phi_kj_family(f, g, W3, 2, alpha_set=pick)
    assert tr.extra["reconstruction_ok"]
    assert all(set(F.entries) <= set(pick) for F in tr.phi_kj.values())


def test_block_norm_bound():
    for seed in range(10):
        f, g = sweep_pair(3, seed, 2, 40, 8, "rational-nonneg")
        for p in (1.5, 2):
            tr = phi_kj_family(f, g, W3, p)
            assert tr.max_block_ratio() <= 1 + 1e-12


def test_pair_table_matches_exact_path():
    for seed in range(6):
        f, g = sweep_pair(2, seed, 3, 80, 9)
        table = PairTable(f, g)
        tr = phi_kj_family(f, g, W3, 2)
        chain = evaluate_chain(table, 3, 2)
        assert chain["norm_h"] == pytest.approx(tr.norms["h"], rel=1e-12)
        assert chain["norm_phi"] == pytest.approx(tr.norms["phi"], rel=1e-12)
        assert chain["norm_psi"] == pytest.approx(tr.norms["psi"], rel=1e-12)
        # same block keys and norms as the prefix/suffix definition
        pt = table.block_norms("phi", 2.0)
        qt = table.block_norms("psi", 2.0)
        assert pt.keys() == tr.phi_kj_norms.keys() and qt.keys() == tr.psi_kj_norms.keys()
        for kj in pt:
            assert pt[kj] == pytest.approx(tr.phi_kj_norms[kj], rel=1e-12)
        for kj in qt:
            assert qt[kj] == pytest.approx(tr.psi_kj_norms[kj], rel=1e-12)
        assert table.reconstruction_error(3) < 1e-12
        words = table.words()
        h, _, _ = table.functions(3)
        direct = build_h(f, g, W3, method="direct").entries
        assert dict(zip(words, h.tolist())).keys() == direct.keys()


def test_pair_table_budget():
    f = random_sparse(F2, 0, 30, 5)
    with pytest.raises(BudgetExceededError):
        PairTable(f, f, budget=100)


def test_identity_pair():
    r = verify_theorem1(D(()), D(()), 3, 2)
    assert r.verdict == PASS and r.lhs == 1
    assert r.rhs == pytest.approx(16 * math.pi**2 / 6, rel=1e-9)
    assert r.ratio == pytest.approx(0.038, abs=5e-4)


def test_verify_exact_and_fast_agree():
    f, g = sweep_pair(2, 9, 0, 50, 8, "rational-nonneg")
    a = verify_theorem1(f, g, 3, Fraction(3, 2), method="exact")
    b = verify_theorem1(f.to_float(), g.to_float(), 3, 1.5)
    assert a.verdict == b.verdict == PASS
    assert a.lhs == pytest.approx(b.lhs, rel=1e-12)
    assert a.details["phi_triangle"] == pytest.approx(b.details["phi_triangle"], rel=1e-12)


def test_complex_inputs_use_modulus():
    f = random_sparse(F2, 1, 30, 6, "complex-gaussian")
    g = random_sparse(F2, 2, 30, 6, "complex-gaussian")
    r = verify_theorem1(f, g, 3, 2)
    assert r.verdict == PASS
    assert r.lhs == pytest.approx(verify_theorem1(f.abs(), g.abs(), 3, 2).lhs)


def test_verify_preconditions():
    with pytest.raises(ParameterError):
        verify_theorem1(D(()), D(()), 3, 2.5)
    with pytest.raises(ParameterError):
        verify_theorem1(D(()), D(()), 3, 1)
    with pytest.raises(ParameterError):
        verify_theorem1(D(()), D(()), 2, 2)


def test_case_split_examples():
    assert case_ratio(3, 4, 2) == Fraction(125, 27)
    assert case_ratio(3, 4, 1, rest=3) == Fraction(125, 64)
    assert case_ratio(3, 0, 0) == 1
    r = case_split_factor_check(W3, F2, 5000, seed=3)
    assert r.verdict == PASS
    assert r.details["case1_max_ratio"] <= 8 and r.details["case2_max_ratio"] <= 8
    r = case_split_factor_check(LengthPolyWeight(2.5, F2), FreeGroup(3), 2000, seed=4)
    assert r.verdict == PASS


def test_conjugate_norm_step():
    assert conjugate_norm_step([1, 1], 2)[2]
    assert conjugate_norm_step([3, 1, 0.5], 1.5)[2]
    # for p > 2 the conjugate exponent is below p and the step fails on two equal entries
    nq, np_, ok = conjugate_norm_step([1, 1], 3)
    assert not ok and nq > np_


def test_prop12_integral_oracle():
    # integral comparison, computed independently of the implementation
    e = 1 - 0.8
    s_lo_1e6 = ((1e6 + 1) ** e - 1) / e
    s_hi_1e4 = 1 + (1e4**e - 1) / e
    assert s_lo_1e6 > 2 * s_hi_1e4
    r = prop12_divergence(3, 0.4, [10**4, 10**5, 10**6])
    assert r.verdict == PASS
    rows = {row["N"]: row for row in r.details["rows"]}
    assert rows[10**6]["S_N"] > 2 * rows[10**4]["S_N"]
    for row in rows.values():
        assert row["S_lower"] <= row["S_N"] <= row["S_upper"]


def test_prop12_rejects_empty_range():
    with pytest.raises(ParameterError):
        prop12_divergence(2, 0.45)
    with pytest.raises(ParameterError):
        prop12_divergence(3, 0.3)


def test_sweep_pair_deterministic():
    a = sweep_pair(2, 42, 7)
    b = sweep_pair(2, 42, 7)
    assert a[0] == b[0] and a[1] == b[1]
    assert 1 <= a[0].support_size <= 200
    assert all(len(x) <= 12 for x in a[0].entries)
