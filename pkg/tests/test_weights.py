from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wcl.algebra import random_sparse, weighted_norm
from wcl.errors import BudgetExceededError, InvalidWeightError, ParameterError
from wcl.groups import CyclicGroup, FreeGroup, IntGroup
from wcl.reports import FAIL, INCONCLUSIVE, PASS, VIOLATED
from wcl.weights import (
    Condition2Z,
    ConstantWeight,
    EvenPolyWeightZ,
    LengthPolyWeight,
    MaxWeight,
    ReflectedWeight,
    TableWeight,
    check_condition1,
    check_condition2_Z,
    condition2_witness,
    parse_weight,
    transform_weights,
)

from strategies import words

F2 = FreeGroup(2)
Z = IntGroup()


def test_eval_examples():
    w = LengthPolyWeight(3, F2)
    assert w(()) == 1
    assert w((1, 2)) == 27
    assert EvenPolyWeightZ(1, 2)(3) == 10
    assert EvenPolyWeightZ(Fraction(1, 2), 2)(-3) == 5
    assert LengthPolyWeight(2.5)((1,)) == pytest.approx(2**2.5)


def test_invalid_weights():
    for bad in (lambda: LengthPolyWeight(-1), lambda: ConstantWeight(0), lambda: EvenPolyWeightZ(-2, 2)):
        with pytest.raises(InvalidWeightError):
            bad()


@given(words(3, 12))
def test_length_weight_positive_and_inverse_invariant(x):
    G = FreeGroup(3)
    w = LengthPolyWeight(3, G)
    assert w(x) >= 1 and w(x) == w(G.invert(x))


def test_condition1_length_weight():
    for a in (0, 1, 2.5, 3):
        r = check_condition1(LengthPolyWeight(a, F2), F2, 10_000, seed=1)
        assert r.verdict == PASS and r.ratio <= 1


def test_condition1_constant_weights():
    r = check_condition1(ConstantWeight(1), F2, 100)
    assert r.verdict == PASS and r.ratio == 1
    r = check_condition1(ConstantWeight(Fraction(1, 2)), F2, 100)
    assert r.verdict == FAIL
    assert r.witnesses[0]["w(st)"] == Fraction(1, 2) and r.witnesses[0]["w(s)w(t)"] == Fraction(1, 4)


def test_condition1_rejects_zero_trials():
    with pytest.raises(ParameterError):
        check_condition1(ConstantWeight(1), F2, 0)


def test_condition2_oracle_value():
    # independent sum: identity term 1 plus four generators, each (8^-2)^2
    oracle = Fraction(1) + 4 * Fraction(1, 8**2) * Fraction(1, 8**2)
    assert oracle == Fraction(1025, 1024)
    r = condition2_witness(LengthPolyWeight(3, F2), 2, F2, (), radius=1)
    assert r.verdict == VIOLATED
    assert r.lhs == oracle and r.rhs == 1


def test_condition2_radius_zero_inconclusive():
    r = condition2_witness(LengthPolyWeight(3, F2), 2, F2, (), radius=0)
    assert r.verdict == INCONCLUSIVE and r.lhs == 1


def test_condition2_monotone_in_radius():
    w = LengthPolyWeight(3, F2)
    sums = [condition2_witness(w, 2, F2, (1,), radius=N).lhs for N in range(5)]
    assert sums == sorted(sums)
    verdicts = [condition2_witness(w, 2, F2, (), radius=N).verdict for N in range(5)]
    first = verdicts.index(VIOLATED)
    assert all(v == VIOLATED for v in verdicts[first:])


def test_condition2_budget():
    with pytest.raises(BudgetExceededError):
        condition2_witness(LengthPolyWeight(3, F2), 2, F2, (), radius=30)


@pytest.mark.parametrize("n", [2, 5, 6, 8])
def test_condition2_cyclic_constant(n):
    G = CyclicGroup(n)
    w = ConstantWeight.root(n, 2, G)  # c^2 = n
    for x in G.elements():
        r = condition2_witness(w, 2, G, x, radius=None)
        # n c^{-4} = 1/n = c^{-2}
        assert r.verdict == PASS and r.lhs == r.rhs == Fraction(1, n)
    small = ConstantWeight(1, G)
    assert condition2_witness(small, 2, G, 0, radius=None).verdict == VIOLATED


def test_condition2_Z_calibration():
    cz = Condition2Z(2, 2, T=50, N=10_000)
    # tail bound (2/3) N^-3 for sum_{|s|>N} (1+s^2)^-2
    assert cz.tail == pytest.approx(2 / 3 * 1e-12, rel=1e-9)
    c = cz.calibrate()
    r = check_condition2_Z(EvenPolyWeightZ(c, 2), 2, cache=cz)
    assert r.verdict == PASS
    r1 = check_condition2_Z(EvenPolyWeightZ(1, 2), 2, cache=cz)
    assert r1.verdict == FAIL and r1.ratio > 1
    assert all(isinstance(m, float) for m in r1.details["margins"].values())
    below = check_condition2_Z(EvenPolyWeightZ(c * (1 - 1e-6), 2), 2, cache=cz)
    assert below.verdict == FAIL
    assert cz.certified_scale() >= c


def test_condition2_Z_margins_scale():
    cz = Condition2Z(2, 2, T=5, N=200)
    # U(0) is at least its identity term w(0)^{-2q} at every scale
    for c in (0.5, 1.0, 3.0):
        lhs_0 = c**-4 * cz.upper[cz.T]
        assert lhs_0 >= c**-4 * 1.0
    with pytest.raises(ParameterError):
        Condition2Z(0.5, 2)
    with pytest.raises(ParameterError):
        Condition2Z(2, 2, T=10, N=5)


def test_condition2_Z_oracle_point():
    # independent float sum at t = 3 for c = 1 lies below the certified upper bound
    s = np.arange(-20000, 20001, dtype=float)
    direct = np.sum((1 + s**2) ** -2 * (1 + (3 - s) ** 2) ** -2)
    cz = Condition2Z(2, 2, T=5, N=10_000)
    assert direct <= cz.upper[cz.T + 3] <= direct * (1 + 1e-9)


def test_transform_weights_examples():
    w = LengthPolyWeight(3, F2)
    tilde, sym, mx = transform_weights(w, 2)
    assert mx is MaxWeight
    for x in [(), (1,), (1, -2, 1), (2, 2, 1)]:
        assert tilde(x) == w(x) and sym(x) == w(x)
    ev = EvenPolyWeightZ(1, 2)
    _, sym, _ = transform_weights(ev)
    assert all(sym(t) == ev(t) for t in range(-10, 11))
    asym = TableWeight({1: 2, -1: 5}, group=Z)
    _, sym, _ = transform_weights(asym)
    assert sym(1) == sym(-1) == 5


def test_symmetrized_even_on_samples():
    rng = np.random.default_rng(0)
    table = {F2.random_element(rng, 4): int(rng.integers(1, 9)) for _ in range(30)}
    w = TableWeight(table, group=F2)
    _, sym, _ = transform_weights(w)
    for _ in range(500):
        x = F2.random_element(rng, 4)
        assert sym(x) == sym(F2.invert(x))
        assert ReflectedWeight(w)(x) == w(F2.invert(x))


def test_max_weight_norm_dominates():
    rng = np.random.default_rng(2)
    w = LengthPolyWeight(2, F2)
    v = TableWeight({F2.random_element(rng, 3): 50 for _ in range(10)}, group=F2)
    u = MaxWeight(w, v)
    for seed in range(50):
        f = random_sparse(F2, seed, 10, 3, "complex-gaussian")
        for p in (1.5, 2):
            assert weighted_norm(f, u, p) >= max(weighted_norm(f, w, p), weighted_norm(f, v, p)) * (1 - 1e-15)


@pytest.mark.parametrize(
    "spec",
    ["lenpoly:a=3", "lenpoly:a=2.5", "evenpolyZ:c=1,d=2", "const:c=2", "const:c=6,root=2",
     "max(lenpoly:a=3,reflect(lenpoly:a=2))", "evenpolyZ:c=5.081218674052862,d=2"],
)
def test_spec_round_trip(spec):
    w = parse_weight(spec, F2 if "lenpoly" in spec else Z)
    assert parse_weight(w.spec(), w.group).spec() == w.spec()


def test_spec_errors():
    for bad in ("", "lenpoly:a=", "foo:a=1", "max(lenpoly:a=3)", "reflect(lenpoly:a=3", "lenpoly:a=3 junk"):
        with pytest.raises(ParameterError):
            parse_weight(bad, F2)


def test_constant_root_exact_powers():
    w = ConstantWeight.root(6, 2)
    assert w.pow(0, -2) == Fraction(1, 6)
    assert w.pow(0, -4) == Fraction(1, 36)
    assert w(0) == pytest.approx(6**0.5)


@given(st.integers(-10**6, 10**6))
def test_even_poly_even(t):
    w = EvenPolyWeightZ(3, 2)
    assert w(t) == w(-t) > 0
