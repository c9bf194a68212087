"""
Symmetric weighted algebras on small abelian groups
===================================================

A constant weight ``n^(1/q)`` on ``Z_n`` and a scaled ``1 + t^2`` weight on
``Z`` both make the weighted ``l_2`` space a Banach algebra.  The involution
``f*(t) = conj f(-t)`` is an isometry there.
"""

import numpy as np

from wcl import EvenPolyWeightZ, convolve, involution
from wcl.symcheck import (
    check_lemma31,
    check_thm32_summability,
    cyclic_fixture,
    int_fixture,
    involution_checks,
    symmetric_suite,
)

fixtures = [cyclic_fixture(6), cyclic_fixture(8), int_fixture()]
for fx in fixtures:
    print(fx.name(), "|", fx.certificate)

# %%
# Norm inequalities on random complex pairs

for fx in fixtures:
    reps = symmetric_suite(fx, pairs=200, seed=0)
    print(fx.name(), "failures:", sum(r.verdict != "PASS" for r in reps), "worst ratio:", max(r.ratio for r in reps))

# %%
# The involution on exact complex rationals

fx = fixtures[0]
rng = np.random.default_rng(5)
f = fx.random_function(rng, 4, "rational-complex")
g = fx.random_function(rng, 3, "rational-complex")
print(involution_checks(fx, f, g))
print(involution(convolve(f, g)) == convolve(involution(g), involution(f)))

# %%
# Product sets: |AB| >= |B| |A| / n over every pair of subsets of Z_n

for n in range(4, 9):
    r = check_lemma31(cyclic_fixture(n))
    print(n, r.verdict, r.trials, "pairs, tightest", r.witnesses[0]["A"], r.witnesses[0]["B"])

# %%
# On Z the weight needs summable w^-q; the sum over Z is enclosed rigorously

r = check_thm32_summability(EvenPolyWeightZ(1, 2), q=2)
print("sum (1+t^2)^-2 in", r.details["enclosure"])
