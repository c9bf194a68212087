"""
A weight that is submultiplicative but fails the convolution test
=================================================================

``w(x) = (1 + |x|)^a`` on a free group is submultiplicative.  The sufficient
condition ``w^-q * w^-q <= w^-q`` fails, and a finite partial sum proves it.
"""

from fractions import Fraction

from wcl import FreeGroup, LengthPolyWeight, check_condition1, condition2_witness

F2 = FreeGroup(2)
w = LengthPolyWeight(3, F2)

# submultiplicativity on 5000 random pairs
r1 = check_condition1(w, F2, trials=5000, seed=0)
print(r1.summary())

# %%
# At the identity only the ball of radius 1 is needed.  Every term is
# positive, so the partial sum is a lower bound for the full convolution.

r2 = condition2_witness(w, 2, F2, (), radius=1)
print(r2.summary())
print("partial sum", r2.lhs, "=", float(r2.lhs), "> 1 = w(e)^-2")

# %%
# By hand: w(e) = 1 and the four words of length 1 have w = 8

print(1 + 4 * Fraction(1, 8) ** 4)

# %%
# Larger radii only add positive terms

for radius in range(4):
    print(radius, float(condition2_witness(w, 2, F2, (), radius=radius).lhs))
