"""
Reduced words and convolution on a free group
=============================================

Elements of the free group on two generators are reduced words.  Functions with
finite support multiply by convolution.
"""

import numpy as np

from wcl import FreeGroup, SparseFunction, convolve, random_sparse

F2 = FreeGroup(2)

# words are tuples of nonzero ints, -k is the inverse of generator k
x = F2.parse_element("1 2 -1")
y = F2.parse_element("1 -2 -2 1")
print("x =", F2.format_element(x), " y =", F2.format_element(y))
print("x y =", F2.format_element(F2.multiply(x, y)))
print("x x^-1 =", repr(F2.format_element(F2.multiply(x, F2.invert(x)))))

# %%
# The sphere of radius n has 4 * 3^(n-1) words

for n in range(5):
    print(n, sum(1 for _ in F2.iter_sphere(n)))

# %%
# Convolution of two deltas is the delta at the product

d = convolve(SparseFunction.delta(F2, x), SparseFunction.delta(F2, y))
print(d.items())

# %%
# A bigger product: the vectorised engine handles thousands of words

rng = np.random.default_rng(1)
f = random_sparse(F2, rng, 500, 10)
g = random_sparse(F2, rng, 500, 10)
h = convolve(f, g)
print("support sizes", len(f), len(g), "->", len(h))
print("total mass is multiplicative:", np.isclose(h.total(), f.total() * g.total()))
