"""
The norm bound for convolution with a length weight
===================================================

For nonnegative ``f, g`` on a free group put
``h(x) = w(x) * sum_b f(b) g(b^-1 x) / (w(b) w(b^-1 x))`` with
``w(x) = (1 + |x|)^a``.  Then ``||h||_p <= 2 * 2^a * C_a * ||f||_p ||g||_p``
for ``1 < p <= 2``, where ``C_a = sum_k (k+1)^(1-a)``.
"""

import numpy as np


from wcl.theorem1 import case_ratio, conjugate_norm_step, constant_enclosure, sweep_pair, verify_theorem1

# the constant, certified
for a in (2.5, 3, 4):
    C = constant_enclosure(a)
    print(f"a={a}: C in [{C.lo:.12f}, {C.hi:.12f}]")
print("pi^2/6 =", np.pi**2 / 6)

# %%
# One random pair, and every step of the inequality chain

f, g = sweep_pair(2, seed=0, trial=0)
r = verify_theorem1(f, g, a=3, p=1.5)
print(r.summary())
for k in ("norm_h", "norm_phi", "norm_psi", "pointwise_ratio", "phi_block_ratio", "psi_block_ratio"):
    print(f"  {k:16s} {r.details[k]:.6g}")

# %%
# The bound is far from tight on random data

ratios = [verify_theorem1(*sweep_pair(3, 1, t), a=3, p=2).ratio for t in range(50)]
print("max ||h|| / bound over 50 pairs:", max(ratios))

# %%
# Where 2^a comes from: either the middle letter is long, or the rest is

print("w(x)/w(b) at |x|=10, |b|=5:", case_ratio(3, 10, 5))
print("w(x)/w(b^-1 x) at |x|=10, |b^-1 x|=6:", case_ratio(3, 10, 4, rest=6))

# %%
# The restriction p <= 2: ||x||_q <= ||x||_p fails for p > 2

x = np.ones(100)
print("p=1.5:", conjugate_norm_step(x, 1.5))
print("p=3:  ", conjugate_norm_step(x, 3))
