"""
Why p must stay at most 2
=========================

With ``f(n) = g(n) = n^-alpha`` and ``1/p < alpha < 1/2`` both functions are
in ``l_p`` but the pairing ``sum f g`` diverges.
"""

from wcl.theorem1 import prop12_divergence

r = prop12_divergence(3, 0.4, (10**3, 10**4, 10**5, 10**6))
print(r.summary())
print(f"{'N':>8} {'S_N':>10} {'P_N':>10} {'P tail bound':>14}")
for row in r.details["rows"]:
    print(f"{row['N']:>8} {row['S_N']:>10.4f} {row['P_N']:>10.6f} {row['P_tail_bound']:>14.3g}")

# %%
# The p-norms converge, but slowly: the tail decays like N^(1 - p alpha).
# The pairing sums grow like N^(1 - 2 alpha) and have no limit.

rows = r.details["rows"]
print("S grows by", rows[-1]["S_N"] / rows[0]["S_N"], "while P grows by", rows[-1]["P_N"] / rows[0]["P_N"])

# %%
# At p = 2 the admissible range of alpha is empty

try:
    prop12_divergence(2, 0.45)
except Exception as e:
    print(type(e).__name__, e)
