"""Exponential tilting, and a condition that can fail.

Tilting p(k) by theta^k for k in A leaves the conditional law given L_A = n
unchanged, so a subcritical law can be traded for a critical one.  Separately,
conditioning a geometric tree on a large generation size only behaves well
while that size grows slower than n^2.
"""

import math

from gwlocal import OffspringDistribution, TiltedFamily, critical_theta
from gwlocal.convergence import generation_ratio_report, tilt_invariance_check

sub = OffspringDistribution.binary(0.6)
fam = TiltedFamily(sub, "N")
theta = critical_theta(fam)
print(f"critical theta {theta:.15f}, sqrt(1.5) = {math.sqrt(1.5):.15f}")
print("tilted law:", fam.tilt(theta).probs, "mean", fam.tilt(theta).mean)

for a in ({0}, "N", {2}):
    rep = tilt_invariance_check(sub, a, [0.8, 1.1, theta], 3, card_max=11)
    print(f"A = {a}: max discrepancy over thetas {rep.discrepancy:.2e} ({'complete' if rep.complete else 'partial'})")

# Generation sizes: Z_n given Z_n = alpha_n, for alpha_n = n (fine) and
# alpha_n = n^3 (too large, the ratio collapses).
for name, alpha in (("n", lambda n: n), ("n^3", lambda n: n ** 3)):
    rep = generation_ratio_report(0.5, [10, 100, 1000], alpha, name=name)
    print(f"alpha_n = {name}:", [f"{r[1]:.4g}" for r in rep.rows])
