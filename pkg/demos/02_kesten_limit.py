"""Conditioned trees look like Kesten's tree near the root.

Conditioning a critical tree to be large (many nodes, many leaves, great
height) makes the first few generations converge in law to the size-biased
tree with one infinite spine.  We measure that with total variation at a
fixed height h.
"""

import numpy as np

from gwlocal import EventSpec, OffspringDistribution
from gwlocal.convergence import kesten_fidelity, ratio_sequence, tv_at_height
from gwlocal.exact import kesten_law
from gwlocal.samplers import sample_kesten

binary = OffspringDistribution.binary(0.5)
geometric = OffspringDistribution.geometric_mixture(0.5)

# The limit law of the first two generations.  Every shape carries weight
# (size of generation 2) times its GW probability.
for t, pr in sorted(kesten_law(binary, 2).items(), key=lambda kv: -kv[1]):
    print(f"{t.to_parens():<24} {pr:.4f}")

# Exact TV at h = 2 between tau given Card = 2n+1 and the limit.  For n >= 2
# it works out to 3/(4n-2).
print("\n n   tv(Card = 2n+1)   3/(4n-2)")
for n in range(1, 11):
    tv = tv_at_height(binary, EventSpec.card_eq(2 * n + 1), 2).tv
    print(f"{n:2d}   {tv:.6f}          {3 / (4 * n - 2):.6f}")

# Conditioning on the leaf count gives the same picture, shifted.
print("\nleaves = n:", [round(tv_at_height(binary, EventSpec.leaves_eq(n), 2).tv, 4) for n in range(1, 9)])

# The probability ratios P(A_{n+1}) / P(A_n) tend to the mean, here 1.
rep = ratio_sequence(geometric, EventSpec.height_ge(1), [10, 100, 1000])
print("\nheight ratios (geometric):", [round(r[1], 6) for r in rep.rows])

# A Kesten prefix: the spine is the path of size-biased nodes.
rng = np.random.Generator(np.random.Philox(5))
prefix = sample_kesten(geometric, 3, rng)
print("\nKesten prefix of height 3:", prefix.tree.to_parens(), "spine", prefix.spine)

# Monte Carlo fidelity of the Kesten sampler.  With a law of many small atoms
# the plug-in TV estimate is biased upwards, so read the binary value as the
# sampler check and the geometric one as an estimator artifact.
for name, p in (("binary", binary), ("geometric", geometric)):
    rep = kesten_fidelity(p, 2, 100_000, seed=1)
    print(f"{name}: plug-in TV {rep.tv:.4f} +- {rep.stderr:.4f}, unseen Kesten mass {rep.unobserved:.4f}")
