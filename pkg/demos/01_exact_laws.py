"""Exact laws of small Galton-Watson trees.

Run with ``python demos/01_exact_laws.py``.  Nothing here is random: every
number is computed from the offspring law alone.
"""

import numpy as np

from gwlocal import OffspringDistribution, Tree
from gwlocal.exact import dwass_pmf, enumerate_trees, height_laws, tree_probability

# Two critical offspring laws: binary (0 or 2 children, each with probability
# 1/2) and geometric with P(k) = 2^-(k+1).
binary = OffspringDistribution.binary(0.5)
geometric = OffspringDistribution.geometric_mixture(0.5)

# A tree is stored as its preorder degree sequence (the Lukasiewicz word).
t = Tree((2, 1, 0, 0))
print("tree", t.to_parens(), "card", t.card, "height", t.height)
print("labels", t.labels)
print("P(tau = t) under geometric:", tree_probability(geometric, t), "= 2^-7")

# The law of the total progeny comes from a random-walk identity, computed by
# repeated convolution.  Summing tree probabilities by size gives the same
# numbers, which is a good check on both.
law = dwass_pmf(geometric, 1, 9)
by_size = np.zeros(10)
for tree, pr in enumerate_trees(geometric, 9):
    by_size[tree.card] += pr
print("\nn  convolution        enumeration")
for n in range(1, 10):
    print(f"{n}  {law[n]:.15f}  {by_size[n]:.15f}")

# For the binary law only odd sizes can occur.
print("\nbinary P(Card = n), n = 1..9:", [round(dwass_pmf(binary, 1, 9)[n], 6) for n in range(1, 10)])

# Height tails come from iterating the generating function.  For the
# geometric law P(H >= n) = 1 / (n + 1) exactly.
tail, pmf = height_laws(geometric, 1000)
for n in (1, 10, 100, 1000):
    print(f"P(H >= {n}) = {tail[n]:.10f}   1/(n+1) = {1 / (n + 1):.10f}")
