"""Trees built on the leaves, or on the nodes whose out-degree lies in A.

The nodes of a GW tree with out-degree in A can be rearranged into a new
tree, and that tree is again a GW tree, critical when the original is.
"""

import numpy as np

from gwlocal import OffspringDistribution, Tree
from gwlocal.exact import xa_pmf, leaf_offspring_pmf
from gwlocal.samplers import sample_X0
from gwlocal.transforms import gw_law_on, leaf_tree, outdegree_tree, pushforward_law

t = Tree((2, 2, 0, 0, 2, 0, 0))
print("source", t.to_parens())
m = leaf_tree(t)
print("leaf tree", m.image.to_parens())
for src, img in m.correspondence.items():
    print(f"  leaf {src} -> {img}")

# The same idea for an arbitrary degree set.
for a in ({0}, {2}, "N"):
    img = outdegree_tree(t, a).image
    print(f"A = {a}: image {img.to_parens()}, Card {img.card} = L_A {t.count_outdegree(a)}")

# The two leaf constructions agree in law but not tree by tree.
print("leaf_tree vs outdegree_tree({0}):", leaf_tree(t).image.to_parens(),
      outdegree_tree(t, {0}).image.to_parens())

# The offspring law of the coding tree.  For the binary law X_0 is geometric.
binary = OffspringDistribution.binary(0.5)
x0 = leaf_offspring_pmf(binary)
print("\nP(X_0 = j), j = 0..5:", np.round(x0.probs[:6], 6))
rng = np.random.Generator(np.random.Philox(3))
draws = [sample_X0(binary, rng) for _ in range(20_000)]
print("simulated mean of X_0:", np.mean(draws))

# Exact pushforward of the binary law through the leaf construction,
# compared with GW(X_0) on small images.
law = pushforward_law(binary, {0}, card_max=9)
small = {s: v for s, v in law.exact_part().items() if s.card <= 4}
ref = gw_law_on(x0, small)
for s in sorted(small, key=lambda s: (s.card, s.degrees)):
    print(f"{s.to_parens():<18} pushforward {small[s]:.8f}  GW(X_0) {ref[s]:.8f}")

# Criticality survives for other degree sets too.
p = OffspringDistribution.from_pmf([0.6, 0.0, 0.2, 0.2])
for a in ({0}, {2}, {3}, {0, 1}):
    dist, q, _ = xa_pmf(p, a)
    print(f"A = {sorted(a)}: q = {q:.6f}, mean X_A = {dist.mean:.12f}")
