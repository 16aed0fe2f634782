"""The trees coding the leaves, or the vertices with out-degree in A.

``leaf_tree`` follows the left-branch / leaf-children construction and
``outdegree_tree`` the vertex-by-vertex construction through most recent
common ancestors.  Both return a :class:`LabeledMap` that remembers which
source vertex became which image vertex.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

from .errors import EmptyLA
from .events import EventSpec, card_upper_bound
from .exact import MAX_TREES, empty_la_probability, enumerate_trees, tree_probability
from .offspring import OffspringDistribution
from .trees import NATURALS, Tree, as_degree_set, mrca


@dataclass(frozen=True)
class LabeledMap:
    """Image tree plus the bijection source label -> image label."""

    source: Tree
    image: Tree
    correspondence: dict = field(compare=False)

    def __post_init__(self):
        targets = set(self.correspondence.values())
        if len(targets) != len(self.correspondence) or len(targets) != self.image.card:
            raise ValueError("correspondence is not a bijection onto the image")


def _freeze(children: list) -> tuple:
    """Preorder degrees of the tree given by child lists rooted at 0, and the
    Neveu label of every node."""
    degrees = []
    label = [None] * len(children)
    label[0] = ()
    stack = [0]
    while stack:
        i = stack.pop()
        degrees.append(len(children[i]))
        for j, c in enumerate(children[i], start=1):
            label[c] = label[i] + (j,)
        stack.extend(reversed(children[i]))
    return Tree(tuple(degrees)), label


def _first_children(t: Tree) -> list:
    """Preorder index of each vertex's children."""
    ends = t.subtree_ends
    out = []
    for i, k in enumerate(t.degrees):
        kids = []
        j = i + 1
        for _ in range(k):
            kids.append(j)
            j = ends[j]
        out.append(kids)
    return out


def leaf_tree(t: Tree) -> LabeledMap:
    """Tree on the leaves of ``t``.

    The root is the left leaf G(root); the children of a leaf v are the
    left leaves G(ui), 1 < i <= k_u, of the children of its left ancestors
    u, ordered by (u, i).  A leaf is its own left leaf.
    """
    n = t.card
    kids = _first_children(t)
    g = [0] * n
    for i in range(n - 1, -1, -1):
        g[i] = i if t.degrees[i] == 0 else g[i + 1]
    parent = [-1] * n
    for i, ks in enumerate(kids):
        for c in ks:
            parent[c] = i
    leaves = [i for i in range(n) if t.degrees[i] == 0]
    node_of = {v: j for j, v in enumerate(leaves)}
    children = [[] for _ in leaves]
    for v in leaves:
        # left ancestors of v: climb while the current vertex is a first child
        anc = []
        u = v
        while parent[u] >= 0 and kids[parent[u]][0] == u:
            u = parent[u]
            anc.append(u)
        for a in reversed(anc):  # shallower ancestors are lexicographically smaller
            for c in kids[a][1:]:
                children[node_of[v]].append(node_of[g[c]])
    root = node_of[g[0]]
    # relabel so the root is node 0
    order = [root] + [j for j in range(len(leaves)) if j != root]
    pos = {j: r for r, j in enumerate(order)}
    image, label = _freeze([[pos[c] for c in children[j]] for j in order])
    labels = t.labels
    corr = {labels[leaves[j]]: label[pos[j]] for j in range(len(leaves))}
    return LabeledMap(t, image, corr)


def outdegree_tree(t: Tree, a) -> LabeledMap:
    """Tree on the vertices of ``t`` whose out-degree lies in ``a``.

    Listing them in preorder u^1 < ... < u^n, u^1 becomes the root and u^k
    becomes the new rightmost child of the image of v, the first vertex of
    the set inside the subtree rooted at the MRCA of u^(k-1) and u^k.
    """
    a = as_degree_set(a)
    idx = [i for i, k in enumerate(t.degrees) if k in a]
    if not idx:
        raise EmptyLA(f"no vertex with out-degree in {a!r}")
    labels = t.labels
    node = {idx[0]: 0}
    children = [[]]
    for prev, cur in zip(idx, idx[1:]):
        m = t.index_of(mrca((labels[prev], labels[cur])))
        v = idx[bisect.bisect_left(idx, m)]
        node[cur] = len(children)
        children.append([])
        children[node[v]].append(node[cur])
    image, label = _freeze(children)
    corr = {labels[i]: label[j] for i, j in node.items()}
    return LabeledMap(t, image, corr)


@dataclass
class PushforwardLaw:
    """Law of the coding tree given L_A(tau) > 0, from sources with Card <= card_max.

    ``complete_to`` is the largest image size whose probabilities are exact:
    every source with that many A-vertices has Card <= card_max.
    """

    probs: dict
    q: float
    card_max: int
    complete_to: int
    deficit: float

    def exact_part(self) -> dict:
        return {t: v for t, v in self.probs.items() if t.card <= self.complete_to}


def _complete_to(p, a, card_max):
    c = 0
    while True:
        bound = card_upper_bound(EventSpec("outdeg", 1, c + 1, a), p)
        if bound is None or bound > card_max:
            return c
        c += 1
        if c > card_max:
            return c


def pushforward_law(p: OffspringDistribution, a, card_max: int,
                    max_trees: int = MAX_TREES) -> PushforwardLaw:
    """Exact law of outdegree_tree(tau, a) given L_A(tau) > 0, over sources
    with Card <= card_max."""
    a = as_degree_set(a)
    q = 1.0 - empty_la_probability(p, a)
    law = {}
    seen = 0.0
    for t, pr in enumerate_trees(p, card_max, 1, max_trees):
        seen += pr
        if pr <= 0 or t.count_outdegree(a) == 0:
            continue
        img = outdegree_tree(t, a).image
        law[img] = law.get(img, 0.0) + pr / q
    deficit = max(0.0, 1.0 - math.fsum(law.values()))
    return PushforwardLaw(law, q, card_max, _complete_to(p, a, card_max), deficit)


def gw_law_on(xa: OffspringDistribution, trees) -> dict:
    """P(GW(xa) = t) for each t, to compare with a pushforward law."""
    return {t: tree_probability(xa, t) for t in trees}


def root_degree_law(law: dict, kmax: int) -> list:
    """P(k_root = j) for j <= kmax from a (partial) law on trees."""
    out = [0.0] * (kmax + 1)
    for t, v in law.items():
        k = t.degrees[0]
        if k <= kmax:
            out[k] += v
    return out
