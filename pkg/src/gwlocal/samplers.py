"""Random generation of GW trees, Kesten prefixes and conditioned trees.

Single-draw functions (``sample_gw``, ``sample_kesten``, ...) take a numpy
Generator.  The ``*_batch`` functions draw many replicas at once with numpy
and are what the Monte Carlo diagnostics use; they consume the generator
in a fixed order so a block of draws depends only on its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (BudgetExceeded, InconsistentBudget, LatticeMiss,
                     RejectionBudgetExceeded, Supercritical, ZeroMassEvent)
from .events import EventSpec, card_upper_bound
from .exact import dwass_pmf, empty_la_probability, event_probability
from .offspring import OffspringDistribution, TiltedFamily, critical_theta
from .trees import NATURALS, Tree, as_degree_set, from_bfs

MU_TOL = 1e-9
CHUNK = 64


@dataclass(frozen=True)
class SamplerBudget:
    max_nodes: int = 1_000_000
    max_rejections: int = 10_000_000

    def __post_init__(self):
        if self.max_nodes < 1 or self.max_rejections < 1:
            raise ValueError("budgets must be positive")


DEFAULT_BUDGET = SamplerBudget()


@dataclass(frozen=True)
class KestenPrefix:
    """r_h of Kesten's tree together with the spine V_1 ... V_h."""

    tree: Tree
    h: int
    spine: tuple

    def __post_init__(self):
        if len(self.spine) != self.h:
            raise ValueError("spine length must equal h")
        u = ()
        for v in self.spine:
            if v < 1 or v > self.tree.degree(u):
                raise ValueError(f"spine step {v} is not a child of {u}")
            u = u + (v,)

    @property
    def spine_end(self) -> tuple:
        return tuple(self.spine)

    def to_json(self) -> dict:
        return {"tree": list(self.tree.degrees), "h": self.h, "spine": list(self.spine)}


def _check_subcritical(p: OffspringDistribution):
    if p.mean > 1 + MU_TOL:
        raise Supercritical(f"mean {p.mean} > 1")


# plain GW trees ------------------------------------------------------------

def sample_gw(p: OffspringDistribution, rng, budget: SamplerBudget = DEFAULT_BUDGET) -> Tree:
    """One GW(p) tree, degrees written in preorder while a slot counter
    tracks the vertices still to be visited."""
    word = []
    slots = 1
    while True:
        for k in p.sample(rng, CHUNK).tolist():
            word.append(k)
            slots += k - 1
            if slots == 0:
                return Tree(tuple(word))
            if len(word) >= budget.max_nodes:
                raise BudgetExceeded(
                    f"tree exceeded max_nodes={budget.max_nodes}", parameter="max_nodes")


def gw_words_batch(p: OffspringDistribution, rng, size: int, max_nodes: int):
    """``size`` GW draws cut off after ``max_nodes`` vertices.

    Returns (X, card): X[i, :card[i]] is the Lukasiewicz word of draw i, and
    card[i] = -1 when the tree has more than ``max_nodes`` vertices.
    """
    x = p.sample(rng, (size, max_nodes)).astype(np.int64)
    walk = np.cumsum(x - 1, axis=1)
    hit = walk == -1
    card = np.where(hit.any(axis=1), hit.argmax(axis=1) + 1, -1)
    return x, card


# conditioned trees -----------------------------------------------------------

def _event_mask(event: EventSpec, x, card):
    """Which rows of a gw_words_batch result lie in ``event``."""
    ok = card > 0
    if event.functional == "card":
        v = card
    else:
        cols = np.arange(x.shape[1])[None, :]
        inside = cols < card[:, None]
        in_a = event.A.mask(int(x.max()) + 1 if x.size else 1)[x]
        v = (in_a & inside).sum(axis=1)
    ok &= v >= event.n
    if event.window is not None:
        ok &= v < event.n + event.window
    return ok


def _certified_nodes(p, event, budget):
    if event.functional in ("height", "generation"):
        raise InconsistentBudget(
            f"event {event.label()} is not Card-bounded; a node budget would bias the law "
            "(use the generation-wise sampler)")
    bound = card_upper_bound(event, p)
    if bound is None:
        raise InconsistentBudget(
            f"no certified Card bound for {event.label()}; rejection with max_nodes would bias the law")
    if budget.max_nodes < bound:
        raise InconsistentBudget(
            f"{event.label()} needs max_nodes >= {bound}, got {budget.max_nodes}")
    return bound


def sample_conditioned_batch(p: OffspringDistribution, event: EventSpec, rng, size: int,
                             budget: SamplerBudget = DEFAULT_BUDGET, batch: int = 4096):
    """``size`` exact draws of tau given tau in event, by rejection.

    Only events with a certified Card bound B are accepted: draws with more
    than B vertices cannot lie in the event, so cutting them off is
    harmless.  Returns (list of Trees, number of rejections).
    """
    bound = _certified_nodes(p, event, budget)
    out = []
    rejected = 0
    while len(out) < size:
        x, card = gw_words_batch(p, rng, batch, bound)
        ok = np.nonzero(_event_mask(event, x, card))[0]
        need = size - len(out)
        take = ok[:need]
        if take.size < need:
            rejected += batch - take.size
        else:
            rejected += int(take[-1]) + 1 - take.size
        for i in take.tolist():
            out.append(Tree(tuple(x[i, :card[i]].tolist())))
        if rejected > budget.max_rejections:
            raise RejectionBudgetExceeded(
                f"more than {budget.max_rejections} rejections for {event.label()}",
                parameter="max_rejections")
    return out, rejected


def sample_conditioned(p: OffspringDistribution, event: EventSpec, rng,
                       budget: SamplerBudget = DEFAULT_BUDGET) -> Tree:
    """One draw of tau given tau in event (rejection from GW(p))."""
    return sample_conditioned_batch(p, event, rng, 1, budget, batch=256)[0][0]


# generation-wise engine (Kesten prefixes, height and generation events) ------

def _bfs_keys(owner, degs, size):
    """Group per-node BFS degrees by replica: a list of tuples, one per replica."""
    order = np.argsort(owner, kind="stable")
    counts = np.bincount(owner, minlength=size)
    return np.split(degs[order], np.cumsum(counts)[:-1]), counts


def restriction_batch(p: OffspringDistribution, h: int, rng, size: int,
                      kesten: bool = False, follow: int = 0,
                      budget: SamplerBudget = DEFAULT_BUDGET):
    """Simulate ``size`` trees generation by generation.

    Returns (keys, gen_sizes): keys[i] is the breadth-first degree sequence
    of r_h of replica i (generations < h) and gen_sizes[:, g] is the size of
    generation g for g = 0..max(h, follow).  With ``kesten=True`` the
    replicas are Kesten's tree: the spine vertex draws from p* and passes
    the spine to a uniform child.  Beyond generation h only sizes are kept.
    """
    if kesten:
        _check_subcritical(p)
        pstar = p.size_biased()
    last = max(h, follow)
    gen_sizes = np.zeros((size, last + 1), dtype=np.int64)
    owner = np.arange(size)
    spine = np.zeros(size, dtype=bool)
    if kesten:
        spine[:] = True
    deg_chunks, own_chunks = [], []
    for g in range(last + 1):
        gen_sizes[:, g] = np.bincount(owner, minlength=size)
        if g == last:
            break
        if owner.size > budget.max_nodes:
            raise BudgetExceeded(
                f"generation {g} has {owner.size} vertices over the block, above max_nodes",
                parameter="max_nodes")
        degs = p.sample(rng, owner.size).astype(np.int64)
        if kesten and spine.any():
            idx = np.nonzero(spine)[0]
            degs[idx] = pstar.sample(rng, idx.size)
        if g < h:
            deg_chunks.append(degs)
            own_chunks.append(owner)
        new_owner = np.repeat(owner, degs)
        new_spine = np.zeros(new_owner.size, dtype=bool)
        if kesten and spine.any():
            idx = np.nonzero(spine)[0]
            starts = np.cumsum(degs) - degs
            pick = (rng.random(idx.size) * degs[idx]).astype(np.int64)
            new_spine[starts[idx] + pick] = True
        owner, spine = new_owner, new_spine
    if h == 0:
        keys = [()] * size
    else:
        degs = np.concatenate(deg_chunks)
        own = np.concatenate(own_chunks)
        parts, _ = _bfs_keys(own, degs, size)
        keys = [tuple(a.tolist()) for a in parts]
    return keys, gen_sizes


def bfs_key_to_tree(key: tuple, h: int) -> Tree:
    """Rebuild r_h from the degrees of its vertices at generations < h."""
    n_total = 1 + sum(key)
    return from_bfs(tuple(key) + (0,) * (n_total - len(key)))


def sample_kesten(p: OffspringDistribution, h: int, rng) -> KestenPrefix:
    """r_h of Kesten's tree with its spine, built generation by generation."""
    if h < 0:
        raise ValueError("h must be >= 0")
    _check_subcritical(p)
    pstar = p.size_biased()
    degrees = []            # breadth-first, generations < h
    gen = [True]            # spine flags of the current generation
    spine = []
    for _ in range(h):
        nxt = []
        for is_spine in gen:
            k = int((pstar if is_spine else p).sample(rng))
            degrees.append(k)
            flags = [False] * k
            if is_spine:
                v = int(rng.integers(1, k + 1))
                flags[v - 1] = True
                spine.append(v)
            nxt.extend(flags)
        gen = nxt
    tree = from_bfs(tuple(degrees) + (0,) * len(gen))
    return KestenPrefix(tree, h, tuple(spine))


def sample_gw_restricted(p: OffspringDistribution, h: int, rng) -> Tree:
    """r_h of one GW(p) tree."""
    keys, _ = restriction_batch(p, h, rng, 1)
    return bfs_key_to_tree(keys[0], h)


def conditioned_restriction_batch(p: OffspringDistribution, event: EventSpec, h: int, rng,
                                  size: int, budget: SamplerBudget = DEFAULT_BUDGET):
    """Rejection draws of r_h(tau) given a height or generation event.

    Only generations up to the one deciding the event are simulated, so no
    node budget can bias the result; an overflow raises BudgetExceeded.
    Returns (list of BFS keys, rejections).
    """
    if event.functional == "height":
        follow = event.n if event.window is None else event.n + event.window
    elif event.functional == "generation":
        follow = event.n
    else:
        raise ValueError("use sample_conditioned_batch for Card and L_A events")
    if event_probability(p, event) <= 0:
        raise ZeroMassEvent(f"P({event.label()}) = 0")
    out = []
    rejected = 0
    batch = max(1024, size)
    while len(out) < size:
        keys, gs = restriction_batch(p, h, rng, batch, follow=follow, budget=budget)
        if event.functional == "height":
            ok = gs[:, event.n] > 0
            if event.window is not None:
                ok &= gs[:, event.n + event.window] == 0
        else:
            ok = gs[:, event.n] == event.alpha
        idx = np.nonzero(ok)[0][: size - len(out)]
        rejected += (batch if idx.size < size - len(out) else int(idx[-1]) + 1) - idx.size
        out.extend(keys[i] for i in idx.tolist())
        if rejected > budget.max_rejections:
            raise RejectionBudgetExceeded(
                f"more than {budget.max_rejections} rejections for {event.label()}",
                parameter="max_rejections")
    return out, rejected


# exact total-progeny sampler ---------------------------------------------------

def cycle_rotate(word) -> tuple:
    """The unique cyclic shift of ``word`` (sum of k - 1 equal to -1) that is a
    Lukasiewicz word: start right after the first minimum of the walk."""
    word = tuple(int(k) for k in word)
    s = np.cumsum(np.asarray(word) - 1)
    if s[-1] != -1:
        raise ValueError("increments must sum to -1")
    i = int(np.argmin(s)) + 1
    return word[i:] + word[:i]


def _progeny_law(p, n):
    """Distribution to draw from: p itself when critical, else the critical
    tilt with A = N (same law given Card = n)."""
    if abs(p.mean - 1) <= MU_TOL:
        return p
    theta = critical_theta(TiltedFamily(p, NATURALS))
    if not theta:
        return p
    return TiltedFamily(p, NATURALS).tilt(theta)


def sample_progeny_exact_batch(p: OffspringDistribution, n: int, rng, size: int,
                               budget: SamplerBudget = DEFAULT_BUDGET, batch: int = 4096):
    """``size`` exact draws of tau given Card(tau) = n via the cycle lemma."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = p.span
    if (n - 1) % d:
        raise LatticeMiss(f"Card={n} is off the lattice 1 + {d}N")
    if n <= 4096 and dwass_pmf(p, 1, n)[n] <= 0:
        raise ZeroMassEvent(f"P(Card = {n}) = 0 for this distribution")
    q = _progeny_law(p, n)
    rows = max(1, min(batch, 4_000_000 // n))
    out = []
    tries = 0
    while len(out) < size:
        x = q.sample(rng, (rows, n)).astype(np.int64)
        ok = np.nonzero(x.sum(axis=1) == n - 1)[0][: size - len(out)]
        tries += rows
        for i in ok.tolist():
            out.append(Tree(cycle_rotate(x[i])))
        if tries - len(out) > budget.max_rejections:
            raise RejectionBudgetExceeded(
                f"more than {budget.max_rejections} rejected walks", parameter="max_rejections")
    return out


def sample_progeny_exact(p: OffspringDistribution, n: int, rng,
                         budget: SamplerBudget = DEFAULT_BUDGET) -> Tree:
    return sample_progeny_exact_batch(p, n, rng, 1, budget, batch=64)[0]


# X_0 and X_A --------------------------------------------------------------------

def sample_X0(p: OffspringDistribution, rng) -> int:
    """X_0 = Z_1 + ... + Z_{N-1}, N geometric(p(0)), Z distributed as X - 1 given X >= 1."""
    p0 = p(0)
    if p0 <= 0:
        raise ZeroMassEvent("X_0 needs p(0) > 0")
    n = int(rng.geometric(p0))
    if n == 1 or p0 == 1:
        return 0
    z = p.probs[1:] / (1 - p0)
    cdf = np.cumsum(z)
    u = rng.random(n - 1)
    return int(np.searchsorted(cdf / cdf[-1], u, side="right").sum())


def estimate_q(p: OffspringDistribution, a, rng, m: int = 100_000,
               budget: SamplerBudget = DEFAULT_BUDGET):
    """Monte Carlo estimate of q = P(N <= T) with its standard error."""
    a = as_degree_set(a)
    hits = 0
    for _ in range(m):
        if _walk_until(p, a, rng, budget)[0]:
            hits += 1
    qhat = hits / m
    return qhat, math.sqrt(max(qhat * (1 - qhat), 0.0) / m)


def exact_q(p: OffspringDistribution, a) -> float:
    """q = P(N <= T) = P(L_A(tau) > 0)."""
    return 1.0 - empty_la_probability(p, a)


def _walk_until(p, a, rng, budget):
    """Run X_1, X_2, ... until N (first X in A) or T (walk hits -1).

    Returns (N <= T, 1 + sum_{i <= N} (X_i - 1)).
    """
    s = 0
    steps = 0
    while True:
        for k in p.sample(rng, CHUNK).tolist():
            steps += 1
            if k in a:
                return True, 1 + s + k - 1
            s += k - 1
            if s < 0:
                return False, None
        if steps > budget.max_nodes:
            raise BudgetExceeded("walk exceeded max_nodes steps", parameter="max_nodes")


def sample_XA(p: OffspringDistribution, a, rng, q: Optional[float] = None,
              budget: SamplerBudget = DEFAULT_BUDGET) -> int:
    """One draw of X_A, the offspring variable of the tree coding L_A(tau).

    Walks are retried until N <= T; X~ is then thinned binomially with
    success probability q (computed exactly when not supplied).
    """
    a = as_degree_set(a)
    if p.mass(a) <= 0:
        raise ZeroMassEvent("X_A needs p(A) > 0")
    if q is None:
        q = exact_q(p, a)
    for _ in range(budget.max_rejections):
        ok, xt = _walk_until(p, a, rng, budget)
        if ok:
            if 0 in a or q >= 1.0:
                return int(xt)
            return int(rng.binomial(xt, q))
    raise RejectionBudgetExceeded("no walk with N <= T within max_rejections",
                                  parameter="max_rejections")
