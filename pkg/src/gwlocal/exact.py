"""Exact (non Monte Carlo) probabilities for GW trees and Kesten's tree.

Everything here is computed from the working offspring pmf: trees laws by
products, progeny laws by Dwass' formula, height laws by iterating the
generating function, and conditioned restriction laws by exhaustive
enumeration where the event allows it.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from scipy import stats

from .errors import BudgetExceeded, Supercritical, ZeroMassEvent
from .events import EventSpec, card_upper_bound, snap_to_lattice
from .offspring import OffspringDistribution
from .trees import DegreeSet, RestrictedTree, Tree, as_degree_set

MAX_TREES = 20_000
MU_TOL = 1e-9


@dataclass
class PMFVector:
    """Probabilities of the integers ``offset, offset+1, ...``.

    ``deficit`` is the mass known to lie outside the stored range.
    """

    offset: int
    probs: np.ndarray
    deficit: float = 0.0

    def __getitem__(self, n: int) -> float:
        i = n - self.offset
        if 0 <= i < self.probs.size:
            return float(self.probs[i])
        return 0.0

    def __len__(self):
        return self.probs.size

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.probs.size)

    @property
    def total(self) -> float:
        return math.fsum(self.probs)

    def window(self, n: int, width: Optional[int]) -> float:
        """Mass of [n, n + width); width None means up to the stored end."""
        lo = max(n - self.offset, 0)
        hi = self.probs.size if width is None else max(min(n + width - self.offset, self.probs.size), 0)
        return math.fsum(self.probs[lo:hi]) if hi > lo else 0.0

    def to_csv(self, header: Optional[str] = None) -> str:
        buf = io.StringIO()
        if header:
            buf.write(f"# {header}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "probability"])
        for i, v in zip(self.indices, self.probs):
            w.writerow([int(i), repr(float(v))])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"offset": self.offset, "probs": [float(v) for v in self.probs],
                "deficit": self.deficit}


def _accumulate_shifted(a: np.ndarray, p: np.ndarray, length: int) -> np.ndarray:
    """(a * p)[0:length] with Neumaier-compensated summation over the shifts."""
    s = np.zeros(length)
    comp = np.zeros(length)
    for k in np.nonzero(p)[0]:
        if k >= length:
            break
        m = min(a.size, length - k)
        term = np.zeros(length)
        term[k:k + m] = p[k] * a[:m]
        t = s + term
        big = np.abs(s) >= np.abs(term)
        comp += np.where(big, (s - t) + term, (term - t) + s)
        s = t
    return s + comp


def convolution_powers(p: OffspringDistribution, n_max: int, width: int) -> Iterator[np.ndarray]:
    """Yield the laws of X_1 + ... + X_n on {0..width-1}, for n = 1..n_max."""
    probs = np.asarray(p.probs)
    cur = np.zeros(width)
    cur[0] = 1.0
    for _ in range(n_max):
        cur = _accumulate_shifted(cur, probs, width)
        yield cur


def dwass_pmf(p: OffspringDistribution, k: int, n_max: int) -> PMFVector:
    """Law of the total progeny of k independent GW trees on [k, n_max].

    P(W_1 + ... + W_k = n) = (k/n) P(X_1 + ... + X_n = n - k).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if n_max < k:
        return PMFVector(k, np.zeros(0), 1.0)
    width = n_max - k + 1
    out = np.zeros(width)
    for n, conv in enumerate(convolution_powers(p, n_max, width), start=1):
        if n >= k:
            out[n - k] = k / n * conv[n - k]
    return PMFVector(k, out, max(0.0, 1.0 - math.fsum(out)))


def tree_probability(p: OffspringDistribution, t: Tree) -> float:
    return math.prod(p(k) for k in t.degrees)


def restriction_probability(p: OffspringDistribution, t, h: Optional[int] = None) -> float:
    """P(r_h(tau) = t): the product of p(k_u) over vertices of generation < h."""
    t, h = _unpack(t, h)
    return math.prod(p(k) for k, d in zip(t.degrees, t.depths) if d < h)


def kesten_restriction_probability(p: OffspringDistribution, t, h: Optional[int] = None) -> float:
    """P(r_h(tau*) = t) = G_h(t) mu^-h P(r_h(tau) = t)."""
    t, h = _unpack(t, h)
    mu = p.mean
    if mu > 1 + MU_TOL:
        raise Supercritical(f"Kesten's tree needs mean <= 1, got {mu}")
    z = t.generation_size(h)
    if z == 0:
        return 0.0
    return z * mu ** -h * restriction_probability(p, t, h)


def _unpack(t, h):
    if isinstance(t, RestrictedTree):
        return t.tree, t.height_cap if h is None else h
    if h is None:
        raise ValueError("height cap h is required for a bare Tree")
    if t.height > h:
        raise ValueError(f"tree of height {t.height} is not in T^({h})")
    return t, h


# height -----------------------------------------------------------------

def height_laws(p: OffspringDistribution, n_max: int):
    """(tail, pmf) with tail[n] = P(H >= n) and pmf[n] = P(H = n), n = 0..n_max.

    tail[n] = 1 - phi_n(0) is iterated as t -> 1 - phi(1 - t) so that
    exponentially small subcritical tails keep full relative precision.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    tails = np.empty(n_max + 2)
    tails[0] = 1.0
    for n in range(1, n_max + 2):
        tails[n] = p.survival_step(tails[n - 1])
    pmf = tails[:-1] - tails[1:]
    return PMFVector(0, tails[:-1].copy(), float(tails[-1])), PMFVector(0, pmf, float(tails[-1]))


# generation sizes -------------------------------------------------------

def geometric_generation_pmf(q: float, n: int, k: int) -> float:
    """P(G_n = k) for p(0) = 1-q, p(k) = q^2 (1-q)^(k-1): (nc)^(k-1)/(nc+1)^(k+1)."""
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    if n < 0 or k < 0:
        raise ValueError("n and k must be >= 0")
    nc = n * (1 - q) / q
    if k == 0:
        return nc / (nc + 1)
    if nc == 0:
        return 1.0 if k == 1 else 0.0
    return math.exp(-2 * math.log1p(nc) - (k - 1) * math.log1p(1 / nc))


def geometric_generation_ratio(q: float, n: int, alpha: int, j: int = 1) -> float:
    """P(G_{n-j} = alpha) / P(G_n = alpha) from the closed form, in log space."""
    if j > n:
        raise ValueError("j must be <= n")
    c = (1 - q) / q

    def logp(m):
        mc = m * c
        if mc == 0:
            return 0.0 if alpha == 1 else -math.inf
        return -2 * math.log1p(mc) - (alpha - 1) * math.log1p(1 / mc)

    return math.exp(logp(n - j) - logp(n))


def generation_pmf(p: OffspringDistribution, n: int, kmax: int) -> np.ndarray:
    """P(G_n = k) for k = 0..kmax by composing truncated power series.

    phi_n = phi o phi_{n-1}; the s^k coefficients for k <= kmax only depend
    on the same coefficients of phi_{n-1}, so truncation is exact.
    """
    series = np.zeros(kmax + 1)
    series[min(1, kmax)] = 1.0 if kmax >= 1 else 0.0
    if kmax == 0:
        return np.array([1.0 if n == 0 else p.gf_iterate(n, 0.0)])
    for _ in range(n):
        acc = np.zeros(kmax + 1)
        power = np.zeros(kmax + 1)
        power[0] = 1.0
        for k in range(p.probs.size):
            if p.probs[k] > 0:
                acc += p.probs[k] * power
            power = np.convolve(power, series)[: kmax + 1]
        series = acc
    return series


def _iid_sum_pmf(single: np.ndarray, z: int, kmax: int) -> np.ndarray:
    out = np.zeros(kmax + 1)
    out[0] = 1.0
    for _ in range(z):
        out = np.convolve(out, single)[: kmax + 1]
    return out


def geometric_sum_pmf(q: float, m: int, z: int, alpha: int) -> float:
    """P(G_m^(1) + ... + G_m^(z) = alpha) for z independent geometric-mixture trees."""
    if z == 0:
        return 1.0 if alpha == 0 else 0.0
    if m == 0:
        return 1.0 if alpha == z else 0.0
    mc = m * (1 - q) / q
    a = mc / (mc + 1)      # P(G_m = 0), also the geometric ratio given G_m >= 1
    if alpha == 0:
        return a ** z
    total = 0.0
    for j in range(1, min(z, alpha) + 1):
        lg = (math.lgamma(z + 1) - math.lgamma(j + 1) - math.lgamma(z - j + 1)
              + j * math.log1p(-a) + (z - j) * math.log(a)
              + math.lgamma(alpha) - math.lgamma(j) - math.lgamma(alpha - j + 1)
              + j * math.log1p(-a) + (alpha - j) * math.log(a))
        total += math.exp(lg)
    return total


# enumeration ------------------------------------------------------------

def count_trees(support, card_min: int, card_max: int) -> int:
    """Number of trees with degrees in ``support`` and card in [card_min, card_max].

    Uses #trees of size n = [x^(n-1)] S(x)^n / n (cycle lemma).
    """
    support = sorted(set(support))
    total = 0
    for n in range(max(card_min, 1), card_max + 1):
        poly = [0] * n
        poly[0] = 1
        base = [0] * n
        for k in support:
            if k < n:
                base[k] += 1
        for _ in range(n):
            new = [0] * n
            for i, a in enumerate(poly):
                if a:
                    for j, b in enumerate(base[: n - i]):
                        if b:
                            new[i + j] += a * b
            poly = new
        total += poly[n - 1] // n
    return total


def iter_words(p: OffspringDistribution, card_max: int, card_min: int = 1):
    """Yield (degree tuple, probability) for every tree with card in range.

    Degrees run over supp(p); iterative backtracking in preorder.
    """
    support = p.support
    pvals = [p(k) for k in support]
    m = len(support)
    word, ci = [], []
    prob, slots = [1.0], [1]
    i = 0
    while True:
        if i < m:
            k = support[i]
            s_new = slots[-1] - 1 + k
            length = len(word) + 1
            if length + s_new <= card_max:
                if s_new == 0:
                    if length >= card_min:
                        yield tuple(word) + (k,), prob[-1] * pvals[i]
                    i += 1
                else:
                    word.append(k)
                    ci.append(i)
                    prob.append(prob[-1] * pvals[i])
                    slots.append(s_new)
                    i = 0
                continue
            i = m  # larger degrees only need more room
        if not word:
            return
        word.pop()
        prob.pop()
        slots.pop()
        i = ci.pop() + 1


def enumerate_trees(p: OffspringDistribution, card_max: int, card_min: int = 1,
                    max_trees: int = MAX_TREES):
    """Stream (Tree, P(tau = t)) for every tree with card_min <= Card <= card_max.

    Refuses up front (BudgetExceeded) when more than ``max_trees`` trees
    would be produced.
    """
    n = count_trees(p.support, card_min, card_max)
    if n > max_trees:
        raise BudgetExceeded(
            f"{n} trees with Card in [{card_min}, {card_max}] exceed max_trees={max_trees}",
            parameter="max_trees")
    for word, prob in iter_words(p, card_max, card_min):
        yield Tree(word), prob


def count_restricted(support, h: int) -> int:
    """|T^(h)| for trees whose vertices below generation h have degrees in support."""
    n = 1
    for _ in range(h):
        n = sum(n ** k for k in support)
        if n > 10 ** 18:
            return n
    return n


def enumerate_restricted(p: OffspringDistribution, h: int, max_trees: int = MAX_TREES):
    """List of (Tree, P(r_h(tau) = t)) over all of T^(h) with positive mass."""
    n = count_restricted(p.support, h)
    if n > max_trees:
        raise BudgetExceeded(
            f"T^({h}) has {n} trees for this support, above max_trees={max_trees}",
            parameter="max_trees")
    level = [((0,), 1.0)]
    for _ in range(h):
        nxt = []
        for k in p.support:
            pk = p(k)
            for combo in itertools.product(level, repeat=k):
                word = (k,) + tuple(itertools.chain.from_iterable(c[0] for c in combo))
                nxt.append((word, pk * math.prod(c[1] for c in combo)))
        level = nxt
    return [(Tree(w), pr) for w, pr in level]


def kesten_law(p: OffspringDistribution, h: int, max_trees: int = MAX_TREES) -> dict:
    """The full law of r_h(tau*) as a dict, for finite T^(h)."""
    out = {}
    for t, _ in enumerate_restricted(p, h, max_trees):
        v = kesten_restriction_probability(p, t, h)
        if v > 0:
            out[t] = v
    return out


# offspring law of the tree coding L_A -------------------------------------

def empty_la_probability(p: OffspringDistribution, a, tol: float = 1e-16) -> float:
    """P(L_A(tau) = 0), the least fixed point of r = sum_{k not in A} p(k) r^k."""
    a = as_degree_set(a)
    if 0 in a:
        return 0.0
    mask = ~a.mask(p.probs.size)
    coeffs = np.where(mask, p.probs, 0.0)[::-1].tolist()
    r = 0.0
    for _ in range(100_000):
        acc = 0.0
        for c in coeffs:
            acc = acc * r + c
        if abs(acc - r) <= tol:
            return acc
        r = acc
    return r


def xa_pmf(p: OffspringDistribution, a, tol: float = 1e-16, max_len: int = 1_000_000):
    """Exact law of X_A, the offspring law of the tree coding L_A(tau).

    With X_i i.i.d. p, N the first index with X_N in A and T the first
    hitting time of -1 by the walk sum(X_i - 1): X~ is 1 + S_N given N <= T,
    and X_A is a binomial(X~, q) thinning with q = P(N <= T).  The occupation
    measure of the walk killed at N or T gives the law of X~ directly.

    Returns (OffspringDistribution of X_A, q, law of X~ as an array).
    """
    a = as_degree_set(a)
    probs = np.asarray(p.probs)
    in_a = a.mask(probs.size)
    p_in = np.where(in_a, probs, 0.0)
    p_out = np.where(in_a, 0.0, probs)
    f = np.array([1.0])          # walk position after i steps, still alive
    occ = np.zeros(1)
    while f.sum() > tol:
        if occ.size < f.size:
            occ = np.pad(occ, (0, f.size - occ.size))
        occ[: f.size] += f
        # step X - 1 with X outside A; position h -> h + k - 1, drop h + k - 1 < 0
        nxt = np.convolve(f, p_out)
        f = nxt[1:]
        nz = np.nonzero(f > 0)[0]
        f = f[: nz[-1] + 1] if nz.size else np.zeros(0)
        if f.size > max_len:
            raise BudgetExceeded("walk support grew beyond max_len", parameter="max_len")
    xtilde = np.convolve(occ, p_in)   # 1 + h + (k - 1) = h + k
    q = math.fsum(xtilde)
    xtilde = xtilde / q
    nz = np.nonzero(xtilde > 0)[0]
    xtilde = xtilde[: nz[-1] + 1]
    if q >= 1 - 1e-15:
        law = xtilde
    else:
        m = np.arange(xtilde.size)
        law = np.zeros(xtilde.size)
        for j in range(xtilde.size):
            law[j] = math.fsum(xtilde * stats.binom.pmf(j, m, q))
    dist = OffspringDistribution(law / math.fsum(law), name="pmf", eps_mass=1e-9)
    return dist, q, xtilde


def leaf_offspring_pmf(p: OffspringDistribution, tol: float = 1e-16) -> OffspringDistribution:
    """Law of X_0 = Z_1 + ... + Z_{N-1}: N geometric(p(0)) on {1, 2, ...},
    Z_k distributed as X - 1 given X >= 1."""
    p0 = p(0)
    z = np.asarray(p.probs[1:]) / (1 - p0)     # law of X - 1 given X >= 1
    out = np.zeros(1)
    power = np.array([1.0])
    weight = p0                                # P(N - 1 = 0)
    m = 0
    while weight > tol:
        if out.size < power.size:
            out = np.pad(out, (0, power.size - out.size))
        out[: power.size] += weight * power
        power = np.convolve(power, z)
        nz = np.nonzero(power > 1e-300)[0]
        power = power[: nz[-1] + 1]
        m += 1
        weight = p0 * (1 - p0) ** m
    return OffspringDistribution(out / math.fsum(out), eps_mass=1e-9)


# event probabilities -----------------------------------------------------

def functional_pmf(p: OffspringDistribution, family: EventSpec, n_max: int) -> PMFVector:
    """Law of A(tau) on 0..n_max for the family's functional.

    Height and Card come straight from height_laws and Dwass; L_A is the
    total progeny of GW(X_A) thinned by q = P(L_A > 0).
    """
    f = family.functional
    if f == "height":
        return height_laws(p, n_max)[1]
    if f == "card":
        d = dwass_pmf(p, 1, n_max)
        return PMFVector(0, np.concatenate([[0.0], d.probs]), d.deficit)
    if f == "outdeg":
        a = family.A
        if not any(k not in a for k in p.support):
            return functional_pmf(p, EventSpec("card", 1), n_max)
        xa, q, _ = xa_pmf(p, a)
        d = dwass_pmf(xa, 1, n_max)
        probs = np.concatenate([[1.0 - q], q * d.probs])
        return PMFVector(0, probs, max(0.0, 1.0 - math.fsum(probs)))
    raise ValueError("use generation_probability for generation events")


def generation_probability(p: OffspringDistribution, n: int, alpha: int) -> float:
    if p.name == "geometric_mixture":
        return geometric_generation_pmf(p.params["q"], n, alpha)
    return float(generation_pmf(p, n, alpha)[alpha])


def event_probability(p: OffspringDistribution, event: EventSpec) -> float:
    if event.functional == "generation":
        return generation_probability(p, event.n, event.alpha)
    if event.functional == "height":
        top = event.n if event.window is None else event.n + event.window
        tail, _ = height_laws(p, top)
        if event.window is None:
            return tail[event.n]
        return max(tail[event.n] - tail[top], 0.0) if top <= tail.offset + len(tail) - 1 else tail[event.n]
    if event.window is None:
        law = functional_pmf(p, event, max(event.n - 1, 0))
        return max(0.0, 1.0 - law.window(0, event.n))
    law = functional_pmf(p, event, event.n + event.window - 1)
    return law.window(event.n, event.window)


# conditioned laws ------------------------------------------------------------

@dataclass
class ConditionedLaw:
    """A conditional law on trees, exact up to ``deficit``.

    ``deficit`` bounds the relative conditional mass that was not enumerated
    (0 when the event is covered exactly).
    """

    probs: dict
    event: EventSpec
    event_mass: float
    deficit: float = 0.0
    h: Optional[int] = None
    notes: list = field(default_factory=list)

    @property
    def total(self) -> float:
        return math.fsum(self.probs.values())

    def top(self, n: int = 20):
        return sorted(self.probs.items(), key=lambda kv: (-kv[1], kv[0].degrees))[:n]


def _deficit_bound(p, card_max):
    """P(Card(tau) > card_max)."""
    d = dwass_pmf(p, 1, card_max)
    return max(0.0, 1.0 - math.fsum(d.probs))


def conditioned_tree_law(p: OffspringDistribution, event: EventSpec,
                         card_max: Optional[int] = None, max_trees: int = MAX_TREES,
                         max_deficit: float = 1e-12) -> ConditionedLaw:
    """Law of tau given tau in event, by enumeration.

    Exact when the event forces a bound on Card; otherwise the enumeration
    up to ``card_max`` is accepted only if the un-enumerated mass, bounded
    by P(Card > card_max), is below ``max_deficit`` relative to the event.
    """
    event, note = snap_to_lattice(event, p.span)
    notes = [note] if note else []
    if event.functional == "outdeg" and event.n >= 1 and p.mass(event.A) <= 0:
        raise ZeroMassEvent(f"p puts no mass on {event.A!r}, so {event.label()} is impossible")
    bound = card_upper_bound(event, p)
    if bound is not None and (card_max is None or card_max >= bound):
        limit, exact = bound, True
    elif card_max is None:
        raise BudgetExceeded(
            f"event {event.label()} does not bound Card; pass card_max", parameter="card_max")
    else:
        limit, exact = card_max, False
    lo = event.n if event.functional == "card" else 1
    law = {}
    for t, pr in enumerate_trees(p, limit, lo, max_trees):
        if pr > 0 and event.contains(t):
            law[t] = law.get(t, 0.0) + pr
    mass = math.fsum(law.values())
    if mass <= 0:
        raise ZeroMassEvent(f"event {event.label()} has no mass among trees with Card <= {limit}")
    deficit = 0.0
    if not exact:
        deficit = _deficit_bound(p, limit) / mass
        if deficit > max_deficit:
            raise BudgetExceeded(
                f"un-enumerated mass bound {deficit:.3g} (relative) exceeds {max_deficit:.3g}; "
                f"raise card_max above {limit}", parameter="card_max")
        notes.append(f"enumerated Card <= {limit}; relative deficit <= {deficit:.3g}")
    return ConditionedLaw({t: v / mass for t, v in law.items()}, event, mass, deficit, None, notes)


def _height_ge_given(t: Tree, z: int, m: int, h: int, tails) -> float:
    """P(H(tau) >= m | r_h(tau) = t) for a tree t in T^(h) with z vertices at h."""
    if m <= h:
        return 1.0 if t.height >= m else 0.0
    if z == 0:
        return 0.0
    tail = tails[m - h]
    return -math.expm1(z * math.log1p(-tail)) if tail < 1 else 1.0


def conditioned_restriction_law(p: OffspringDistribution, event: EventSpec, h: int,
                                card_max: Optional[int] = None, max_trees: int = MAX_TREES,
                                max_deficit: float = 1e-12) -> ConditionedLaw:
    """Law of r_h(tau) given tau in event.

    Height and generation events are handled in closed form over T^(h)
    (which must be finite); Card and L_A windows go through
    :func:`conditioned_tree_law`; unbounded Card/L_A events use the
    complement {A < n} when that complement is Card-bounded.
    """
    if h < 0:
        raise ValueError("h must be >= 0")
    f = event.functional
    if f == "height":
        top = None if event.window is None else event.n + event.window
        tails, _ = height_laws(p, max(top or event.n, h) + 1)
        law = {}
        for t, pr in enumerate_restricted(p, h, max_trees):
            z = t.generation_size(h)
            w = _height_ge_given(t, z, event.n, h, tails)
            if top is not None:
                w -= _height_ge_given(t, z, top, h, tails)
            if pr * w > 0:
                law[t] = pr * w
        return _normalized(law, event, h)
    if f == "generation":
        law = {}
        n, alpha = event.n, event.alpha
        if n < h:
            for t, pr in enumerate_restricted(p, h, max_trees):
                if t.generation_size(n) == alpha:
                    law[t] = pr
            return _normalized(law, event, h)
        single = None
        if p.name != "geometric_mixture":
            single = generation_pmf(p, n - h, alpha)
        for t, pr in enumerate_restricted(p, h, max_trees):
            z = t.generation_size(h)
            if single is None:
                w = geometric_sum_pmf(p.params["q"], n - h, z, alpha)
            else:
                w = _iid_sum_pmf(single, z, alpha)[alpha]
            if pr * w > 0:
                law[t] = pr * w
        return _normalized(law, event, h)
    if event.window is None:
        comp = EventSpec(f, 0, event.n, event.A) if event.n > 0 else None
        if comp is None:
            return _normalized(dict(enumerate_restricted(p, h, max_trees)), event, h)
        bound = card_upper_bound(comp, p)
        if bound is None:
            raise BudgetExceeded(
                f"event {event.label()} is unbounded and its complement does not bound Card",
                parameter="card_max")
        law = dict(enumerate_restricted(p, h, max_trees))
        for t, pr in enumerate_trees(p, bound, 1, max_trees):
            if comp.contains(t):
                r = t.restrict(h)
                law[r] = law.get(r, 0.0) - pr
        law = {t: v for t, v in law.items() if v > 1e-300}
        return _normalized(law, event, h)
    full = conditioned_tree_law(p, event, card_max, max_trees, max_deficit)
    law = {}
    for t, v in full.probs.items():
        r = t.restrict(h)
        law[r] = law.get(r, 0.0) + v
    return ConditionedLaw(law, full.event, full.event_mass, full.deficit, h, full.notes)


def _normalized(law: dict, event: EventSpec, h: int) -> ConditionedLaw:
    mass = math.fsum(law.values())
    if mass <= 0:
        raise ZeroMassEvent(f"event {event.label()} has zero probability")
    return ConditionedLaw({t: v / mass for t, v in law.items()}, event, mass, 0.0, h)
