"""Diagnostics for local convergence of conditioned GW trees to Kesten's tree.

Two kinds of numbers come out of here: ratio sequences
P(tau in A_{n+1}) / P(tau in A_n), whose limit mu is the hypothesis for
convergence, and the total-variation distance at a fixed height h between
the conditioned law of r_h(tau) and the law of r_h(tau*).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import NotALeaf, ZeroMassEvent
from .events import EventSpec, card_upper_bound
from .exact import (MAX_TREES, conditioned_restriction_law, enumerate_trees,
                    functional_pmf, geometric_generation_ratio, height_laws,
                    kesten_restriction_probability)
from .offspring import OffspringDistribution, TiltedFamily
from .rng import merge_counts, run_blocks
from .samplers import (DEFAULT_BUDGET, SamplerBudget, bfs_key_to_tree,
                       conditioned_restriction_batch, restriction_batch,
                       sample_conditioned_batch)
from .trees import Tree, as_degree_set, to_bfs

TOP = 20


def _csv(header: Optional[str], columns, rows) -> str:
    buf = io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


# ratio sequences ----------------------------------------------------------------

@dataclass
class RatioReport:
    family: str
    target: float
    rows: list          # (n, ratio)
    tol: float = 0.01

    @property
    def last(self) -> float:
        return self.rows[-1][1]

    @property
    def converged(self) -> bool:
        return abs(self.last - self.target) <= self.tol

    def to_json(self) -> dict:
        return {"family": self.family, "target": self.target, "tol": self.tol,
                "converged": self.converged,
                "rows": [{"n": n, "ratio": r} for n, r in self.rows]}

    def to_csv(self, header: Optional[str] = None) -> str:
        return _csv(header, ["n", "ratio", "target"], [(n, r, self.target) for n, r in self.rows])


def event_masses(p: OffspringDistribution, family: EventSpec, ns: Sequence[int]) -> dict:
    """P(tau in A_n) for each n, with the window of ``family``."""
    ns = sorted(set(ns))
    w = family.window
    top = ns[-1] + (w if w is not None else 0) + 1
    if family.functional == "height":
        tail, pmf = height_laws(p, top)
        if w is None:
            return {n: tail[n] for n in ns}
        return {n: pmf.window(n, w) for n in ns}
    law = functional_pmf(p, family, top)
    if w is None:
        return {n: max(0.0, 1.0 - law.window(0, n)) for n in ns}
    return {n: law.window(n, w) for n in ns}


def ratio_sequence(p: OffspringDistribution, family: EventSpec, ns: Sequence[int],
                   tol: float = 0.01) -> RatioReport:
    """P(tau in A_{n+1}) / P(tau in A_n) for n in ``ns``; the target is mu."""
    ns = list(ns)
    masses = event_masses(p, family, ns + [n + 1 for n in ns])
    rows = []
    for n in ns:
        if masses[n] <= 0:
            raise ZeroMassEvent(f"P(tau in A_{n}) = 0 for {family.label()}")
        rows.append((n, masses[n + 1] / masses[n]))
    return RatioReport(family.with_n(ns[0]).label(), p.mean, rows, tol)


def generation_ratio(q: float, n: int, alpha: int, j: int = 1) -> float:
    """P(G_{n-j} = alpha) / P(G_n = alpha) for the geometric mixture."""
    return geometric_generation_ratio(q, n, alpha, j)


def generation_ratio_report(q: float, ns: Sequence[int], alpha, j: int = 1,
                            tol: float = 0.01, name: str = "alpha_n") -> RatioReport:
    """Ratio sequence for G_n = alpha(n); the target is 1."""
    rows = [(n, generation_ratio(q, n, int(alpha(n)), j)) for n in ns]
    return RatioReport(f"G_n={name}", 1.0, rows, tol)


# total variation at fixed height --------------------------------------------------

@dataclass
class TVReport:
    h: int
    n: int
    tv: float
    method: str
    event: str = ""
    m: Optional[int] = None
    stderr: Optional[float] = None
    deficit: float = 0.0
    unobserved: Optional[float] = None
    seed: Optional[int] = None
    top: list = field(default_factory=list)   # (tree, conditioned, kesten)
    notes: list = field(default_factory=list)

    @property
    def tv_upper(self) -> float:
        """TV plus two standard errors (Monte Carlo), or plus the deficit (exact)."""
        return min(1.0, self.tv + 2 * (self.stderr or 0.0) + self.deficit)

    def to_json(self) -> dict:
        d = asdict(self)
        d["tv_upper"] = self.tv_upper
        d["top"] = [{"tree": str(t), "degrees": list(t.degrees), "conditioned": c, "kesten": k}
                    for t, c, k in self.top]
        return d

    def row(self) -> tuple:
        return (self.n, self.h, self.tv, self.method, self.stderr if self.stderr is not None else "",
                self.deficit)


TV_COLUMNS = ["n", "h", "tv", "method", "stderr", "deficit"]


def tv_reports_csv(reports, header: Optional[str] = None) -> str:
    return _csv(header, TV_COLUMNS, [r.row() for r in reports])


def _top(cond: dict, kesten, n=TOP):
    keys = set(cond)
    items = [(t, cond.get(t, 0.0), kesten(t)) for t in keys]
    items.sort(key=lambda x: (-x[2], -x[1], x[0].degrees))
    return items[:n]


def tv_exact(p: OffspringDistribution, event: EventSpec, h: int,
             card_max: Optional[int] = None, max_trees: int = MAX_TREES) -> TVReport:
    """Exact TV between the law of r_h(tau) given the event and r_h(tau*).

    Only the support of the conditioned law is visited: the Kesten mass
    outside it contributes 1 - (its Kesten mass inside) to twice the TV.
    """
    cond = conditioned_restriction_law(p, event, h, card_max, max_trees)
    kvals = {t: kesten_restriction_probability(p, t, h) for t in cond.probs}
    inside = math.fsum(abs(c - kvals[t]) for t, c in cond.probs.items())
    outside = max(0.0, 1.0 - math.fsum(kvals.values()))
    tv = 0.5 * (inside + outside)
    return TVReport(h, cond.event.n if cond.event.functional != "generation" else event.n,
                    tv, "exact", cond.event.label(), deficit=cond.deficit,
                    top=_top(cond.probs, lambda t: kvals.get(t, 0.0)), notes=list(cond.notes))


def kesten_bfs_probability(p: OffspringDistribution, key: tuple, h: int, mu: float) -> float:
    """P(r_h(tau*) = t) from the breadth-first degrees of generations < h."""
    if h == 0:
        return 1.0
    width, pos, prob = 1, 0, 1.0
    z = 1
    for _ in range(h):
        gen = key[pos:pos + width]
        pos += width
        z = sum(gen)
        prob *= math.prod(p(k) for k in gen)
        width = z
    return z * prob / mu ** h


def _tv_from_counts(p, counts: dict, m: int, h: int):
    """Plug-in TV of empirical counts against Kesten's law, with its
    standard error and the Kesten mass of unobserved trees."""
    mu = p.mean
    keys = sorted(counts)
    kv = {k: kesten_bfs_probability(p, k, h, mu) for k in keys}
    diffs = [abs(counts[k] / m - kv[k]) for k in keys]
    unobserved = max(0.0, 1.0 - math.fsum(kv.values()))
    tv = 0.5 * (math.fsum(diffs) + unobserved)
    # delta method on TV = (1/2) sum_t s_t (emp_t - K_t), s_t = sign
    s = np.array([1.0 if counts[k] / m >= kv[k] else -1.0 for k in keys])
    w = np.array([counts[k] / m for k in keys])
    var = max(math.fsum(w * s * s) - math.fsum(w * s) ** 2, 0.0)
    stderr = 0.5 * math.sqrt(var / m)
    return tv, stderr, unobserved, kv


def _count_keys(keys) -> dict:
    out = {}
    for k in keys:
        out[k] = out.get(k, 0) + 1
    return out


def tv_monte_carlo(p: OffspringDistribution, event: EventSpec, h: int, m: int, seed: int,
                   threads: Optional[int] = None, budget: SamplerBudget = DEFAULT_BUDGET,
                   block_size: int = 10_000) -> TVReport:
    """Monte Carlo TV from ``m`` rejection draws of tau given the event."""
    def block(rng, size, b):
        if event.functional in ("height", "generation"):
            keys, _ = conditioned_restriction_batch(p, event, h, rng, size, budget)
        else:
            trees, _ = sample_conditioned_batch(p, event, rng, size, budget)
            keys = [to_bfs(t.restrict(h))[: _inner_count(t, h)] for t in trees]
        return _count_keys(keys)

    counts = merge_counts(run_blocks(block, m, seed, threads, block_size))
    return _mc_report(p, counts, m, h, event, seed, "monte_carlo")


def _inner_count(t: Tree, h: int) -> int:
    return sum(1 for d in t.depths if d < h)


def _mc_report(p, counts, m, h, event, seed, method):
    tv, se, unobs, kv = _tv_from_counts(p, counts, m, h)
    best = sorted(counts, key=lambda k: (-kv[k], -counts[k], k))[:TOP]
    top = [(bfs_key_to_tree(k, h), counts[k] / m, kv[k]) for k in best]
    return TVReport(h, event.n if event is not None else 0, tv, method,
                    event.label() if event is not None else "kesten", m=m, stderr=se,
                    unobserved=unobs, seed=seed, top=top)


def kesten_fidelity(p: OffspringDistribution, h: int, m: int, seed: int,
                    threads: Optional[int] = None, block_size: int = 10_000) -> TVReport:
    """TV between the empirical r_h law of ``m`` Kesten samples and the exact law."""
    def block(rng, size, b):
        keys, _ = restriction_batch(p, h, rng, size, kesten=True)
        return _count_keys(keys)

    counts = merge_counts(run_blocks(block, m, seed, threads, block_size))
    return _mc_report(p, counts, m, h, None, seed, "monte_carlo")


@dataclass
class SamplerAgreement:
    """Cycle-lemma draws against rejection draws of tau given Card = n."""

    n: int
    h: int
    m: int
    seed: int
    exact_counts: dict      # tree -> count, cycle-lemma sampler
    rejection_counts: dict  # r_h key -> count, both samplers
    cycle_counts: dict
    chi2_pvalue: float
    tv: float

    def to_json(self) -> dict:
        return {"n": self.n, "h": self.h, "m": self.m, "seed": self.seed,
                "chi2_pvalue": self.chi2_pvalue, "tv": self.tv,
                "shapes": [{"tree": list(t.degrees), "count": c}
                           for t, c in sorted(self.exact_counts.items(), key=lambda kv: kv[0].degrees)]}


def progeny_sampler_check(p: OffspringDistribution, n: int, h: int, m: int, seed: int,
                          threads: Optional[int] = None,
                          budget: SamplerBudget = DEFAULT_BUDGET) -> SamplerAgreement:
    """Chi-square test of the cycle-lemma sampler against the exact law of
    tau given Card = n, and TV at height h against the rejection sampler."""
    from scipy import stats

    from .exact import conditioned_tree_law
    from .samplers import sample_progeny_exact_batch

    event = EventSpec.card_eq(n)

    def cycle(rng, size, b):
        return _count_keys(sample_progeny_exact_batch(p, n, rng, size, budget))

    def reject(rng, size, b):
        trees, _ = sample_conditioned_batch(p, event, rng, size, budget)
        return _count_keys(trees)

    exact_counts = merge_counts(run_blocks(cycle, m, seed, threads))
    rej = merge_counts(run_blocks(reject, m, seed + 1, threads))
    law = conditioned_tree_law(p, event)
    shapes = sorted(law.probs, key=lambda t: t.degrees)
    observed = [exact_counts.get(t, 0) for t in shapes]
    expected = [law.probs[t] * m for t in shapes]
    pval = float(stats.chisquare(observed, expected).pvalue) if len(shapes) > 1 else 1.0

    def by_restriction(counts):
        out = {}
        for t, c in counts.items():
            r = t.restrict(h)
            out[r] = out.get(r, 0) + c
        return out

    a, b = by_restriction(exact_counts), by_restriction(rej)
    return SamplerAgreement(n, h, m, seed, exact_counts, b, a, pval, empirical_tv(a, b))


def tv_at_height(p: OffspringDistribution, event: EventSpec, h: int, method: str = "exact",
                 m: int = 100_000, seed: int = 0, threads: Optional[int] = None,
                 card_max: Optional[int] = None, max_trees: int = MAX_TREES,
                 budget: SamplerBudget = DEFAULT_BUDGET) -> TVReport:
    if method == "exact":
        return tv_exact(p, event, h, card_max, max_trees)
    if method in ("mc", "monte_carlo"):
        return tv_monte_carlo(p, event, h, m, seed, threads, budget)
    raise ValueError(f"unknown method {method!r}")


def empirical_tv(a: dict, b: dict) -> float:
    """TV between two count (or probability) dictionaries, each normalized."""
    na, nb = sum(a.values()), sum(b.values())
    keys = set(a) | set(b)
    return 0.5 * math.fsum(abs(a.get(k, 0) / na - b.get(k, 0) / nb) for k in keys)


# shift constant ---------------------------------------------------------------------

def shift_constant(functional: str, t: Tree, x, a=None) -> int:
    """D(t, x) with A(graft(t, x, s)) = A(s) + D(t, x).

    Height: |x| (once H(s) >= H(t)); Card: Card(t) - 1, since x is shared;
    L_A: L_A(t) - [0 in A].
    """
    x = tuple(x)
    if x not in t or t.degree(x) != 0:
        raise NotALeaf(f"{x} is not a leaf of the tree")
    if functional == "height":
        return len(x)
    if functional == "card":
        return t.card - 1
    if functional == "outdeg":
        a = as_degree_set(a)
        return t.count_outdegree(a) - (1 if 0 in a else 0)
    raise ValueError(f"no shift constant for {functional!r}")


def shift_gcd(functional: str, trees, a=None) -> int:
    """gcd of the positive shift constants D(t, x) over the given trees."""
    g = 0
    for t in trees:
        for x in t.leaves():
            d = shift_constant(functional, t, x, a)
            if d > 0:
                g = math.gcd(g, d)
    return g


# tilting ------------------------------------------------------------------------------

@dataclass
class TiltReport:
    a: str
    n: int
    card_max: int
    complete: bool
    rows: list          # (theta, max discrepancy, trees compared)

    @property
    def discrepancy(self) -> float:
        return max(r[1] for r in self.rows)

    def to_json(self) -> dict:
        return {"A": self.a, "n": self.n, "card_max": self.card_max, "complete": self.complete,
                "discrepancy": self.discrepancy,
                "rows": [{"theta": th, "discrepancy": d, "trees": k} for th, d, k in self.rows]}

    def to_csv(self, header: Optional[str] = None) -> str:
        return _csv(header, ["theta", "discrepancy", "trees"], self.rows)


def _conditional(p, a, n, card_max, max_trees):
    law = {}
    for t, pr in enumerate_trees(p, card_max, 1, max_trees):
        if pr > 0 and t.count_outdegree(a) == n:
            law[t] = pr
    mass = math.fsum(law.values())
    if mass <= 0:
        raise ZeroMassEvent(f"no enumerated tree with L_A = {n}")
    return {t: v / mass for t, v in law.items()}


def tilt_invariance_check(p: OffspringDistribution, a, thetas: Sequence[float], n: int,
                          card_max: int, max_trees: int = MAX_TREES) -> TiltReport:
    """max_t |P(tau_theta = t | L_A = n) - P(tau = t | L_A = n)| for each theta.

    When Card <= card_max does not cover {L_A = n} both laws are compared on
    the enumerated part, and ``complete`` is False.
    """
    a = as_degree_set(a)
    fam = TiltedFamily(p, a)
    base = _conditional(p, a, n, card_max, max_trees)
    bound = card_upper_bound(EventSpec("outdeg", n, 1, a), p)
    rows = []
    for th in thetas:
        other = _conditional(fam.tilt(th), a, n, card_max, max_trees)
        keys = set(base) | set(other)
        d = max(abs(base.get(t, 0.0) - other.get(t, 0.0)) for t in keys)
        rows.append((float(th), d, len(keys)))
    return TiltReport(repr(a), n, card_max, bound is not None and bound <= card_max, rows)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
