import math

import numpy as np
import pytest
from scipy import stats

from gwlocal import exact as E
from gwlocal import samplers as S
from gwlocal.errors import (BudgetExceeded, InconsistentBudget, LatticeMiss,
                            RejectionBudgetExceeded, Supercritical)
from gwlocal.events import EventSpec
from gwlocal.offspring import OffspringDistribution as O
from gwlocal.rng import block_rng, make_rng, run_blocks
from gwlocal.trees import LEAVES, NATURALS, Tree

T = lambda *d: Tree(d)
SMALL = O.from_pmf([0.4, 0.3, 0.2, 0.1])


def test_sample_gw_trivial_law():
    p = O.from_pmf([1.0])
    rng = make_rng(0)
    assert all(S.sample_gw(p, rng) == T(0) for _ in range(10))


def test_sample_gw_root_leaf_frequency(binary):
    rng = make_rng(11)
    m = 200_000
    _, card = S.gw_words_batch(binary, rng, m, 1)
    hits = int((card == 1).sum())
    assert abs(hits / m - 0.5) <= 3 * math.sqrt(0.25 / m)


def test_sample_gw_card_law(binary):
    rng = make_rng(5)
    m = 100_000
    _, cards = S.gw_words_batch(binary, rng, m, 9)
    cards = cards.tolist()
    law = E.dwass_pmf(binary, 1, 9)
    for n in (1, 3, 5, 7, 9):
        freq = sum(1 for c in cards if c == n) / m
        assert abs(freq - law[n]) <= 4 * math.sqrt(law[n] * (1 - law[n]) / m)


def test_sample_gw_subcritical_card_law(subcritical):
    rng = make_rng(15)
    m = 20_000
    cards = [S.sample_gw(subcritical, rng).card for _ in range(m)]
    law = E.dwass_pmf(subcritical, 1, 7)
    for n in (1, 3, 5, 7):
        freq = sum(1 for c in cards if c == n) / m
        assert abs(freq - law[n]) <= 4 * math.sqrt(law[n] * (1 - law[n]) / m)


def test_supercritical_budget():
    p = O.binary(0.2)
    rng = make_rng(1)
    fails = 0
    for _ in range(50):
        try:
            S.sample_gw(p, rng, S.SamplerBudget(max_nodes=200))
        except BudgetExceeded as e:
            assert e.parameter == "max_nodes"
            fails += 1
    assert fails > 0


def test_determinism(binary):
    a = [S.sample_gw(binary, make_rng(42)) for _ in range(3)]
    b = [S.sample_gw(binary, make_rng(42)) for _ in range(3)]
    assert a == b


def test_kesten_examples(binary):
    rng = make_rng(2)
    pre = S.sample_kesten(binary, 0, rng)
    assert pre.tree == T(0) and pre.spine == ()
    for _ in range(50):
        pre = S.sample_kesten(binary, 1, rng)
        assert pre.tree == T(2, 0, 0)
        assert pre.spine in ((1,), (2,))
    with pytest.raises(Supercritical):
        S.sample_kesten(O.binary(0.3), 1, rng)


def test_kesten_prefix_validates():
    with pytest.raises(ValueError):
        S.KestenPrefix(T(2, 0, 0), 1, (3,))
    with pytest.raises(ValueError):
        S.KestenPrefix(T(2, 0, 0), 2, (1,))


@pytest.mark.parametrize("p", [O.binary(0.5), SMALL])
def test_kesten_r1_law(p):
    rng = make_rng(9)
    m = 200_000
    keys, _ = S.restriction_batch(p, 1, rng, m, kesten=True)
    counts = {}
    for k in keys:
        counts[k] = counts.get(k, 0) + 1
    exact = E.kesten_law(p, 1)
    tv = 0.5 * sum(abs(counts.get((t.degrees[0],), 0) / m - v) for t, v in exact.items())
    assert tv <= 0.005


def test_single_and_batch_kesten_agree_in_law():
    rng = make_rng(4)
    m = 20_000
    single = {}
    for _ in range(m):
        t = S.sample_kesten(SMALL, 2, rng).tree
        single[t] = single.get(t, 0) + 1
    exact = E.kesten_law(SMALL, 2)
    tv = 0.5 * (sum(abs(single.get(t, 0) / m - v) for t, v in exact.items()))
    assert tv <= 0.04
    assert all(t in exact for t in single)


def test_sample_conditioned_examples(binary):
    rng = make_rng(3)
    assert S.sample_conditioned(binary, EventSpec.card_eq(1), rng) == T(0)
    for _ in range(5):
        assert S.sample_conditioned(binary, EventSpec.card_eq(3), rng) == T(2, 0, 0)


def test_sample_conditioned_leaves_law(binary):
    rng = make_rng(8)
    ev = EventSpec.leaves_eq(3)
    trees, _ = S.sample_conditioned_batch(binary, ev, rng, 100_000)
    law = E.conditioned_tree_law(binary, ev)
    counts = {}
    for t in trees:
        counts[t] = counts.get(t, 0) + 1
    tv = 0.5 * sum(abs(counts.get(t, 0) / 1e5 - v) for t, v in law.probs.items())
    assert tv <= 0.01


def test_sample_conditioned_refusals(binary, geometric):
    rng = make_rng(0)
    with pytest.raises(InconsistentBudget):
        S.sample_conditioned(binary, EventSpec.height_ge(3), rng)
    with pytest.raises(InconsistentBudget):
        S.sample_conditioned(binary, EventSpec.card_eq(9), rng, S.SamplerBudget(max_nodes=5))
    with pytest.raises(InconsistentBudget):
        S.sample_conditioned(geometric, EventSpec.leaves_eq(3), rng)
    with pytest.raises(RejectionBudgetExceeded):
        S.sample_conditioned(binary, EventSpec.card_eq(41), rng,
                             S.SamplerBudget(max_rejections=100))


def test_cycle_rotation():
    assert S.cycle_rotate((0, 2, 0)) == (2, 0, 0)
    assert S.cycle_rotate((2, 0, 0)) == (2, 0, 0)
    assert S.cycle_rotate((0, 0, 2)) == (2, 0, 0)
    for w in [(0, 1, 3, 0, 0, 1), (0, 0, 0, 3), (1, 0, 2, 0, 1), (0, 2, 0, 0, 2, 0, 2)]:
        r = S.cycle_rotate(w)
        Tree(r)  # valid
        shifts = [w[i:] + w[:i] for i in range(len(w))]
        valid = []
        for s in shifts:
            try:
                Tree(s)
                valid.append(s)
            except ValueError:
                pass
        assert valid == [r]


def test_progeny_exact_examples(binary):
    rng = make_rng(1)
    assert S.sample_progeny_exact(binary, 1, rng) == T(0)
    trees = S.sample_progeny_exact_batch(binary, 5, rng, 20_000)
    assert {t for t in trees} == {T(2, 2, 0, 0, 0), T(2, 0, 2, 0, 0)}
    n1 = sum(1 for t in trees if t == T(2, 2, 0, 0, 0))
    assert stats.chisquare([n1, 20_000 - n1]).pvalue > 0.001
    with pytest.raises(LatticeMiss):
        S.sample_progeny_exact(binary, 4, rng)


def test_progeny_exact_subcritical_uses_same_conditional_law(subcritical):
    rng = make_rng(6)
    trees = S.sample_progeny_exact_batch(subcritical, 7, rng, 30_000)
    law = E.conditioned_tree_law(subcritical, EventSpec.card_eq(7))
    counts = {}
    for t in trees:
        counts[t] = counts.get(t, 0) + 1
    tv = 0.5 * sum(abs(counts.get(t, 0) / 3e4 - v) for t, v in law.probs.items())
    assert tv <= 0.02


def test_progeny_exact_geometric_law(geometric):
    rng = make_rng(12)
    m = 50_000
    trees = S.sample_progeny_exact_batch(geometric, 4, rng, m)
    law = E.conditioned_tree_law(geometric, EventSpec.card_eq(4))
    assert len(law.probs) == 5
    obs = [sum(1 for t in trees if t == s) for s in sorted(law.probs, key=lambda t: t.degrees)]
    exp = [law.probs[s] * m for s in sorted(law.probs, key=lambda t: t.degrees)]
    assert stats.chisquare(obs, exp).pvalue > 0.001


def test_x0_examples(binary):
    rng = make_rng(7)
    m = 100_000
    xs = np.array([S.sample_X0(binary, rng) for _ in range(m)])
    assert abs(xs.mean() - 1.0) <= 4 * math.sqrt(2.0 / m)
    for j in range(4):
        f = (xs == j).mean()
        assert abs(f - 2.0 ** -(j + 1)) <= 4 * math.sqrt(0.25 / m)


def test_xa_sampler_matches_exact_law():
    rng = make_rng(13)
    m = 40_000
    for a in ({2}, {0, 2}):
        law, q, _ = E.xa_pmf(SMALL, a)
        xs = np.array([S.sample_XA(SMALL, a, rng) for _ in range(m)])
        assert abs(xs.mean() - 1.0) <= 0.03
        for j in range(3):
            assert abs((xs == j).mean() - law(j)) <= 4 * math.sqrt(law(j) * (1 - law(j)) / m) + 1e-3


def test_xa_natural_set_is_x(binary):
    rng = make_rng(0)
    xs = [S.sample_XA(binary, NATURALS, rng) for _ in range(2000)]
    assert set(xs) <= {0, 2}


def test_q_estimate_against_exact():
    rng = make_rng(14)
    qhat, se = S.estimate_q(SMALL, {2}, rng, 20_000)
    assert abs(qhat - S.exact_q(SMALL, {2})) <= 4 * se
    assert S.exact_q(SMALL, LEAVES) == 1.0


def test_block_streams_are_fixed():
    a = block_rng(5, 3).random(4)
    b = block_rng(5, 3).random(4)
    c = block_rng(5, 4).random(4)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    r1 = run_blocks(lambda g, s, b: g.random(s).sum(), 25_000, 1, threads=1, block_size=1000)
    r4 = run_blocks(lambda g, s, b: g.random(s).sum(), 25_000, 1, threads=4, block_size=1000)
    assert r1 == r4 and len(r1) == 25
