import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwlocal.errors import DomainError, InvalidDistribution, OutsideInterval
from gwlocal.offspring import (NotGeneric, OffspringDistribution, TiltedFamily,
                               critical_theta)
from gwlocal.trees import LEAVES, NATURALS, DegreeSet

O = OffspringDistribution


def test_basic_moments(binary, geometric, subcritical):
    assert binary.mean == 1.0 and binary.span == 2
    assert subcritical.mean == pytest.approx(0.8, abs=1e-15) and subcritical.span == 2
    assert geometric.mean == pytest.approx(1.0, abs=1e-12)
    assert geometric.span == 1


def test_geometric_mixture_weights(geometric):
    # p(0) = 1 - q and p(k) = q^2 (1 - q)^(k-1)
    assert geometric(0) == pytest.approx(0.5, rel=1e-12)
    for k in range(1, 20):
        assert geometric(k) == pytest.approx(2.0 ** -(k + 1), rel=1e-12)


def test_gf_examples(binary):
    assert binary.gf(1.0) == pytest.approx(1.0)
    assert binary.gf_iterate(2, 0.0) == pytest.approx(5 / 8, abs=1e-15)
    with pytest.raises(DomainError):
        binary.gf(1.5)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 100, 1000, 10_000])
def test_geometric_iterates_closed_form(geometric, n):
    assert geometric.gf_iterate(n, 0.0) == pytest.approx(n / (n + 1), abs=1e-10)


def test_size_biased(binary, geometric):
    assert binary.size_biased()(2) == 1.0
    sb = geometric.size_biased()
    assert sb(0) == 0.0
    for k in range(1, 30):
        assert sb(k) == pytest.approx(k * 2.0 ** -(k + 1), rel=1e-10)
    assert sb.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_from_pmf_and_spec_round_trip():
    p = O.from_pmf({0: 0.3, 1: 0.4, 3: 0.3})
    q = O.from_spec(p.to_spec())
    assert np.allclose(p.probs, q.probs)
    g = O.from_spec({"kind": "geometric_mixture", "q": 0.5})
    assert g.name == "geometric_mixture"
    po = O.from_spec({"kind": "poisson", "lambda": 1.0, "tail_cut": 1e-14})
    assert po.mean == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(InvalidDistribution):
        O.from_spec({"kind": "nope"})


def test_tilt_examples(subcritical):
    fam = TiltedFamily(subcritical, NATURALS)
    t1 = fam.tilt(1.0)
    assert np.allclose(t1.probs, subcritical.probs)
    tc = fam.tilt(math.sqrt(1.5))
    assert tc(0) == pytest.approx(0.5, abs=1e-14)
    assert tc(2) == pytest.approx(0.5, abs=1e-14)
    with pytest.raises(OutsideInterval):
        TiltedFamily(subcritical, LEAVES).tilt(100.0)


def test_critical_theta_examples(subcritical, binary):
    theta = critical_theta(TiltedFamily(subcritical, NATURALS))
    assert abs(theta - math.sqrt(1.5)) <= 1e-9
    for a in (NATURALS, LEAVES, DegreeSet({2})):
        assert critical_theta(TiltedFamily(binary, a)) == 1.0


def test_critical_theta_on_other_sets(subcritical):
    # A = {0}: theta_c = 1.25, A = {2}: theta_c = 1.2 (solved by hand)
    assert critical_theta(TiltedFamily(subcritical, LEAVES)) == pytest.approx(1.25, abs=1e-9)
    assert critical_theta(TiltedFamily(subcritical, {2})) == pytest.approx(1.2, abs=1e-9)


def test_heavy_tail_is_not_generic():
    p = O.power_law(6.0, 0.5)
    assert p.mean < 1
    res = critical_theta(TiltedFamily(p, NATURALS))
    assert isinstance(res, NotGeneric)
    assert not res
    assert res.mean_at_edge < 1


@given(st.floats(0.3, 1.6))
def test_tilts_are_normalized(theta):
    fam = TiltedFamily(O.binary(0.6), NATURALS)
    if fam.is_admissible(theta):
        assert math.fsum(fam.tilt(theta).probs) == pytest.approx(1.0, abs=1e-12)


def test_tilted_mean_is_monotone():
    fam = TiltedFamily(O.poisson(0.7), NATURALS)
    grid = np.linspace(0.2, 3.0, 40)
    means = [fam.tilted_mean(t) for t in grid]
    assert all(b >= a - 1e-12 for a, b in zip(means, means[1:]))


@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=6))
def test_size_biased_mean(ws):
    p = O.from_pmf(np.array(ws) / math.fsum(ws))
    if p.mean > 0:
        direct = sum(k * k * v for k, v in p.items()) / p.mean
        assert p.size_biased().mean == pytest.approx(direct, rel=1e-12)


@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=6))
def test_iterates_increase_to_at_most_one(ws):
    p = O.from_pmf(np.array(ws) / math.fsum(ws))
    vals = [p.gf_iterate(n, 0.0) for n in range(30)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
    assert vals[-1] <= 1.0
