from fractions import Fraction as F
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from finps.core import Dist, FinSpace
from finps.dynamics import invariant_object
from finps.errors import FinPSError, NotExchangeable
from finps.exchangeability import (finite_definetti, hewitt_savage_finite, iid, is_product_measure,
                                   orbit_count, orbit_structure, permutation_system,
                                   product_power, uniform_on_orbit, uniform_on_orbit_rdag)

BIT = FinSpace("01")
TRIT = FinSpace("012")


def test_product_indexing():
    prod = product_power(BIT, 3)
    assert prod.space.labels[:3] == ("(0,0,0)", "(0,0,1)", "(0,1,0)")
    for i in range(len(prod.space)):
        assert prod.index_of(prod.tuple_of(i)) == i


def test_size_limit():
    with pytest.raises(FinPSError):
        product_power(FinSpace([str(i) for i in range(20)]), 4)


def test_binary_orbits_by_ones_count():
    orb = orbit_structure(BIT, 3)
    assert len(orb.orbits) == 4
    ones = [[sum(int(c) for c in orb.product.space.labels[i] if c.isdigit()) for i in b]
            for b in orb.orbits.blocks]
    assert [set(o) for o in ones] == [{0}, {1}, {2}, {3}]
    assert [len(b) for b in orb.orbits.blocks] == [1, 3, 3, 1]


def test_ternary_triangle():
    orb = orbit_structure(TRIT, 3)
    assert len(orb.orbits) == 10
    assert sorted(orb.types) == sorted((a, b, 3 - a - b) for a in range(4) for b in range(4 - a))


@pytest.mark.parametrize("k,n", [(2, 1), (2, 3), (3, 3), (2, 5), (4, 3)])
def test_orbit_count_formula(k, n):
    base = FinSpace(str(i) for i in range(k))
    assert len(orbit_structure(base, n).orbits) == orbit_count(k, n) == comb(n + k - 1, n)


def _orbit_weights(q):
    p = iid(BIT, 3, Dist(BIT, q))
    return [w for w, _ in finite_definetti(BIT, 3, p)]


def test_binomial_weights_uniform():
    assert _orbit_weights(["1/2", "1/2"]) == [F(1, 8), F(3, 8), F(3, 8), F(1, 8)]


def test_binomial_weights_skewed():
    assert _orbit_weights(["2/3", "1/3"]) == [F(8, 27), F(12, 27), F(6, 27), F(1, 27)]


def test_rdag_uniform_on_orbits():
    p = Dist.uniform(product_power(BIT, 3).space)
    r_dag = uniform_on_orbit_rdag(BIT, 3, p).kernel
    for col in r_dag.rows():
        nz = [v for v in col if v]
        assert len(set(nz)) == 1 and nz[0] == F(1, len(nz))


def test_not_exchangeable_witness():
    space = product_power(BIT, 2).space
    p = Dist(space, ["1/2", "1/2", "0", "0"])
    with pytest.raises(NotExchangeable) as info:
        permutation_system(BIT, 2, p)
    assert info.value.witness["transposition"] == (1, 2)
    assert info.value.witness["tuple"] == "(0,1)"


def test_n_equals_one():
    p = Dist(BIT, ["1/3", "2/3"])
    sys = permutation_system(BIT, 1, Dist(product_power(BIT, 1).space, ["1/3", "2/3"]))
    assert len(invariant_object(sys).blocks) == 2
    assert p.mass == sys.p.mass


class TestHewittSavage:
    def test_single_orbit_is_ergodic(self):
        p = uniform_on_orbit(BIT, 3, 1)
        rep = hewitt_savage_finite(BIT, 3, p)
        assert rep.ergodic and rep.p_inv_deterministic and rep.invariant_functions_deterministic
        assert rep.uniform_on_single_orbit and not rep.product_measure and rep.consistent

    def test_iid_is_not_ergodic_at_finite_n(self):
        p = iid(BIT, 3, Dist(BIT, ["1/2", "1/2"]))
        rep = hewitt_savage_finite(BIT, 3, p)
        assert not rep.ergodic and not rep.invariant_functions_deterministic
        assert rep.product_measure and rep.consistent
        assert rep.notes

    def test_point_mass_is_both(self):
        p = iid(BIT, 3, Dist(BIT, ["1", "0"]))
        rep = hewitt_savage_finite(BIT, 3, p)
        assert rep.ergodic and rep.product_measure and rep.consistent

    def test_sampling_path(self):
        p = iid(TRIT, 3, Dist(TRIT, ["1/2", "1/3", "1/6"]))
        rep = hewitt_savage_finite(TRIT, 3, p, limit=50)
        assert rep.functions_checked <= 50 and rep.consistent


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=10, max_size=10).filter(any))
def test_exchangeable_mixtures(weights):
    # Mixtures of uniform-on-orbit measures are exactly the exchangeable ones.
    total = sum(weights)
    mass = [F(0)] * 27
    orb = orbit_structure(TRIT, 3)
    for w, block in zip(weights, orb.orbits.blocks):
        for i in block:
            mass[i] += F(w, total * len(block))
    p = Dist(orb.product.space, mass)
    dec = finite_definetti(TRIT, 3, p)
    assert [w for w, _ in dec] == [F(w, total) for w in weights if w]
    rep = hewitt_savage_finite(TRIT, 3, p, limit=200)
    assert rep.consistent
    assert rep.ergodic == (sum(1 for w in weights if w) == 1)


def test_product_detection():
    assert is_product_measure(BIT, 2, iid(BIT, 2, Dist(BIT, ["1/3", "2/3"])))
    assert not is_product_measure(BIT, 2, uniform_on_orbit(BIT, 2, 1))
