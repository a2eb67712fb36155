import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from finps import generators as G
from finps.core import Dist, FinSpace, Kernel, compose, dirac, identity, push
from finps.errors import InvalidPartition, NotMeasurePreserving
from finps.fixtures import partition_sketch
from finps.ps import (Partition, ProbSpace, PSMorphism, as_equal, bayesian_inverse, check_dag_id,
                      find_ps_iso, is_as_deterministic, partitions_as_isomorphic,
                      positive_part, ps_compose, quotient_by_partition)

X = FinSpace("abc")
Y = FinSpace("xy")


def test_psmorphism_must_preserve_measure():
    p = Dist(X, ["1/2", "1/2", "0"])
    k = dirac(X, Y, {"a": "x", "b": "x", "c": "y"})
    with pytest.raises(NotMeasurePreserving):
        PSMorphism(ProbSpace(p), ProbSpace(Dist(Y, ["1/2", "1/2"])), k)


def test_equality_ignores_null_columns():
    p = Dist(X, ["1/2", "1/2", "0"])
    q = Dist(Y, ["1/2", "1/2"])
    k1 = Kernel(X, Y, [{"x": 1}, {"y": 1}, {"x": 1}])
    k2 = Kernel(X, Y, [{"x": 1}, {"y": 1}, {"x": "1/3", "y": "2/3"}])
    f, g = PSMorphism(ProbSpace(p), ProbSpace(q), k1), PSMorphism(ProbSpace(p), ProbSpace(q), k2)
    assert f == g and hash(f) == hash(g)
    assert f.kernel != g.kernel
    # The canonical form puts the target measure in null columns.
    assert f.canonical._rows[2] == {0: F(1, 2), 1: F(1, 2)}


def test_bayesian_inverse_by_hand():
    # Prior (1/2, 1/4, 1/4); f sends a -> x, b -> x/y evenly, c -> y.
    p = Dist(X, ["1/2", "1/4", "1/4"])
    k = Kernel(X, Y, [{"x": 1}, {"x": "1/2", "y": "1/2"}, {"y": 1}])
    f = PSMorphism(ProbSpace(p), ProbSpace(push(k, p)), k)
    assert f.dst.p.mass == (F(5, 8), F(3, 8))
    d = bayesian_inverse(f).kernel
    assert d.column(0) == {0: F(4, 5), 1: F(1, 5)}
    assert d.column(1) == {1: F(1, 3), 2: F(2, 3)}


def test_bayesian_inverse_null_target_uses_prior():
    p = Dist(X, ["1/2", "1/2", "0"])
    Z = FinSpace("xyz")
    k = dirac(X, Z, {"a": "x", "b": "y", "c": "z"})
    f = PSMorphism(ProbSpace(p), ProbSpace(push(k, p)), k)
    assert bayesian_inverse(f).kernel.column(2) == {0: F(1, 2), 1: F(1, 2)}


def test_as_deterministic_with_noise_off_support():
    p = Dist(X, ["1/2", "1/2", "0"])
    k = Kernel(X, Y, [{"x": 1}, {"y": 1}, {"x": "1/2", "y": "1/2"}])
    f = PSMorphism(ProbSpace(p), ProbSpace(push(k, p)), k)
    assert is_as_deterministic(f)
    assert as_equal(compose(k, bayesian_inverse(f).kernel), identity(Y), f.dst.p)


def test_compose_checks_endpoints():
    p = ProbSpace(Dist(X, ["1/2", "1/2", "0"]))
    f = PSMorphism(p, p, identity(X))
    assert ps_compose(f, f) == f


class TestIso:
    def test_matches_equal_multisets(self):
        a = ProbSpace(Dist(FinSpace("abc"), ["1/2", "1/4", "1/4"]))
        b = ProbSpace(Dist(FinSpace("uvwz"), ["1/4", "0", "1/2", "1/4"]))
        f, g = find_ps_iso(a, b)
        assert is_as_deterministic(f) and is_as_deterministic(g)
        assert as_equal(compose(g.kernel, f.kernel), identity(a.space), a.p)
        assert as_equal(compose(f.kernel, g.kernel), identity(b.space), b.p)
        assert bayesian_inverse(f) == g

    def test_tie_break_is_by_label(self):
        a = ProbSpace(Dist(FinSpace("ab"), ["1/2", "1/2"]))
        b = ProbSpace(Dist(FinSpace("yx"), ["1/2", "1/2"]))
        f, _ = find_ps_iso(a, b)
        assert f.kernel("x", "a") == 1 and f.kernel("y", "b") == 1

    def test_none_when_masses_differ(self):
        a = ProbSpace(Dist(FinSpace("ab"), ["1/2", "1/2"]))
        b = ProbSpace(Dist(FinSpace("xy"), ["1/3", "2/3"]))
        assert find_ps_iso(a, b) is None

    def test_positive_part(self):
        x = ProbSpace(Dist(X, ["1/2", "0", "1/2"]))
        assert positive_part(x).space.labels == ("a", "c")
        assert find_ps_iso(x, positive_part(x)) is not None


class TestPartitions:
    def test_sketch_quotient(self):
        fx = partition_sketch()
        x = ProbSpace(fx.data["p"])
        q, r = quotient_by_partition(x, fx.data["partition"])
        assert list(q.p.mass) == fx.expected["quotient"]
        two = ProbSpace(Dist(FinSpace(["A1", "A2"]), fx.expected["iso_target"]))
        assert find_ps_iso(q, two) is not None

    def test_partition_validation(self):
        with pytest.raises(InvalidPartition):
            Partition.from_labels(X, [["a", "b"], ["b", "c"]])
        with pytest.raises(InvalidPartition):
            Partition.from_labels(X, [["a", "b"]])

    def test_null_difference_criterion(self):
        p = ProbSpace(Dist(FinSpace("abcd"), ["1/2", "0", "1/2", "0"]))
        fine = Partition.from_labels(p.space, [["a"], ["b"], ["c", "d"]])
        coarse = Partition.from_labels(p.space, [["a", "b"], ["c", "d"]])
        assert partitions_as_isomorphic(p, fine, coarse)
        coarser = Partition.indiscrete(p.space)
        assert not partitions_as_isomorphic(p, fine, coarser)
        with pytest.raises(InvalidPartition):
            partitions_as_isomorphic(p, coarse, fine)

    def test_generated_sets(self):
        part = Partition.from_labels(X, [["a", "c"], ["b"]])
        assert part.generated_sets() == {frozenset(), frozenset({0, 2}), frozenset({1}),
                                         frozenset({0, 1, 2})}


gen = G.CaseGen(0)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_dag_id_property(seed):
    f = G.rand_ps_morphism(random.Random(seed), gen)
    assert check_dag_id(f)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_dagger_involution_property(seed):
    f = G.rand_ps_morphism(random.Random(seed), gen)
    assert bayesian_inverse(bayesian_inverse(f)) == f


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_dagger_preserves_measure(seed):
    f = G.rand_ps_morphism(random.Random(seed), gen)
    d = bayesian_inverse(f)
    assert push(d.kernel, f.dst.p) == f.src.p
