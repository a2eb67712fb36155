"""Built-in worked examples with their known outputs."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as F

from .core import Dist, FinSpace, Kernel
from .ps import Partition, ProbSpace


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    data: dict
    expected: dict = field(default_factory=dict)


def discchain() -> Fixture:
    """Five-state chain with a transient state, an unreached absorbing state and two classes."""
    X = FinSpace("abcde")
    # Column-stochastic, columns are source states.
    m = Kernel.from_matrix(X, X, [
        [F(1, 2), 0, 0, 0, 0],
        [F(1, 2), 1, 0, 0, 0],
        [0, 0, 1, 0, 0],
        [0, 0, 0, F(1, 2), F(1, 3)],
        [0, 0, 0, F(1, 2), F(2, 3)],
    ])
    p = Dist(X, [0, 0, F(1, 3), F(4, 15), F(2, 5)])
    e_support_columns = {
        "c": {"c": F(1)},
        "d": {"d": F(2, 5), "e": F(3, 5)},
        "e": {"d": F(2, 5), "e": F(3, 5)},
    }
    # The printed idempotent in its a.s. class: a and b both go to b.
    e_reference = Kernel(X, X, [{"b": 1}, {"b": 1}, {"c": 1},
                                {"d": F(2, 5), "e": F(3, 5)}, {"d": F(2, 5), "e": F(3, 5)}])
    return Fixture(
        "discchain",
        "five-state chain; p = (0, 0, 1/3, 4/15, 2/5)",
        {"space": X, "m": m, "p": p},
        {
            "positive_blocks": [["c"], ["d", "e"]],
            "null_blocks": [["a"], ["b"]],
            "p_inv": [F(0), F(0), F(1, 3), F(2, 3)],
            "e_D_support_columns": e_support_columns,
            "e_D_reference": e_reference,
            "decomposition": [(F(1, 3), {"c": F(1)}), (F(2, 3), {"d": F(2, 5), "e": F(3, 5)})],
        },
    )


def seanexample() -> Fixture:
    """Three-state chain where ``b`` splits evenly between two absorbing states."""
    A = FinSpace("abc")
    m = Kernel.from_matrix(A, A, [
        [1, F(1, 2), 0],
        [0, 0, 0],
        [0, F(1, 2), 1],
    ])
    two = FinSpace(["0", "1"])
    h_values = {"a": F(1), "b": F(1, 2), "c": F(0)}
    h = Kernel(A, two, [{"1": v, "0": 1 - v} for v in h_values.values()])
    return Fixture(
        "seanexample",
        "harmonic but not invariant function h = (1, 1/2, 0)",
        {"space": A, "m": m, "h": h, "h_values": h_values},
        {"fails_strict_at": "b", "invariant_support": ["a", "c"]},
    )


def seanexample_measure(t: F) -> Dist:
    """The invariant measures of the fixture chain: ``(t, 0, 1 - t)``."""
    return Dist(FinSpace("abc"), [t, 0, 1 - t])


def partition_sketch() -> Fixture:
    X = FinSpace(["00", "10", "01", "11", "02", "12"])
    p = Dist(X, [F(1, 5), F(2, 5), F(1, 10), F(3, 10), 0, 0])
    blocks = Partition.from_labels(X, [["00", "10"], ["01", "11"], ["02", "12"]])
    return Fixture(
        "partition-sketch",
        "six points in three blocks, the last of measure zero",
        {"space": X, "p": p, "partition": blocks},
        {"quotient": [F(3, 5), F(2, 5), F(0)], "iso_target": [F(3, 5), F(2, 5)]},
    )


def fixtures() -> list:
    return [discchain(), seanexample(), partition_sketch()]


def fixture(name: str) -> Fixture:
    for f in fixtures():
        if f.name == name:
            return f
    raise KeyError(name)


def discchain_base() -> ProbSpace:
    return ProbSpace(discchain().data["p"])
