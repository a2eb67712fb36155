"""Probability spaces and measure-preserving kernels modulo almost-sure equality.

A :class:`PSMorphism` keeps the kernel it was built from (so deterministic
representatives stay deterministic), but compares and hashes through its
canonical representative, in which every column at a null source state is
replaced by the target measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

from .core import ONE, Dist, FinSpace, Kernel, compose, fmt_rat, identity, push
from .errors import InvalidPartition, NotMeasurePreserving, SpaceMismatch


class ProbSpace:
    __slots__ = ("space", "p", "_support")

    def __init__(self, space_or_dist, p: Optional[Dist] = None):
        if p is None:
            p = space_or_dist
            space = p.space
        else:
            space = space_or_dist
        if p.space != space:
            raise SpaceMismatch("measure lives on a different space")
        self.space = space
        self.p = p
        self._support = p.support()

    @property
    def support(self) -> tuple:
        return self._support

    def __len__(self):
        return len(self.space)

    def __eq__(self, other):
        return isinstance(other, ProbSpace) and self.p == other.p

    def __hash__(self):
        return hash(self.p)

    def __repr__(self):
        return f"ProbSpace({self.p!r})"


def _canonical_rows(kernel: Kernel, src: ProbSpace, dst: ProbSpace) -> tuple:
    prior = {j: v for j, v in enumerate(dst.p.mass) if v}
    on = set(src.support)
    return tuple(kernel._rows[i] if i in on else prior for i in range(len(src.space)))


class PSMorphism:
    """A measure-preserving kernel ``(X, p) -> (Y, q)``."""

    __slots__ = ("src", "dst", "kernel", "_canon")

    def __init__(self, src: ProbSpace, dst: ProbSpace, kernel: Kernel, *, check: bool = True):
        if kernel.source != src.space or kernel.target != dst.space:
            raise SpaceMismatch("kernel spaces do not match the probability spaces")
        if check:
            image = push(kernel, src.p)
            if image != dst.p:
                raise NotMeasurePreserving(
                    f"kernel pushes the source measure to {image!r}, expected {dst.p!r}")
        self.src = src
        self.dst = dst
        self.kernel = kernel
        self._canon = None

    @property
    def canonical(self) -> Kernel:
        if self._canon is None:
            self._canon = Kernel._raw(self.src.space, self.dst.space,
                                      _canonical_rows(self.kernel, self.src, self.dst))
        return self._canon

    def __eq__(self, other):
        return (isinstance(other, PSMorphism) and self.src == other.src
                and self.dst == other.dst and self.canonical == other.canonical)

    def __hash__(self):
        return hash((self.src, self.dst, self.canonical))

    def __matmul__(self, other: "PSMorphism") -> "PSMorphism":
        return ps_compose(self, other)

    def __repr__(self):
        return f"PSMorphism({self.kernel!r})"

    @property
    def dagger(self) -> "PSMorphism":
        return bayesian_inverse(self)


def ps_identity(x: ProbSpace) -> PSMorphism:
    return PSMorphism(x, x, identity(x.space), check=False)


def ps_compose(g: PSMorphism, f: PSMorphism) -> PSMorphism:
    if f.dst != g.src:
        raise SpaceMismatch("cannot compose: intermediate probability spaces differ")
    return PSMorphism(f.src, g.dst, compose(g.kernel, f.kernel), check=False)


def state_morphism(x: ProbSpace) -> PSMorphism:
    """The measure ``p`` as the unique morphism ``(I, δ) -> (X, p)``."""
    from .core import UNIT
    unit = ProbSpace(Dist.point(UNIT, "*"))
    return PSMorphism(unit, x, x.p.as_kernel(), check=False)


def as_equal(f: Kernel, g: Kernel, p: Dist) -> bool:
    """``f ≃_p g``: the columns agree at every state of positive mass."""
    if f.source != g.source or f.target != g.target:
        raise SpaceMismatch("a.s. equality needs parallel kernels")
    if p.space != f.source:
        raise SpaceMismatch("measure is not on the kernels' source")
    return all(f._rows[i] == g._rows[i] for i in p.support())


def ps_equal(f: PSMorphism, g: PSMorphism) -> bool:
    return as_equal(f.kernel, g.kernel, f.src.p)


def bayesian_inverse(f: PSMorphism) -> PSMorphism:
    """The dagger ``f†(x|y) = p(x) f(y|x) / q(y)``.

    Columns at null states of the target are set to the prior ``p``.
    """
    p, q = f.src.p, f.dst.p
    rows = [dict() for _ in range(len(f.dst.space))]
    for x, px in enumerate(p.mass):
        if px:
            for y, v in f.kernel._rows[x].items():
                rows[y][x] = px * v / q.mass[y]
    prior = {x: v for x, v in enumerate(p.mass) if v}
    for y, qy in enumerate(q.mass):
        if not qy:
            rows[y] = dict(prior)
    return PSMorphism(f.dst, f.src, Kernel._raw(f.dst.space, f.src.space, rows), check=False)


def dagger(f: PSMorphism) -> PSMorphism:
    return bayesian_inverse(f)


def is_as_deterministic(f: PSMorphism) -> bool:
    rows = f.kernel._rows
    return all(len(rows[i]) == 1 for i in f.src.support)


def check_dag_id(f: PSMorphism) -> bool:
    """a.s. determinism of ``f`` agrees with ``f ∘ f† ≃ id``."""
    back = compose(f.kernel, bayesian_inverse(f).kernel)
    return is_as_deterministic(f) == as_equal(back, identity(f.dst.space), f.dst.p)


def _support_order(x: ProbSpace):
    labels = x.space.labels
    return sorted(x.support, key=lambda i: (x.p.mass[i], labels[i]))


def find_ps_iso(a: ProbSpace, b: ProbSpace):
    """Return a pair ``(f, g)`` of mutually inverse PS-isomorphisms, or ``None``.

    Finite PS-isomorphisms are mass-preserving bijections of supports. States
    are matched in order of (mass, label).
    """
    sa, sb = _support_order(a), _support_order(b)
    if [a.p.mass[i] for i in sa] != [b.p.mass[j] for j in sb]:
        return None
    fwd = dict(zip(sa, sb))
    bwd = dict(zip(sb, sa))
    fall_a, fall_b = fwd[sa[0]], bwd[sb[0]]
    f_rows = [{fwd.get(i, fall_a): ONE} for i in range(len(a.space))]
    g_rows = [{bwd.get(j, fall_b): ONE} for j in range(len(b.space))]
    f = PSMorphism(a, b, Kernel._raw(a.space, b.space, f_rows))
    g = PSMorphism(b, a, Kernel._raw(b.space, a.space, g_rows))
    return f, g


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocks of state indices covering a space."""

    space: FinSpace
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(sorted(self.space.index(s) for s in b)) for b in self.blocks)
        seen = set()
        for b in blocks:
            if not b:
                raise InvalidPartition("empty block")
            for i in b:
                if i in seen:
                    raise InvalidPartition(f"state {self.space.labels[i]!r} is in two blocks")
                seen.add(i)
        if len(seen) != len(self.space):
            missing = [self.space.labels[i] for i in range(len(self.space)) if i not in seen]
            raise InvalidPartition(f"states not covered: {missing}")
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    @classmethod
    def from_labels(cls, space: FinSpace, blocks: Iterable[Iterable[str]]) -> "Partition":
        return cls(space, tuple(tuple(space.index(s) for s in b) for b in blocks))

    @classmethod
    def discrete(cls, space: FinSpace) -> "Partition":
        return cls(space, tuple((i,) for i in range(len(space))))

    @classmethod
    def indiscrete(cls, space: FinSpace) -> "Partition":
        return cls(space, (tuple(range(len(space))),))

    @cached_property
    def block_of(self) -> tuple:
        out = [0] * len(self.space)
        for b, members in enumerate(self.blocks):
            for i in members:
                out[i] = b
        return tuple(out)

    def label_blocks(self) -> list:
        return [[self.space.labels[i] for i in b] for b in self.blocks]

    def block_names(self) -> list:
        return ["{" + ",".join(names) + "}" for names in self.label_blocks()]

    def quotient_space(self) -> FinSpace:
        return FinSpace(self.block_names())

    def is_finer_than(self, other: "Partition") -> bool:
        return all(len({other.block_of[i] for i in b}) == 1 for b in self.blocks)

    def generated_sets(self) -> set:
        """Every union of blocks, as a frozenset of indices."""
        out = set()
        n = len(self.blocks)
        for mask in range(1 << n):
            out.add(frozenset(i for b in range(n) if mask >> b & 1 for i in self.blocks[b]))
        return out

    def __len__(self):
        return len(self.blocks)


def block_masses(p: Dist, partition: Partition) -> list:
    return [p.measure(b) for b in partition.blocks]


def quotient_by_partition(x: ProbSpace, partition: Partition):
    """The quotient probability space and the projection ``r_P`` onto it."""
    if partition.space != x.space:
        raise InvalidPartition("partition is on a different space")
    qspace = partition.quotient_space()
    qp = Dist(qspace, block_masses(x.p, partition), check=False)
    target = ProbSpace(qp)
    rows = [{b: ONE} for b in partition.block_of]
    r = PSMorphism(x, target, Kernel._raw(x.space, qspace, rows), check=False)
    return target, r


def positive_part(x: ProbSpace) -> ProbSpace:
    """The support of ``x`` as a space in its own right."""
    labels = [x.space.labels[i] for i in x.support]
    return ProbSpace(Dist(FinSpace(labels), [x.p.mass[i] for i in x.support], check=False))


def partitions_as_isomorphic(x: ProbSpace, fine: Partition, coarse: Partition) -> bool:
    """Whether the σ-algebras of ``fine`` and of the coarser ``coarse`` agree mod null sets.

    Every fine block ``B`` lies in a coarse block ``C``; the only candidates in
    the coarse σ-algebra are ``∅`` and unions containing ``C``, so ``B`` is
    matched iff ``p(B) = 0`` or ``p(C \\ B) = 0``.
    """
    if not fine.is_finer_than(coarse):
        raise InvalidPartition("second partition must be coarser than the first")
    p = x.p
    for b in fine.blocks:
        c = coarse.blocks[coarse.block_of[b[0]]]
        rest = set(c) - set(b)
        if p.measure(b) != 0 and p.measure(rest) != 0:
            return False
    qa, _ = quotient_by_partition(x, fine)
    qb, _ = quotient_by_partition(x, coarse)
    if find_ps_iso(qa, qb) is None:  # pragma: no cover - would contradict the criterion
        from .errors import ConsistencyError
        raise ConsistencyError("null-difference criterion held but quotients are not isomorphic")
    return True


def format_dist(p: Dist) -> str:
    return "(" + ", ".join(fmt_rat(v) for v in p.mass) + ")"


__all__ = [
    "ProbSpace", "PSMorphism", "Partition", "as_equal", "ps_equal", "bayesian_inverse",
    "dagger", "is_as_deterministic", "check_dag_id", "find_ps_iso", "quotient_by_partition",
    "partitions_as_isomorphic", "ps_identity", "ps_compose", "state_morphism",
    "positive_part", "block_masses", "format_dist",
]
