"""Stochastic dynamical systems on finite probability spaces.

The acting monoid is the free monoid on a finite list of generator kernels.
Almost-sure invariance under the generators is the same as invariance under
every word, so only generators are ever inspected.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import ONE, ZERO, Dist, Kernel, compose, push
from .errors import ConsistencyError, NotMeasurePreserving, PreconditionError, SpaceMismatch
from .ps import (Partition, ProbSpace, PSMorphism, as_equal, bayesian_inverse,
                 block_masses, is_as_deterministic)


class DynSystem:
    """A probability space with measure-preserving generator kernels."""

    __slots__ = ("base", "generators", "names")

    def __init__(self, base: ProbSpace, generators: Sequence[Kernel], names=None):
        generators = tuple(generators)
        if not generators:
            raise ValueError("a dynamical system needs at least one generator")
        names = tuple(names) if names is not None else tuple(f"m{i}" for i in range(len(generators)))
        if len(names) != len(generators):
            raise ValueError("one name per generator")
        support = set(base.support)
        for name, m in zip(names, generators):
            if m.source != base.space or m.target != base.space:
                raise SpaceMismatch(f"generator {name} is not an endomorphism of the base space")
            if push(m, base.p) != base.p:
                raise NotMeasurePreserving(f"generator {name} does not preserve the measure",
                                           generator=name)
            # Support absorption is implied by invariance; keep it as a guard.
            for x in support:
                for y in m._rows[x]:
                    if y not in support:  # pragma: no cover
                        raise ConsistencyError(
                            f"generator {name} leaks mass from {base.space.labels[x]!r}")
        self.base = base
        self.generators = generators
        self.names = names

    @property
    def space(self):
        return self.base.space

    @property
    def p(self) -> Dist:
        return self.base.p

    def morphisms(self):
        return [PSMorphism(self.base, self.base, m, check=False) for m in self.generators]

    def __repr__(self):
        return f"DynSystem({self.base!r}, {len(self.generators)} generators)"


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        a, b = self.find(i), self.find(j)
        if a != b:
            self.parent[max(a, b)] = min(a, b)

    def groups(self, members):
        out = {}
        for i in members:
            out.setdefault(self.find(i), []).append(i)
        return sorted(out.values(), key=lambda g: g[0])


def _weak_components(n: int, generators, members: set) -> list:
    uf = _UnionFind(n)
    for m in generators:
        for x in members:
            for y in m._rows[x]:
                if y in members:
                    uf.union(x, y)
    return uf.groups(sorted(members))


def invariant_partition(sys: DynSystem, *, group_null: bool = False) -> Partition:
    """The atoms of the almost-surely invariant σ-algebra.

    Positive blocks are the weak components of the transition graph on the
    support. The a.s. condition says nothing at null states and the support
    never leaks, so every null state is its own block. ``group_null=True``
    instead merges null states into the weak components of the graph
    restricted to them; that partition is coarser but generates the same
    σ-algebra up to null sets.
    """
    n = len(sys.space)
    on = set(sys.base.support)
    off = set(range(n)) - on
    if group_null:
        null_blocks = _weak_components(n, sys.generators, off)
    else:
        null_blocks = [[i] for i in sorted(off)]
    blocks = _weak_components(n, sys.generators, on) + null_blocks
    return Partition(sys.space, tuple(tuple(b) for b in blocks))


def strict_invariant_partition(sys: DynSystem) -> Partition:
    """Blocks generating the strictly invariant sets (invariance at every state)."""
    n = len(sys.space)
    blocks = _weak_components(n, sys.generators, set(range(n)))
    return Partition(sys.space, tuple(tuple(b) for b in blocks))


def is_as_invariant_set(sys: DynSystem, subset, *, strict: bool = False) -> bool:
    """``m(A|x) = 1_A(x)`` for every generator, on the support (or everywhere)."""
    subset = frozenset(subset)
    states = range(len(sys.space)) if strict else sys.base.support
    for m in sys.generators:
        for x in states:
            inside = sum((v for y, v in m._rows[x].items() if y in subset), ZERO)
            if inside != (ONE if x in subset else ZERO):
                return False
    return True


@dataclass(frozen=True)
class InvariantObject:
    """The quotient by the invariant σ-algebra together with its structure maps."""

    blocks: Partition
    space: ProbSpace
    r: PSMorphism
    r_dag: PSMorphism
    e_D: PSMorphism

    @property
    def p_inv(self) -> Dist:
        return self.space.p

    @property
    def positive_blocks(self) -> list:
        return [b for b, w in zip(self.blocks.blocks, self.p_inv.mass) if w > 0]

    def block_index(self, state) -> int:
        return self.blocks.block_of[self.blocks.space.index(state)]


def invariant_object(sys: DynSystem) -> InvariantObject:
    blocks = invariant_partition(sys)
    p = sys.p
    qspace = blocks.quotient_space()
    masses = block_masses(p, blocks)
    target = ProbSpace(Dist(qspace, masses, check=False))
    r = PSMorphism(sys.base, target,
                   Kernel._raw(sys.space, qspace, [{b: ONE} for b in blocks.block_of]),
                   check=False)
    dag_rows = []
    for members, w in zip(blocks.blocks, masses):
        if w:
            dag_rows.append({i: p.mass[i] / w for i in members if p.mass[i]})
        else:
            u = Fraction(1, len(members))
            dag_rows.append({i: u for i in members})
    r_dag = PSMorphism(target, sys.base, Kernel._raw(qspace, sys.space, dag_rows), check=False)
    e = PSMorphism(sys.base, sys.base, compose(r_dag.kernel, r.kernel), check=False)
    return InvariantObject(blocks, target, r, r_dag, e)


def is_right_invariant(f: PSMorphism, sys: DynSystem) -> bool:
    """``f ∘ m ≃_p f`` for every generator."""
    if f.src != sys.base:
        raise SpaceMismatch("morphism does not start at the system's base space")
    return all(as_equal(compose(f.kernel, m), f.kernel, sys.p) for m in sys.generators)


def is_left_invariant(g: PSMorphism, sys: DynSystem) -> bool:
    """``m ∘ g ≃_q g`` for every generator."""
    if g.dst != sys.base:
        raise SpaceMismatch("morphism does not end at the system's base space")
    return all(as_equal(compose(m, g.kernel), g.kernel, g.src.p) for m in sys.generators)


def det_invariance_witness(f, sys: DynSystem, *, strict: bool = False):
    """First ``(generator, x, x')`` with ``m(x'|x) > 0`` but ``f(.|x') != f(.|x)``.

    ``f`` may be a kernel or a morphism out of the base space. With
    ``strict=True`` every state counts, not just the support.
    """
    kernel = f.kernel if isinstance(f, PSMorphism) else f
    if kernel.source != sys.space:
        raise SpaceMismatch("morphism does not start at the system's base space")
    states = range(len(sys.space)) if strict else sys.base.support
    rows = kernel._rows
    for name, m in zip(sys.names, sys.generators):
        for x in states:
            for y in m._rows[x]:
                if rows[y] != rows[x]:
                    return name, x, y
    return None


def is_det_invariant(f, sys: DynSystem, *, strict: bool = False) -> bool:
    return det_invariance_witness(f, sys, strict=strict) is None


def _right_invariance_witness(f: PSMorphism, sys: DynSystem):
    p = sys.p
    for name, m in zip(sys.names, sys.generators):
        fm = compose(f.kernel, m)
        for x in p.support():
            if fm._rows[x] != f.kernel._rows[x]:
                return {"generator": name, "state": sys.space.labels[x]}
    return None


def factor_right_invariant(f: PSMorphism, sys: DynSystem, inv: Optional[InvariantObject] = None) -> PSMorphism:
    """The a.s.-unique ``f̃`` with ``f̃ ∘ r ≃ f`` for a right-invariant ``f``."""
    if f.src != sys.base:
        raise SpaceMismatch("morphism does not start at the system's base space")
    witness = _right_invariance_witness(f, sys)
    if witness:
        raise PreconditionError("morphism is not right-invariant", witness)
    inv = inv or invariant_object(sys)
    p = sys.p
    rows = []
    for members in inv.blocks.blocks:
        rep = next((i for i in members if p.mass[i]), members[0])
        rows.append(dict(f.kernel._rows[rep]))
    out = PSMorphism(inv.space, f.dst, Kernel._raw(inv.space.space, f.dst.space, rows))
    if not as_equal(compose(out.kernel, inv.r.kernel), f.kernel, p):
        raise ConsistencyError("factorization through the invariant object failed")
    if is_as_deterministic(out) != is_as_deterministic(f):
        raise ConsistencyError("determinism did not transfer along the factorization")
    return out


def factor_left_invariant(g: PSMorphism, sys: DynSystem, inv: Optional[InvariantObject] = None) -> PSMorphism:
    """The a.s.-unique ``g̃ = r ∘ g`` with ``r† ∘ g̃ ≃ g`` for a left-invariant ``g``."""
    if g.dst != sys.base:
        raise SpaceMismatch("morphism does not end at the system's base space")
    q = g.src.p
    for name, m in zip(sys.names, sys.generators):
        mg = compose(m, g.kernel)
        for y in q.support():
            if mg._rows[y] != g.kernel._rows[y]:
                raise PreconditionError("morphism is not left-invariant",
                                        {"generator": name, "state": g.src.space.labels[y]})
    inv = inv or invariant_object(sys)
    out = PSMorphism(g.src, inv.space, compose(inv.r.kernel, g.kernel), check=False)
    if not as_equal(compose(inv.r_dag.kernel, out.kernel), g.kernel, q):
        raise ConsistencyError("factorization through the invariant object failed")
    return out


def is_ergodic(sys: DynSystem) -> bool:
    inv = invariant_object(sys)
    return inv.p_inv.is_point_mass()


def ergodic_decomposition(sys: DynSystem) -> list:
    """``[(weight, component), ...]``, one entry per positive invariant block."""
    inv = invariant_object(sys)
    out = []
    for b, w in enumerate(inv.p_inv.mass):
        if w:
            out.append((w, inv.r_dag.kernel.dist_at(b)))
    return out


def mixture(decomposition) -> Dist:
    """``Σ weight · component``."""
    space = decomposition[0][1].space
    acc = [ZERO] * len(space)
    for w, comp in decomposition:
        for i, v in enumerate(comp.mass):
            acc[i] += w * v
    return Dist(space, acc, check=False)


def reduce_decomposition(sys: DynSystem, h: PSMorphism, k: PSMorphism,
                         inv: Optional[InvariantObject] = None) -> PSMorphism:
    """Reduce another ergodic decomposition ``(h, k)`` to the canonical one.

    Returns the a.s.-deterministic ``d = r ∘ k`` with ``r† ∘ d ≃ k`` and
    ``d ∘ h ≃ g̃``, where ``g = k ∘ h``.
    """
    inv = inv or invariant_object(sys)
    d = factor_left_invariant(k, sys, inv)
    if not is_as_deterministic(d):
        raise PreconditionError("decomposition is not ergodic: r∘k is not a.s. deterministic")
    g = PSMorphism(h.src, sys.base, compose(k.kernel, h.kernel), check=False)
    g_tilde = factor_left_invariant(g, sys, inv)
    if not as_equal(compose(d.kernel, h.kernel), g_tilde.kernel, h.src.p):
        raise ConsistencyError("reduction does not commute with the canonical decomposition")
    return d


def reverse_system(sys: DynSystem) -> DynSystem:
    """Same base, each generator replaced by its Bayesian inverse."""
    gens = [bayesian_inverse(m).kernel for m in sys.morphisms()]
    return DynSystem(sys.base, gens, names=[f"{n}†" for n in sys.names])


def alt_erg_holds(e: Kernel, p: Dist, *, exhaustive_limit: int = 12, samples: int = 10_000,
                  rng: Optional[random.Random] = None) -> bool:
    """``Σ_{x∈A} e(B|x) p(x) = p(A) p(B)`` for all subsets ``A, B``.

    Exhaustive over all pairs of subsets up to ``exhaustive_limit`` states,
    otherwise checked on ``samples`` random pairs.
    """
    n = len(p.space)
    # J(x, y) = p(x) e(y|x) - p(x) p(y); the identity is that J sums to zero over A×B.
    joint = [[p.mass[x] * e._rows[x].get(y, ZERO) - p.mass[x] * p.mass[y] for y in range(n)]
             for x in range(n)]
    if n <= exhaustive_limit:
        return _all_rectangles_vanish(joint)
    rng = rng or random.Random(0)
    for _ in range(samples):
        a = [x for x in range(n) if rng.random() < 0.5]
        b = [y for y in range(n) if rng.random() < 0.5]
        if sum((joint[x][y] for x in a for y in b), ZERO):
            return False
    return True


def _all_rectangles_vanish(joint) -> bool:
    import math

    import numpy as np

    n = len(joint)
    den = 1
    for row in joint:
        for v in row:
            den = math.lcm(den, v.denominator)
    ints = [[int(v * den) for v in row] for row in joint]
    bound = max((abs(v) for row in ints for v in row), default=0) * n * n
    masks = np.array([[(a >> i) & 1 for i in range(n)] for a in range(1 << n)], dtype=np.int64)
    if bound < 2 ** 62:
        j = np.array(ints, dtype=np.int64)
        rect = masks @ j @ masks.T
        return not rect.any()
    # Entries too large for int64: fall back to exact Python integers.
    row_sums = []
    for a in range(1 << n):
        acc = [0] * n
        for x in range(n):
            if a >> x & 1:
                for y in range(n):
                    acc[y] += ints[x][y]
        row_sums.append(acc)
    for acc in row_sums:
        for b in range(1 << n):
            if sum(acc[y] for y in range(n) if b >> y & 1):
                return False
    return True


@dataclass
class EquilibriumReport:
    absorbs_generators: bool
    right_invariance_criterion: bool
    left_invariance_criterion: bool
    alt_erg_matches: bool
    self_adjoint: bool
    ergodic: bool
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.absorbs_generators and self.right_invariance_criterion
                and self.left_invariance_criterion and self.alt_erg_matches and self.self_adjoint)

    def as_dict(self) -> dict:
        return {
            "absorbs_generators": self.absorbs_generators,
            "right_invariance_criterion": self.right_invariance_criterion,
            "left_invariance_criterion": self.left_invariance_criterion,
            "alt_erg_matches": self.alt_erg_matches,
            "self_adjoint": self.self_adjoint,
            "ergodic": self.ergodic,
            "ok": self.ok,
            "details": list(self.details),
        }


def _random_kernel(rng: random.Random, source, target, max_den=6) -> Kernel:
    rows = []
    for _ in range(len(source)):
        raw = [rng.randint(0, max_den) if rng.random() < 0.6 else 0 for _ in range(len(target))]
        if not any(raw):
            raw[rng.randrange(len(target))] = 1
        total = sum(raw)
        rows.append({j: Fraction(v, total) for j, v in enumerate(raw) if v})
    return Kernel._raw(source, target, rows)


def equilibrium_checks(sys: DynSystem, *, samples: int = 8, seed: int = 0,
                       inv: Optional[InvariantObject] = None) -> EquilibriumReport:
    """Check the transition-to-equilibrium laws on one system.

    (i) ``e m ≃ m e ≃ e`` for every generator; (ii) right/left invariance is
    the same as invariance under ``e``, on sampled morphisms; (iii) the
    system is ergodic iff the rectangle identity holds; (iv) ``e† ≃ e``.
    """
    from .core import FinSpace

    inv = inv or invariant_object(sys)
    p = sys.p
    e = inv.e_D.kernel
    details = []

    absorbs = True
    for name, m in zip(sys.names, sys.generators):
        if not (as_equal(compose(e, m), e, p) and as_equal(compose(m, e), e, p)):
            absorbs = False
            details.append(f"e_D does not absorb generator {name}")

    rng = random.Random(seed)
    right_ok = left_ok = True
    for s in range(samples):
        ysize = rng.randint(1, 4)
        yspace = FinSpace(f"y{i}" for i in range(ysize))
        raw = _random_kernel(rng, sys.space, yspace)
        candidates = [raw, compose(raw, e), compose(raw, compose(inv.r_dag.kernel, inv.r.kernel))]
        for k in candidates:
            f = PSMorphism(sys.base, ProbSpace(push(k, p)), k, check=False)
            if is_right_invariant(f, sys) != as_equal(compose(k, e), k, p):
                right_ok = False
                details.append(f"right-invariance criterion failed on sample {s}")
        # Left side: genuine morphisms (A, q) -> (X, p), obtained as Bayesian
        # inverses of random kernels out of (X, p) and out of the invariant object.
        asize = rng.randint(1, 4)
        aspace = FinSpace(f"a{i}" for i in range(asize))
        l = _random_kernel(rng, sys.space, aspace)
        l_mor = PSMorphism(sys.base, ProbSpace(push(l, p)), l, check=False)
        k = _random_kernel(rng, inv.space.space, aspace)
        k_mor = PSMorphism(inv.space, ProbSpace(push(k, inv.p_inv)), k, check=False)
        plain = bayesian_inverse(l_mor)
        through = bayesian_inverse(k_mor)
        g_candidates = [
            plain,
            PSMorphism(plain.src, sys.base, compose(e, plain.kernel), check=False),
            PSMorphism(through.src, sys.base, compose(inv.r_dag.kernel, through.kernel),
                       check=False),
        ]
        for g in g_candidates:
            q = g.src.p
            if is_left_invariant(g, sys) != as_equal(compose(e, g.kernel), g.kernel, q):
                left_ok = False
                details.append(f"left-invariance criterion failed on sample {s}")

    ergodic = inv.p_inv.is_point_mass()
    alt = alt_erg_holds(e, p, rng=random.Random(seed))
    if alt != ergodic:
        details.append("rectangle identity disagrees with ergodicity")

    dag = bayesian_inverse(inv.e_D).kernel
    self_adj = as_equal(dag, e, p) and all(
        p.mass[x] * e._rows[x].get(y, ZERO) == p.mass[y] * e._rows[y].get(x, ZERO)
        for x in range(len(p.space)) for y in range(len(p.space)))
    if not self_adj:
        details.append("e_D is not self-adjoint")
    return EquilibriumReport(absorbs, right_ok, left_ok, alt == ergodic, self_adj, ergodic, details)
