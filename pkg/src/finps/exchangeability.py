"""Permutation dynamics on finite products ``X^n`` and the finite de Finetti picture.

At finite ``n`` the extreme exchangeable measures are the uniform measures on
single orbits (type classes), not i.i.d. products; :func:`finite_definetti`
returns that orbit decomposition.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as _cartesian
from math import comb

from .core import ONE, ZERO, Dist, FinSpace, Kernel, fmt_rat, push
from .dynamics import (DynSystem, InvariantObject, ergodic_decomposition, invariant_object,
                       is_right_invariant)
from .errors import FinPSError, NotExchangeable
from .ps import Partition, ProbSpace, PSMorphism, is_as_deterministic

MAX_PRODUCT_SIZE = 65536


def orbit_count(k: int, n: int) -> int:
    """Multisets of size ``n`` over ``k`` symbols: ``C(n+k-1, n)``."""
    return comb(n + k - 1, n)


@dataclass(frozen=True)
class ProductSpace:
    base: FinSpace
    n: int
    space: FinSpace

    def tuple_of(self, index: int) -> tuple:
        k = len(self.base)
        digits = []
        for _ in range(self.n):
            index, d = divmod(index, k)
            digits.append(d)
        return tuple(reversed(digits))

    def index_of(self, tup) -> int:
        k = len(self.base)
        out = 0
        for d in tup:
            out = out * k + d
        return out


def product_power(base: FinSpace, n: int) -> ProductSpace:
    if n < 1:
        raise FinPSError("n must be positive")
    if len(base) ** n > MAX_PRODUCT_SIZE:
        raise FinPSError(f"|X|^n = {len(base) ** n} exceeds the limit of {MAX_PRODUCT_SIZE}")
    labels = ["(" + ",".join(base.labels[d] for d in t) + ")"
              for t in _cartesian(range(len(base)), repeat=n)]
    return ProductSpace(base, n, FinSpace(labels))


@dataclass(frozen=True)
class OrbitStructure:
    product: ProductSpace
    orbits: Partition
    types: tuple  # per orbit, the count of each base symbol


def orbit_structure(base: FinSpace, n: int) -> OrbitStructure:
    """Type classes of ``X^n``: tuples with the same multiset of entries."""
    prod = product_power(base, n)
    k = len(base)
    groups: dict = {}
    for i in range(len(prod.space)):
        counts = Counter(prod.tuple_of(i))
        key = tuple(counts.get(d, 0) for d in range(k))
        groups.setdefault(key, []).append(i)
    items = sorted(groups.items(), key=lambda kv: kv[1][0])
    part = Partition(prod.space, tuple(tuple(v) for _, v in items))
    return OrbitStructure(prod, part, tuple(key for key, _ in items))


def adjacent_transposition(prod: ProductSpace, j: int) -> Kernel:
    """The deterministic kernel swapping coordinates ``j`` and ``j+1``."""
    rows = []
    for i in range(len(prod.space)):
        t = list(prod.tuple_of(i))
        t[j], t[j + 1] = t[j + 1], t[j]
        rows.append({prod.index_of(t): ONE})
    return Kernel._raw(prod.space, prod.space, rows)


def exchangeability_witness(prod: ProductSpace, p: Dist):
    """``(j, tuple, swapped)`` for the first adjacent swap that moves mass, else ``None``."""
    for j in range(prod.n - 1):
        for i in range(len(prod.space)):
            t = list(prod.tuple_of(i))
            t[j], t[j + 1] = t[j + 1], t[j]
            s = prod.index_of(t)
            if p.mass[i] != p.mass[s]:
                return j, prod.space.labels[i], prod.space.labels[s]
    return None


def _require_exchangeable(prod: ProductSpace, p: Dist):
    if p.space != prod.space:
        raise FinPSError("distribution is not on the product space")
    w = exchangeability_witness(prod, p)
    if w is not None:
        j, a, b = w
        raise NotExchangeable(
            f"transposition ({j + 1} {j + 2}) moves mass: p{a} = {fmt_rat(p[a])} "
            f"but p{b} = {fmt_rat(p[b])}",
            {"transposition": (j + 1, j + 2), "tuple": a, "image": b})


def permutation_system(base: FinSpace, n: int, p: Dist) -> DynSystem:
    """``S_n`` acting on ``X^n``, generated by the adjacent transpositions."""
    prod = product_power(base, n)
    _require_exchangeable(prod, p)
    gens = [adjacent_transposition(prod, j) for j in range(n - 1)]
    if not gens:
        # n = 1: the trivial group, represented by the identity.
        from .core import identity
        gens = [identity(prod.space)]
        names = ["id"]
    else:
        names = [f"({j + 1} {j + 2})" for j in range(n - 1)]
    return DynSystem(ProbSpace(p), gens, names=names)


def finite_definetti(base: FinSpace, n: int, p: Dist) -> list:
    """Orbit decomposition: ``[(p(orbit), uniform on orbit), ...]`` over positive orbits."""
    sys = permutation_system(base, n, p)
    return ergodic_decomposition(sys)


def uniform_on_orbit_rdag(base: FinSpace, n: int, p: Dist) -> PSMorphism:
    """``r†`` of the permutation system: each orbit spread uniformly over its points."""
    sys = permutation_system(base, n, p)
    return invariant_object(sys).r_dag


def iid(base: FinSpace, n: int, q: Dist) -> Dist:
    """The product measure ``q^{⊗n}`` on ``X^n``."""
    prod = product_power(base, n)
    mass = []
    for i in range(len(prod.space)):
        v = ONE
        for d in prod.tuple_of(i):
            v *= q.mass[d]
        mass.append(v)
    return Dist(prod.space, mass, check=False)


def uniform_on_orbit(base: FinSpace, n: int, orbit: int) -> Dist:
    orbits = orbit_structure(base, n)
    members = orbits.orbits.blocks[orbit]
    w = Fraction(1, len(members))
    return Dist(orbits.product.space, {i: w for i in members})


def is_product_measure(base: FinSpace, n: int, p: Dist) -> bool:
    """Whether ``p`` equals the product of its one-dimensional marginals."""
    prod = product_power(base, n)
    k = len(base)
    marg = [[ZERO] * k for _ in range(n)]
    for i, v in enumerate(p.mass):
        if v:
            for pos, d in enumerate(prod.tuple_of(i)):
                marg[pos][d] += v
    for i, v in enumerate(p.mass):
        w = ONE
        for pos, d in enumerate(prod.tuple_of(i)):
            w *= marg[pos][d]
        if w != v:
            return False
    return True


@dataclass
class HewittSavageReport:
    ergodic: bool
    p_inv_deterministic: bool
    invariant_functions_deterministic: bool
    functions_checked: int
    uniform_on_single_orbit: bool
    product_measure: bool
    notes: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return (self.ergodic == self.p_inv_deterministic
                == self.invariant_functions_deterministic == self.uniform_on_single_orbit)

    def as_dict(self) -> dict:
        return {
            "ergodic": self.ergodic,
            "p_inv_deterministic": self.p_inv_deterministic,
            "invariant_functions_deterministic": self.invariant_functions_deterministic,
            "functions_checked": self.functions_checked,
            "uniform_on_single_orbit": self.uniform_on_single_orbit,
            "product_measure": self.product_measure,
            "equivalences_hold": self.consistent,
            "notes": list(self.notes),
        }


def _orbit_functions(n_orbits: int, limit: int, rng: random.Random):
    """Maps from orbits to ``{0..k-1}`` for ``k ≤ n_orbits``; sampled past ``limit``."""
    total = sum(k ** n_orbits for k in range(1, n_orbits + 1))
    if total <= limit:
        for k in range(1, n_orbits + 1):
            for f in _cartesian(range(k), repeat=n_orbits):
                yield k, f
        return
    yield n_orbits, tuple(range(n_orbits))
    for _ in range(limit - 1):
        k = rng.randint(1, n_orbits)
        yield k, tuple(rng.randrange(k) for _ in range(n_orbits))


def hewitt_savage_finite(base: FinSpace, n: int, p: Dist, *, limit: int = 5000,
                         seed: int = 0) -> HewittSavageReport:
    """Check that the finite Hewitt-Savage conditions agree for ``p``.

    Ergodicity, determinism of ``p_inv``, and "every a.s.-deterministic
    invariant function pushes ``p`` to a point mass" are evaluated
    independently. Dirac morphisms constant on orbits stand in for all
    a.s.-deterministic invariant ones (they agree up to null sets).
    """
    sys = permutation_system(base, n, p)
    inv: InvariantObject = invariant_object(sys)
    orbits = orbit_structure(base, n)
    positive = [b for b in inv.blocks.blocks if p.measure(b) > 0]
    ergodic = len(positive) == 1
    p_inv_det = inv.p_inv.is_point_mass()

    rng = random.Random(seed)
    all_det = True
    checked = 0
    block_of = orbits.orbits.block_of
    for k, f in _orbit_functions(len(orbits.orbits), limit, rng):
        target = FinSpace(str(i) for i in range(k))
        kern = Kernel._raw(sys.space, target, [{f[block_of[i]]: ONE} for i in range(len(sys.space))])
        image = push(kern, p)
        mor = PSMorphism(sys.base, ProbSpace(image), kern, check=False)
        if not (is_as_deterministic(mor) and is_right_invariant(mor, sys)):  # pragma: no cover
            raise FinPSError("orbit-constant function failed invariance")
        checked += 1
        if not image.is_point_mass():
            all_det = False
            break

    single_orbit = False
    if len(positive) == 1:
        block = positive[0]
        vals = {p.mass[i] for i in block}
        single_orbit = len(vals) == 1 and p.measure(block) == 1
    report = HewittSavageReport(ergodic, p_inv_det, all_det, checked, single_orbit,
                                is_product_measure(base, n, p))
    if report.product_measure != report.ergodic:
        report.notes.append("at finite n, product measures and ergodic measures differ")
    return report
