"""Seeded generation of random finite instances.

Every random object is a pure function of ``(seed, case index, bounds)`` so
that a failing case can be rebuilt from its report.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import ONE, ZERO, Dist, FinSpace, Kernel, compose, push
from .dynamics import DynSystem
from .errors import FinPSError
from .ps import ProbSpace, PSMorphism, bayesian_inverse


@dataclass(frozen=True)
class CaseGen:
    seed: int = 0
    max_states: int = 5
    max_den: int = 32

    def rng(self, case: int) -> random.Random:
        return random.Random(f"{self.seed}/{case}/{self.max_states}/{self.max_den}")


def rand_weights(rng: random.Random, n: int, max_den: int = 32, density: float = 1.0) -> list:
    """``n`` nonnegative rationals (denominators ≤ ``max_den``) renormalized to sum 1."""
    raw = [Fraction(rng.randint(1, max_den), rng.randint(1, max_den)) if rng.random() < density
           else ZERO for _ in range(n)]
    if not any(raw):
        raw[rng.randrange(n)] = ONE
    total = sum(raw, ZERO)
    return [v / total for v in raw]


def rand_space(rng: random.Random, lo: int, hi: int, prefix: str = "s") -> FinSpace:
    return FinSpace(f"{prefix}{i}" for i in range(rng.randint(lo, hi)))


def rand_dist(rng: random.Random, space: FinSpace, max_den: int = 32,
              support: Optional[Sequence[int]] = None, full: bool = False) -> Dist:
    n = len(space)
    if support is None:
        if full:
            support = range(n)
        else:
            support = [i for i in range(n) if rng.random() < 0.7] or [rng.randrange(n)]
    support = list(support)
    w = rand_weights(rng, len(support), max_den)
    mass = [ZERO] * n
    for i, v in zip(support, w):
        mass[i] = v
    return Dist(space, mass, check=False)


def rand_kernel(rng: random.Random, source: FinSpace, target: FinSpace, max_den: int = 32,
                density: Optional[float] = None) -> Kernel:
    if density is None:
        density = rng.choice([0.3, 0.6, 1.0])
    rows = []
    for _ in range(len(source)):
        w = rand_weights(rng, len(target), max_den, density)
        rows.append({j: v for j, v in enumerate(w) if v})
    return Kernel._raw(source, target, rows)


def rand_function(rng: random.Random, source: FinSpace, target: FinSpace) -> list:
    return [rng.randrange(len(target)) for _ in range(len(source))]


def dirac_from_indices(source: FinSpace, target: FinSpace, images: Sequence[int]) -> Kernel:
    return Kernel._raw(source, target, [{j: ONE} for j in images])


def rand_det_kernel(rng: random.Random, source: FinSpace, target: FinSpace) -> Kernel:
    return dirac_from_indices(source, target, rand_function(rng, source, target))


def with_null_noise(rng: random.Random, k: Kernel, p: Dist, max_den: int = 32) -> Kernel:
    """Replace the columns of ``k`` at ``p``-null states with random ones."""
    rows = list(k._rows)
    for i, v in enumerate(p.mass):
        if not v:
            w = rand_weights(rng, len(k.target), max_den, rng.choice([0.4, 1.0]))
            rows[i] = {j: x for j, x in enumerate(w) if x}
    return Kernel._raw(k.source, k.target, rows)


def rand_ps_morphism(rng: random.Random, gen: CaseGen, *, src: Optional[ProbSpace] = None,
                     kind: Optional[str] = None) -> PSMorphism:
    """A random measure-preserving kernel; ``kind`` is ``"random"``, ``"det"`` or ``"asdet"``."""
    if src is None:
        X = rand_space(rng, 1, gen.max_states, "x")
        src = ProbSpace(rand_dist(rng, X, gen.max_den))
    Y = rand_space(rng, 1, gen.max_states, "y")
    kind = kind or rng.choice(["random", "det", "asdet"])
    if kind == "random":
        k = rand_kernel(rng, src.space, Y, gen.max_den)
    else:
        k = rand_det_kernel(rng, src.space, Y)
        if kind == "asdet":
            k = with_null_noise(rng, k, src.p, gen.max_den)
    return PSMorphism(src, ProbSpace(push(k, src.p)), k, check=False)


def solve_stationary(k: Kernel, states: Sequence[int]) -> dict:
    """Stationary distribution of ``k`` restricted to a closed irreducible set.

    Exact Gaussian elimination on ``π (I - P) = 0``, ``Σ π = 1``.
    """
    states = list(states)
    pos = {s: i for i, s in enumerate(states)}
    n = len(states)
    # Equations: for each target j, Σ_i π_i (P(j|i) - δ_ij) = 0; replace the last by Σ π = 1.
    a = [[ZERO] * (n + 1) for _ in range(n)]
    for i, s in enumerate(states):
        for t, v in k._rows[s].items():
            if t not in pos:
                raise FinPSError("state set is not closed")
            a[pos[t]][i] += v
        a[i][i] -= 1
    a[n - 1] = [ONE] * n + [ONE]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return {s: a[pos[s]][n] for s in states}


def rand_irreducible_rows(rng: random.Random, states: Sequence[int], max_den: int) -> dict:
    """Rows of a random irreducible chain on ``states`` (a random cycle plus extra edges)."""
    states = list(states)
    order = states[:]
    rng.shuffle(order)
    nxt = {order[i]: order[(i + 1) % len(order)] for i in range(len(order))}
    rows = {}
    for s in states:
        raw = {t: Fraction(rng.randint(1, max_den), rng.randint(1, max_den))
               for t in states if t == nxt[s] or rng.random() < 0.35}
        total = sum(raw.values(), ZERO)
        rows[s] = {t: v / total for t, v in raw.items()}
    return rows


def rand_reversible(rng: random.Random, space: FinSpace, p: Dist, max_den: int) -> Kernel:
    """A kernel in detailed balance with ``p`` on random edges of its support."""
    n = len(space)
    supp = p.support()
    w = {}
    for a in supp:
        for b in supp:
            if a < b and rng.random() < 0.4:
                w[(a, b)] = w[(b, a)] = Fraction(rng.randint(1, max_den), rng.randint(1, max_den))
    out_w = {a: sum((v for (x, _), v in w.items() if x == a), ZERO) for a in supp}
    scale = min((p.mass[a] / out_w[a] for a in supp if out_w[a]), default=ONE)
    scale *= Fraction(rng.randint(1, 4), 4)
    rows = []
    for a in range(n):
        if p.mass[a]:
            row = {b: scale * v / p.mass[a] for (x, b), v in w.items() if x == a}
            stay = 1 - sum(row.values(), ZERO)
            if stay:
                row[a] = stay
            rows.append(row)
        else:
            wts = rand_weights(rng, n, max_den, 0.5)
            rows.append({j: v for j, v in enumerate(wts) if v})
    return Kernel._raw(space, space, rows)


def rand_system(rng: random.Random, max_states: int, max_den: int = 32, *,
                min_states: int = 1, max_generators: int = 3,
                ergodic_bias: float = 0.0) -> DynSystem:
    """A random measure-preserving system with transient and null structure.

    The first generator is a chain with random closed classes and transient
    states; its invariant measure is a random mixture of the class stationary
    distributions (possibly with zero weights). Further generators are either
    reversible with respect to that measure, the time reversal of the first,
    or a power of it.
    """
    n = rng.randint(min_states, max_states)
    X = FinSpace(f"s{i}" for i in range(n))
    states = list(range(n))
    rng.shuffle(states)
    n_transient = rng.randint(0, n - 1) if n > 1 and rng.random() < 0.6 else 0
    transient, recurrent = states[:n_transient], states[n_transient:]
    if rng.random() < ergodic_bias:
        n_classes = 1
    else:
        n_classes = rng.randint(1, len(recurrent))
    cuts = sorted(rng.sample(range(1, len(recurrent)), n_classes - 1)) if n_classes > 1 else []
    classes = [recurrent[a:b] for a, b in zip([0] + cuts, cuts + [len(recurrent)])]

    rows: list = [None] * n
    mass = [ZERO] * n
    class_w = rand_weights(rng, len(classes), max_den, 0.8 if not ergodic_bias else 1.0)
    for cls, cw in zip(classes, class_w):
        crows = rand_irreducible_rows(rng, cls, max_den)
        for s, r in crows.items():
            rows[s] = r
        if cw:
            k_tmp = Kernel._raw(X, X, [crows.get(i, {i: ONE}) for i in range(n)])
            pi = solve_stationary(k_tmp, cls)
            for s, v in pi.items():
                mass[s] = cw * v
    for s in transient:
        w = rand_weights(rng, n, max_den, 0.5)
        rows[s] = {j: v for j, v in enumerate(w) if v}
    m1 = Kernel._raw(X, X, rows)
    p = Dist(X, mass, check=False)
    base = ProbSpace(p)
    gens = [m1]
    for _ in range(rng.randint(0, max_generators - 1)):
        choice = rng.random()
        if choice < 0.5:
            gens.append(rand_reversible(rng, X, p, max_den))
        elif choice < 0.75:
            rev = bayesian_inverse(PSMorphism(base, base, m1, check=False)).kernel
            gens.append(with_null_noise(rng, rev, p, max_den))
        else:
            gens.append(compose(m1, m1))
    return DynSystem(base, gens)
