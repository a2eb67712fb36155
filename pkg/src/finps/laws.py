"""Executable laws of FinStoch and PS(FinStoch), checked on random instances.

Each law takes a seeded ``random.Random`` and the generation bounds, builds
one case, and returns ``(ok, data)``. ``data`` holds every matrix involved,
rendered as exact rational strings, so a failure can be rebuilt and rerun.
Hypothesis-constrained laws build instances that satisfy the hypothesis by
construction and also filter plain random instances through an exact
hypothesis check.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import generators as G
from .core import (ONE, ZERO, UNIT, Dist, FinSpace, Kernel, associator, commutes_with_copy,
                   compose, copy, discard, fmt_rat, identity, is_deterministic, left_unitor,
                   push, right_unitor, swap, tensor)
from .dynamics import (DynSystem, alt_erg_holds, det_invariance_witness, equilibrium_checks,
                       factor_left_invariant, factor_right_invariant, invariant_object,
                       invariant_partition, is_det_invariant,
                       is_left_invariant, is_right_invariant, mixture, ergodic_decomposition,
                       reduce_decomposition, reverse_system, strict_invariant_partition)
from .errors import FinPSError, PreconditionError
from .fixtures import seanexample, seanexample_measure
from .idempotents import is_as_idempotent, split_idempotent, strictify_idempotent
from .ps import (ProbSpace, PSMorphism, as_equal, bayesian_inverse, check_dag_id,
                 find_ps_iso, is_as_deterministic)

CaseGen = G.CaseGen


def dump(k) -> list:
    """Rows-per-source rational strings of a kernel or the masses of a distribution."""
    if isinstance(k, Dist):
        return [fmt_rat(v) for v in k.mass]
    if isinstance(k, PSMorphism):
        k = k.kernel
    return [[fmt_rat(v) for v in row] for row in k.rows()]


def dump_system(sys: DynSystem) -> dict:
    return {"states": list(sys.space.labels), "p": dump(sys.p),
            "generators": [dump(m) for m in sys.generators]}


@dataclass
class LawReport:
    law: str
    seed: int
    cases: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {"law": self.law, "seed": self.seed, "cases": self.cases,
                "failures": self.failures, "ok": self.ok, "seconds": round(self.seconds, 3)}


LAWS: dict = {}


def law(name: str, description: str, max_states=None):
    def register(fn: Callable):
        LAWS[name] = (description, fn, max_states)
        return fn
    return register


def run_law(name: str, gen: CaseGen = CaseGen(), cases: int = 1000) -> LawReport:
    if name not in LAWS:
        raise FinPSError(f"unknown law {name!r}; known: {', '.join(sorted(LAWS))}")
    _, fn, _ = LAWS[name]
    report = LawReport(name, gen.seed)
    start = time.perf_counter()
    for i in range(cases):
        ok, data = fn(gen.rng(i), gen)
        report.cases += 1
        if not ok:
            report.failures.append({"seed": gen.seed, "case": i, "max_states": gen.max_states,
                                    "max_den": gen.max_den, "data": data})
    report.seconds = time.perf_counter() - start
    return report


def replay(name: str, seed: int, case: int, max_states: int = 5, max_den: int = 32):
    """Rebuild and rerun one case; returns ``(ok, data)``."""
    gen = CaseGen(seed, max_states, max_den)
    return LAWS[name][1](gen.rng(case), gen)


def _bounded(gen: CaseGen, cap):
    return min(gen.max_states, cap) if cap else gen.max_states


# -- FinStoch structure --------------------------------------------------------

@law("comonoid", "copy/discard form a commutative comonoid; discard is natural")
def _comonoid(rng, gen):
    X = G.rand_space(rng, 1, gen.max_states)
    c, d, i = copy(X), discard(X), identity(X)
    left = compose(associator(X, X, X), compose(tensor(c, i), c))
    right = compose(tensor(i, c), c)
    counit_l = compose(left_unitor(X), compose(tensor(d, i), c))
    counit_r = compose(right_unitor(X), compose(tensor(i, d), c))
    cocomm = compose(swap(X, X), c)
    k = G.rand_kernel(rng, G.rand_space(rng, 1, gen.max_states, "w"), X, gen.max_den)
    natural = compose(d, k) == discard(k.source)
    ok = left == right and counit_l == i and counit_r == i and cocomm == c and natural
    return ok, {"X": list(X.labels), "k": dump(k)}


@law("category", "associativity, unit laws and tensor functoriality, exactly")
def _category(rng, gen):
    sizes = [G.rand_space(rng, 1, gen.max_states, p) for p in "abcd"]
    k1 = G.rand_kernel(rng, sizes[0], sizes[1], gen.max_den)
    k2 = G.rand_kernel(rng, sizes[1], sizes[2], gen.max_den)
    k3 = G.rand_kernel(rng, sizes[2], sizes[3], gen.max_den)
    assoc = compose(compose(k3, k2), k1) == compose(k3, compose(k2, k1))
    unit = compose(identity(sizes[1]), k1) == k1 == compose(k1, identity(sizes[0]))
    h1 = G.rand_kernel(rng, sizes[3], sizes[0], gen.max_den)
    h2 = G.rand_kernel(rng, sizes[0], sizes[2], gen.max_den)
    functor = tensor(compose(k2, k1), compose(h2, h1)) == compose(tensor(k2, h2), tensor(k1, h1))
    stoch = all(sum(r.values(), ZERO) == 1 for r in compose(k3, compose(k2, k1))._rows)
    d1, d2 = G.rand_det_kernel(rng, sizes[0], sizes[1]), G.rand_det_kernel(rng, sizes[1], sizes[2])
    closed = is_deterministic(compose(d2, d1)) and is_deterministic(tensor(d1, d2))
    ok = assoc and unit and functor and stoch and closed
    return ok, {"k1": dump(k1), "k2": dump(k2), "k3": dump(k3), "h1": dump(h1), "h2": dump(h2)}


@law("determinism", "0/1 kernels are exactly those commuting with copy")
def _determinism(rng, gen):
    X = G.rand_space(rng, 1, gen.max_states)
    Y = G.rand_space(rng, 1, gen.max_states, "y")
    k = G.rand_det_kernel(rng, X, Y) if rng.random() < 0.5 else G.rand_kernel(rng, X, Y, gen.max_den)
    return is_deterministic(k) == commutes_with_copy(k), {"k": dump(k)}


def _causal_side(f, g, h):
    X = g.target
    inner = compose(tensor(identity(X), h), copy(X))  # X -> X⊗Y
    hyp = compose(inner, compose(g, f))
    conc = compose(tensor(identity(f.target), compose(inner, g)), compose(copy(f.target), f))
    return hyp, conc


@law("causality", "equal joint with h1 vs h2 implies equal joint that keeps the middle wire")
def _causality(rng, gen):
    A = G.rand_space(rng, 1, gen.max_states, "a")
    W = G.rand_space(rng, 1, gen.max_states, "w")
    X = G.rand_space(rng, 1, gen.max_states, "x")
    Y = G.rand_space(rng, 1, gen.max_states, "y")
    f = G.rand_kernel(rng, A, W, gen.max_den, density=0.4)
    g = G.rand_kernel(rng, W, X, gen.max_den, density=0.4)
    h1 = G.rand_kernel(rng, X, Y, gen.max_den)
    mode = rng.choice(["constructed", "trivial", "rejection"])
    if mode == "trivial":
        h2 = h1
    elif mode == "constructed":
        reached = set()
        for row in compose(g, f)._rows:
            reached |= set(row)
        h2 = Kernel._raw(X, Y, [h1._rows[x] if x in reached else
                                G.rand_kernel(rng, UNIT, Y, gen.max_den)._rows[0]
                                for x in range(len(X))])
    else:
        h2 = G.rand_kernel(rng, X, Y, gen.max_den, density=0.5)
    hyp1, conc1 = _causal_side(f, g, h1)
    hyp2, conc2 = _causal_side(f, g, h2)
    ok = (hyp1 != hyp2) or (conc1 == conc2)
    return ok, {"mode": mode, "f": dump(f), "g": dump(g), "h1": dump(h1), "h2": dump(h2)}


def _positivity_sides(f, g):
    Y = f.target
    lhs = compose(tensor(identity(Y), g), compose(copy(Y), f))
    rhs = compose(tensor(f, compose(g, f)), copy(f.source))
    return lhs, rhs


def _det_on_supports(rng, f, Z, sources):
    """A ``g: Y -> Z`` with ``g∘f`` deterministic at every source in ``sources``."""
    Y = f.target
    parent = list(range(len(Y)))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i
    for x in sources:
        ys = list(f._rows[x])
        for y in ys[1:]:
            a, b = find(ys[0]), find(y)
            if a != b:
                parent[b] = a
    image = {}
    rows = []
    for y in range(len(Y)):
        root = find(y)
        if root not in image:
            image[root] = rng.randrange(len(Z))
        rows.append({image[root]: ONE})
    # Groups no source touches may be arbitrary.
    touched = {find(y) for x in sources for y in f._rows[x]}
    for y in range(len(Y)):
        if find(y) not in touched and rng.random() < 0.5:
            rows[y] = G.rand_kernel(rng, UNIT, Z)._rows[0]
    return Kernel._raw(Y, Z, rows)


@law("positivity", "g∘f deterministic implies the copy-splitting identity")
def _positivity(rng, gen):
    X = G.rand_space(rng, 1, gen.max_states, "x")
    Y = G.rand_space(rng, 1, gen.max_states, "y")
    Z = G.rand_space(rng, 1, gen.max_states, "z")
    mode = rng.choice(["constant", "dirac", "merged", "rejection"])
    if mode == "constant":
        f = G.rand_kernel(rng, X, Y, gen.max_den)
        z = rng.randrange(len(Z))
        g = Kernel._raw(Y, Z, [{z: ONE} for _ in range(len(Y))])
    elif mode == "dirac":
        f, g = G.rand_det_kernel(rng, X, Y), G.rand_det_kernel(rng, Y, Z)
    elif mode == "merged":
        f = G.rand_kernel(rng, X, Y, gen.max_den, density=0.4)
        g = _det_on_supports(rng, f, Z, range(len(X)))
    else:
        f = G.rand_kernel(rng, X, Y, gen.max_den, density=0.3)
        g = G.rand_kernel(rng, Y, Z, gen.max_den, density=0.3)
    lhs, rhs = _positivity_sides(f, g)
    ok = (not is_deterministic(compose(g, f))) or lhs == rhs
    return ok, {"mode": mode, "f": dump(f), "g": dump(g)}


@law("relative-positivity", "g∘f p-a.s. deterministic implies the identity p-a.s.")
def _relative_positivity(rng, gen):
    X = G.rand_space(rng, 1, gen.max_states, "x")
    Y = G.rand_space(rng, 1, gen.max_states, "y")
    Z = G.rand_space(rng, 1, gen.max_states, "z")
    p = G.rand_dist(rng, X, gen.max_den)
    f = G.rand_kernel(rng, X, Y, gen.max_den, density=0.4)
    if rng.random() < 0.75:
        g = _det_on_supports(rng, f, Z, p.support())
    else:
        g = G.rand_kernel(rng, Y, Z, gen.max_den, density=0.3)
    gf = PSMorphism(ProbSpace(p), ProbSpace(push(compose(g, f), p)), compose(g, f), check=False)
    lhs, rhs = _positivity_sides(f, g)
    ok = (not is_as_deterministic(gf)) or as_equal(lhs, rhs, p)
    return ok, {"p": dump(p), "f": dump(f), "g": dump(g)}


def _joint(p: Dist, f: Kernel, g: Kernel) -> Kernel:
    """``(f ⊗ g) ∘ copy ∘ p`` as a state on ``X ⊗ Y``."""
    return compose(compose(tensor(f, g), copy(p.space)), p.as_kernel())


@law("cauchy-schwarz", "equal second moments of f and g force f ≃_p g")
def _cauchy_schwarz(rng, gen):
    A = G.rand_space(rng, 1, gen.max_states, "a")
    X = G.rand_space(rng, 1, gen.max_states, "x")
    Y = G.rand_space(rng, 1, gen.max_states, "y")
    p = G.rand_dist(rng, A, gen.max_den)
    f = G.rand_kernel(rng, A, X, gen.max_den, density=0.5)
    mode = rng.choice(["perturbed", "rejection-det", "rejection"])
    if mode == "perturbed":
        g = G.with_null_noise(rng, f, p, gen.max_den)
    elif mode == "rejection-det":
        f = G.rand_det_kernel(rng, A, X)
        g = G.rand_det_kernel(rng, A, X)
    else:
        g = G.rand_kernel(rng, A, X, gen.max_den, density=0.3)
    h = G.rand_kernel(rng, A, Y, gen.max_den)
    ff, fg, gg = _joint(p, f, f), _joint(p, f, g), _joint(p, g, g)
    hypothesis = ff == fg == gg
    conclusion = _joint(p, h, f) == _joint(p, h, g)
    ok = (not hypothesis) or conclusion
    return ok, {"mode": mode, "p": dump(p), "f": dump(f), "g": dump(g), "h": dump(h)}


# -- PS(FinStoch) ---------------------------------------------------------------

@law("dag-id", "f is a.s. deterministic iff f ∘ f† ≃ id")
def _dag_id(rng, gen):
    f = G.rand_ps_morphism(rng, gen)
    return check_dag_id(f), {"p": dump(f.src.p), "f": dump(f)}


def _rand_iso_pair(rng, gen):
    X = G.rand_space(rng, 1, gen.max_states, "x")
    a = ProbSpace(G.rand_dist(rng, X, gen.max_den))
    supp = list(a.support)
    n_null = rng.randint(0, 2)
    Y = FinSpace(f"y{i}" for i in range(len(supp) + n_null))
    slots = list(range(len(Y)))
    rng.shuffle(slots)
    image = dict(zip(supp, slots))
    mass = [ZERO] * len(Y)
    for x, y in image.items():
        mass[y] = a.p.mass[x]
    b = ProbSpace(Dist(Y, mass, check=False))
    f = Kernel._raw(X, Y, [{image.get(x, slots[0]): ONE} for x in range(len(X))])
    back = {y: x for x, y in image.items()}
    g = Kernel._raw(Y, X, [{back.get(y, supp[0]): ONE} for y in range(len(Y))])
    return a, b, PSMorphism(a, b, f), PSMorphism(b, a, g)


@law("iso-bayesian", "PS-isomorphisms are a.s. deterministic and inverse to their daggers")
def _iso_bayesian(rng, gen):
    a, b, f, g = _rand_iso_pair(rng, gen)
    ok = ps_pair_ok(f, g)
    found = find_ps_iso(a, b)
    ok = ok and found is not None and ps_pair_ok(*found)
    return ok, {"p": dump(a.p), "q": dump(b.p), "f": dump(f), "g": dump(g)}


def ps_pair_ok(f: PSMorphism, g: PSMorphism) -> bool:
    a, b = f.src, f.dst
    return (as_equal(compose(g.kernel, f.kernel), identity(a.space), a.p)
            and as_equal(compose(f.kernel, g.kernel), identity(b.space), b.p)
            and as_equal(bayesian_inverse(f).kernel, g.kernel, b.p)
            and as_equal(bayesian_inverse(g).kernel, f.kernel, a.p)
            and is_as_deterministic(f) and is_as_deterministic(g))


@law("as-det-compose", "composites of a.s. deterministic morphisms are a.s. deterministic")
def _as_det_compose(rng, gen):
    f = G.rand_ps_morphism(rng, gen, kind=rng.choice(["det", "asdet", "random"]))
    g = G.rand_ps_morphism(rng, gen, src=f.dst, kind=rng.choice(["det", "asdet", "random"]))
    gf = PSMorphism(f.src, g.dst, compose(g.kernel, f.kernel), check=False)
    hyp = is_as_deterministic(f) and is_as_deterministic(g)
    ok = (not hyp) or is_as_deterministic(gf)
    return ok, {"p": dump(f.src.p), "f": dump(f), "g": dump(g)}


@law("dagger-involution", "f†† ≃ f")
def _dagger_involution(rng, gen):
    f = G.rand_ps_morphism(rng, gen)
    ff = bayesian_inverse(bayesian_inverse(f))
    return ff == f and as_equal(ff.kernel, f.kernel, f.src.p), {"p": dump(f.src.p), "f": dump(f)}


@law("dagger-contravariance", "(g∘f)† ≃ f†∘g†")
def _dagger_contravariance(rng, gen):
    f = G.rand_ps_morphism(rng, gen)
    g = G.rand_ps_morphism(rng, gen, src=f.dst)
    gf = PSMorphism(f.src, g.dst, compose(g.kernel, f.kernel), check=False)
    lhs = bayesian_inverse(gf).kernel
    rhs = compose(bayesian_inverse(f).kernel, bayesian_inverse(g).kernel)
    return as_equal(lhs, rhs, g.dst.p), {"p": dump(f.src.p), "f": dump(f), "g": dump(g)}


@law("congruence", "a.s. equality is preserved by post- and measure-preserving precomposition")
def _congruence(rng, gen):
    f = G.rand_ps_morphism(rng, gen)
    g_kernel = G.with_null_noise(rng, f.kernel, f.src.p, gen.max_den)
    W = G.rand_space(rng, 1, gen.max_states, "w")
    h = G.rand_kernel(rng, f.dst.space, W, gen.max_den)
    post = as_equal(compose(h, f.kernel), compose(h, g_kernel), f.src.p)
    m = bayesian_inverse(G.rand_ps_morphism(rng, gen, src=f.src))  # some (V, s) -> (X, p)
    pre = as_equal(compose(f.kernel, m.kernel), compose(g_kernel, m.kernel), m.src.p)
    return post and pre, {"p": dump(f.src.p), "f": dump(f), "g": dump(g_kernel)}


# -- dynamics ------------------------------------------------------------------

def _system(rng, gen, cap=None, **kw):
    return G.rand_system(rng, _bounded(gen, cap), gen.max_den, **kw)


def _invariant_probes(rng, gen, sys, inv):
    """Random morphisms out of the base: invariant ones (h∘r, k∘e) and arbitrary ones."""
    Y = G.rand_space(rng, 1, 4, "y")
    h = G.rand_kernel(rng, inv.space.space, Y, gen.max_den)
    if rng.random() < 0.3:
        h = G.rand_det_kernel(rng, inv.space.space, Y)
    k = G.rand_kernel(rng, sys.space, Y, gen.max_den)
    kernels = [
        G.with_null_noise(rng, compose(h, inv.r.kernel), sys.p, gen.max_den),
        compose(k, inv.e_D.kernel),
        k,
        G.rand_det_kernel(rng, sys.space, Y),
    ]
    return [PSMorphism(sys.base, ProbSpace(push(q, sys.p)), q, check=False) for q in kernels]


@law("harmonic-invariant", "right-invariant morphisms are deterministically invariant")
def _harmonic_invariant(rng, gen):
    sys = _system(rng, gen)
    inv = invariant_object(sys)
    ok = True
    for f in _invariant_probes(rng, gen, sys, inv):
        if is_right_invariant(f, sys) and not is_det_invariant(f, sys):
            ok = False
    return ok, dump_system(sys)


@law("det-invariant-measurable", "deterministic invariance iff constant on positive invariant blocks")
def _det_invariant_measurable(rng, gen):
    sys = _system(rng, gen)
    inv = invariant_object(sys)
    ok = True
    for f in _invariant_probes(rng, gen, sys, inv):
        rows = f.kernel._rows
        measurable = all(len({tuple(sorted(rows[i].items())) for i in b if sys.p.mass[i]}) <= 1
                         for b in inv.positive_blocks)
        if is_det_invariant(f, sys) != measurable:
            ok = False
    return ok, dump_system(sys)


@law("rdaginv", "m ∘ r† ≃ r† for every generator")
def _rdaginv(rng, gen):
    sys = _system(rng, gen)
    inv = invariant_object(sys)
    q = inv.p_inv
    ok = all(as_equal(compose(m, inv.r_dag.kernel), inv.r_dag.kernel, q) for m in sys.generators)
    ok = ok and is_left_invariant(inv.r_dag, sys) and is_right_invariant(inv.r, sys)
    return ok, dump_system(sys)


@law("colimit-uniqueness", "right-invariant morphisms factor uniquely through r")
def _colimit(rng, gen):
    sys = _system(rng, gen)
    inv = invariant_object(sys)
    Y = G.rand_space(rng, 1, 4, "y")
    det = rng.random() < 0.4
    h = (G.rand_det_kernel(rng, inv.space.space, Y) if det
         else G.rand_kernel(rng, inv.space.space, Y, gen.max_den))
    f_kernel = G.with_null_noise(rng, compose(h, inv.r.kernel), sys.p, gen.max_den)
    q = ProbSpace(push(f_kernel, sys.p))
    f = PSMorphism(sys.base, q, f_kernel, check=False)
    ft = factor_right_invariant(f, sys, inv)
    ok = (as_equal(ft.kernel, h, inv.p_inv)
          and as_equal(compose(ft.kernel, inv.r.kernel), f.kernel, sys.p)
          and is_as_deterministic(ft) == is_as_deterministic(f))
    # A non-invariant morphism must be refused.
    k = G.rand_kernel(rng, sys.space, Y, gen.max_den)
    other = PSMorphism(sys.base, ProbSpace(push(k, sys.p)), k, check=False)
    try:
        factor_right_invariant(other, sys, inv)
        refused = False
    except PreconditionError:
        refused = True
    ok = ok and refused == (not is_right_invariant(other, sys))
    return ok, {**dump_system(sys), "h": dump(h)}


@law("limit-uniqueness", "left-invariant morphisms factor uniquely through r†")
def _limit(rng, gen):
    sys = _system(rng, gen)
    inv = invariant_object(sys)
    A = G.rand_space(rng, 1, 4, "a")
    k = G.rand_kernel(rng, inv.space.space, A, gen.max_den)
    kk = PSMorphism(inv.space, ProbSpace(push(k, inv.p_inv)), k, check=False)
    h = bayesian_inverse(kk)  # (A, b) -> (X_inv, p_inv)
    g = PSMorphism(h.src, sys.base, compose(inv.r_dag.kernel, h.kernel), check=False)
    gt = factor_left_invariant(g, sys, inv)
    b = h.src.p
    ok = (as_equal(gt.kernel, h.kernel, b)
          and as_equal(compose(inv.r_dag.kernel, gt.kernel), g.kernel, b)
          and is_left_invariant(g, sys))
    return ok, {**dump_system(sys), "k": dump(k)}


@law("time-reversal", "D and its reversal share invariant blocks and right-invariant morphisms")
def _time_reversal(rng, gen):
    sys = _system(rng, gen)
    rev = reverse_system(sys)
    inv = invariant_object(sys)
    pos = inv.positive_blocks
    ok = invariant_object(rev).positive_blocks == pos
    for f in _invariant_probes(rng, gen, sys, inv):
        if is_right_invariant(f, sys) != is_right_invariant(f, rev):
            ok = False
    return ok, dump_system(sys)


@law("edinv", "e_D ∘ m ≃ m ∘ e_D ≃ e_D")
def _edinv(rng, gen):
    sys = _system(rng, gen)
    e = invariant_object(sys).e_D.kernel
    p = sys.p
    ok = all(as_equal(compose(e, m), e, p) and as_equal(compose(m, e), e, p)
             for m in sys.generators)
    return ok, dump_system(sys)


@law("invfrome", "invariance for all generators iff invariance for e_D")
def _invfrome(rng, gen):
    sys = _system(rng, gen)
    rep = equilibrium_checks(sys, samples=2, seed=rng.randrange(1 << 30))
    return rep.right_invariance_criterion and rep.left_invariance_criterion, dump_system(sys)


@law("alt-erg", "ergodic iff Σ_{x∈A} e_D(B|x) p(x) = p(A) p(B) for all A, B", max_states=12)
def _alt_erg(rng, gen):
    sys = G.rand_system(rng, 12, gen.max_den, ergodic_bias=0.5)
    inv = invariant_object(sys)
    ergodic = inv.p_inv.is_point_mass()
    return alt_erg_holds(inv.e_D.kernel, sys.p) == ergodic, dump_system(sys)


@law("detailed-balance", "e_D† ≃ e_D and p(x) e(y|x) = p(y) e(x|y)")
def _detailed_balance(rng, gen):
    sys = _system(rng, gen)
    inv = invariant_object(sys)
    e, p = inv.e_D.kernel, sys.p
    n = len(p.space)
    balance = all(p.mass[x] * e._rows[x].get(y, ZERO) == p.mass[y] * e._rows[y].get(x, ZERO)
                  for x in range(n) for y in range(n))
    return balance and as_equal(bayesian_inverse(inv.e_D).kernel, e, p), dump_system(sys)


@law("seanexample", "h is p-a.s. invariant for every invariant p yet fails strict invariance at b")
def _seanexample(rng, gen):
    fx = seanexample()
    m, h = fx.data["m"], fx.data["h"]
    t = Fraction(rng.randint(0, gen.max_den), gen.max_den)
    p = seanexample_measure(t)
    sys = DynSystem(ProbSpace(p), [m])
    f = PSMorphism(sys.base, ProbSpace(push(h, p)), h)
    witness = det_invariance_witness(h, sys, strict=True)
    harmonic = compose(h, m) == h  # harmonic at every state, not only a.s.
    ok = (is_right_invariant(f, sys) and is_det_invariant(f, sys) and harmonic
          and witness is not None and sys.space.labels[witness[1]] == "b")
    return ok, {"t": fmt_rat(t)}


@law("invariant-oracle", "graph blocks match exhaustive enumeration of invariant subsets", max_states=10)
def _invariant_oracle(rng, gen):
    sys = G.rand_system(rng, 10, gen.max_den)
    return invariant_sets_match(sys), dump_system(sys)


def oracle_invariant_sets(sys: DynSystem, *, strict: bool = False) -> set:
    """All subsets ``A`` with ``m(A|x) = 1_A(x)`` on the support (or everywhere).

    Because each column is a probability vector with positive listed entries,
    ``m(A|x) = 1`` iff its support lies in ``A`` and ``m(A|x) = 0`` iff the
    support misses ``A``; the check runs on bitmasks.
    """
    n = len(sys.space)
    states = range(n) if strict else sys.base.support
    supports = []
    for m in sys.generators:
        for x in states:
            mask = 0
            for y in m._rows[x]:
                mask |= 1 << y
            supports.append((x, mask))
    out = set()
    for a in range(1 << n):
        good = True
        for x, mask in supports:
            if a >> x & 1:
                if mask & ~a:
                    good = False
                    break
            elif mask & a:
                good = False
                break
        if good:
            out.add(frozenset(i for i in range(n) if a >> i & 1))
    return out


def invariant_sets_match(sys: DynSystem) -> bool:
    """Both partitions generate exactly the set families found by enumeration."""
    if strict_invariant_partition(sys).generated_sets() != oracle_invariant_sets(sys, strict=True):
        return False
    return invariant_partition(sys).generated_sets() == oracle_invariant_sets(sys)


@law("idempotent-pipeline", "noisy r†r idempotents strictify exactly and dagger-split")
def _idempotent_pipeline(rng, gen):
    sys = _system(rng, gen)
    inv = invariant_object(sys)
    noisy = G.with_null_noise(rng, inv.e_D.kernel, sys.p, gen.max_den)
    e = PSMorphism(sys.base, sys.base, noisy, check=False)
    if not is_as_idempotent(e):
        return False, dump_system(sys)
    strict = strictify_idempotent(e)
    split = split_idempotent(e)
    p, q = sys.p, split.mid.p
    ok = (compose(strict, strict) == strict and as_equal(strict, noisy, p)
          and as_equal(compose(split.iota.kernel, split.pi.kernel), noisy, p)
          and as_equal(compose(split.pi.kernel, split.iota.kernel), identity(split.mid.space), q)
          and as_equal(bayesian_inverse(split.pi).kernel, split.iota.kernel, q)
          and find_ps_iso(split.mid, inv.space) is not None)
    return ok, {**dump_system(sys), "e": dump(noisy)}


@law("ergodic-decomposition", "mixture identity, ergodic components, and reduction of planted decompositions")
def _ergodic_decomposition(rng, gen):
    sys = _system(rng, gen)
    ok, _ = check_ergodic_decomposition(rng, sys)
    return ok, dump_system(sys)


def check_ergodic_decomposition(rng: random.Random, sys: DynSystem):
    inv = invariant_object(sys)
    dec = ergodic_decomposition(sys)
    p = sys.p
    ok = mixture(dec) == p and sum((w for w, _ in dec), ZERO) == 1
    for _, comp in dec:
        ok = ok and all(push(m, comp) == comp for m in sys.generators)
        ok = ok and all(comp.measure(b) in (ZERO, ONE) for b in inv.blocks.blocks)
    # Plant another decomposition: duplicate and permute the components.
    labels = list(range(len(dec)))
    copies = labels + [rng.choice(labels) for _ in range(rng.randint(0, 3))]
    rng.shuffle(copies)
    weights = [ZERO] * len(copies)
    for c in labels:
        slots = [i for i, v in enumerate(copies) if v == c]
        split = G.rand_weights(rng, len(slots), 8, 0.8)
        for s, w in zip(slots, split):
            weights[s] = dec[c][0] * w
    A = FinSpace(f"a{i}" for i in range(len(copies)))
    b = Dist(A, weights, check=False)
    k_rows = []
    for i, c in enumerate(copies):
        if weights[i]:
            k_rows.append({j: v for j, v in enumerate(dec[c][1].mass) if v})
        else:
            k_rows.append(G.rand_kernel(rng, UNIT, sys.space)._rows[0])
    k = PSMorphism(ProbSpace(b), sys.base, Kernel._raw(A, sys.space, k_rows))
    unit = ProbSpace(Dist.point(UNIT, "*"))
    h = PSMorphism(unit, ProbSpace(b), b.as_kernel(), check=False)
    d = reduce_decomposition(sys, h, k, inv)
    pos_blocks = [i for i, w in enumerate(inv.p_inv.mass) if w]
    expected = {i: pos_blocks[c] for i, c in enumerate(copies) if weights[i]}
    ok = ok and is_as_deterministic(d) and all(
        d.kernel._rows[i] == {blk: ONE} for i, blk in expected.items())
    ok = ok and as_equal(compose(inv.r_dag.kernel, d.kernel), k.kernel, b)
    return ok, d


def law_names() -> list:
    return sorted(LAWS)


def describe(name: str) -> str:
    return LAWS[name][0]
