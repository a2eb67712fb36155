"""Almost-sure idempotents: absorbing sets, strictification and dagger splitting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import ONE, ZERO, Kernel, compose, identity
from .dynamics import DynSystem, invariant_object
from .errors import ConsistencyError, PreconditionError
from .ps import (ProbSpace, PSMorphism, as_equal, bayesian_inverse, find_ps_iso)


@dataclass(frozen=True)
class Splitting:
    mid: ProbSpace
    pi: PSMorphism
    iota: PSMorphism


def is_as_idempotent(e: PSMorphism) -> bool:
    return as_equal(compose(e.kernel, e.kernel), e.kernel, e.src.p)


def absorbing_subset(k: PSMorphism, start: Optional[Iterable] = None) -> frozenset:
    """A full-measure ``A ⊆ start`` with ``k(A|a) = 1`` for every ``a ∈ A``.

    Iterates ``A_{n+1} = {x ∈ A_n : k(A_n|x) = 1}`` until it stabilizes, which
    takes at most ``|X|`` rounds. ``start`` defaults to the support.
    """
    p = k.src.p
    space = k.src.space
    if start is None:
        current = frozenset(k.src.support)
    else:
        current = frozenset(space.index(s) for s in start)
    if p.measure(current) != 1:
        raise PreconditionError("starting set does not have full measure")
    rows = k.kernel._rows
    while True:
        nxt = frozenset(x for x in current
                        if sum((v for y, v in rows[x].items() if y in current), ZERO) == 1)
        if nxt == current:
            return current
        current = nxt


def strictify_idempotent(e: PSMorphism) -> Kernel:
    """An exactly idempotent kernel a.s.-equal to the a.s.-idempotent ``e``.

    Keeps ``e`` on an absorbing full-measure set inside the set where
    ``e∘e`` and ``e`` agree, and uses the identity everywhere else.
    """
    if not is_as_idempotent(e):
        raise PreconditionError("morphism is not almost surely idempotent")
    ee = compose(e.kernel, e.kernel)
    agree = [x for x in range(len(e.src.space)) if ee._rows[x] == e.kernel._rows[x]]
    absorbing = absorbing_subset(e, [e.src.space.labels[x] for x in agree])
    rows = [dict(e.kernel._rows[x]) if x in absorbing else {x: ONE}
            for x in range(len(e.src.space))]
    out = Kernel._raw(e.src.space, e.src.space, rows)
    if compose(out, out) != out:  # pragma: no cover
        raise ConsistencyError("strictified kernel is not idempotent")
    return out


def split_idempotent(e: PSMorphism) -> Splitting:
    """Split ``e`` through the invariant object of the system it generates."""
    if not is_as_idempotent(e):
        raise PreconditionError("morphism is not almost surely idempotent")
    inv = invariant_object(DynSystem(e.src, [e.kernel], names=["e"]))
    split = Splitting(inv.space, inv.r, inv.r_dag)
    p, q = e.src.p, inv.p_inv
    if not as_equal(compose(split.iota.kernel, split.pi.kernel), e.kernel, p):
        raise ConsistencyError("iota∘pi is not a.s. equal to e")
    if not as_equal(compose(split.pi.kernel, split.iota.kernel), identity(inv.space.space), q):
        raise ConsistencyError("pi∘iota is not a.s. the identity")
    if not as_equal(bayesian_inverse(split.pi).kernel, split.iota.kernel, q):
        raise ConsistencyError("iota is not the dagger of pi")
    return split


@dataclass
class ProbeResult:
    side: str
    index: int
    applicable: bool
    factorization: Optional[PSMorphism]
    ok: bool


@dataclass
class EqualizerReport:
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)


def verify_equalizer_coequalizer(e: PSMorphism, split: Splitting, probes: Iterable[PSMorphism]) -> EqualizerReport:
    """Factor each probe through the splitting and check uniqueness.

    A probe into ``(X, p)`` with ``e∘f ≃ f`` factors as ``iota ∘ (pi∘f)``; a
    probe out of ``(X, p)`` with ``g∘e ≃ g`` factors as ``(g∘iota) ∘ pi``.
    Probes satisfying neither are reported as not applicable.
    """
    x = e.src
    report = EqualizerReport()
    mid_id = identity(split.mid.space)
    retraction_ok = as_equal(compose(split.pi.kernel, split.iota.kernel), mid_id, split.mid.p)
    for n, probe in enumerate(probes):
        if probe.dst == x and as_equal(compose(e.kernel, probe.kernel), probe.kernel, probe.src.p):
            fac = PSMorphism(probe.src, split.mid, compose(split.pi.kernel, probe.kernel), check=False)
            ok = as_equal(compose(split.iota.kernel, fac.kernel), probe.kernel, probe.src.p)
            # Any other h with iota∘h ≃ f satisfies h ≃ pi∘iota∘h ≃ pi∘f.
            ok = ok and retraction_ok
            report.results.append(ProbeResult("equalizer", n, True, fac, ok))
        elif probe.src == x and as_equal(compose(probe.kernel, e.kernel), probe.kernel, x.p):
            fac = PSMorphism(split.mid, probe.dst, compose(probe.kernel, split.iota.kernel), check=False)
            ok = as_equal(compose(fac.kernel, split.pi.kernel), probe.kernel, x.p) and retraction_ok
            report.results.append(ProbeResult("coequalizer", n, True, fac, ok))
        else:
            report.results.append(ProbeResult("none", n, False, None, True))
    return report


def splittings_isomorphic(a: Splitting, b: Splitting) -> bool:
    """Two splittings of the same idempotent agree up to a PS-isomorphism."""
    iso = find_ps_iso(a.mid, b.mid)
    if iso is None:
        return False
    # The comparison map pi_b∘iota_a is the canonical iso; check it commutes.
    comp = compose(b.pi.kernel, a.iota.kernel)
    return as_equal(compose(b.iota.kernel, comp), a.iota.kernel, a.mid.p)
