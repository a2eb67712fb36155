"""The Markov category of finite sets and stochastic matrices.

Everything is exact: probabilities are :class:`fractions.Fraction` values and
no operation ever rounds. Kernels are stored sparsely, one mapping per source
state, but behave as dense matrices with entries ``k(y|x)``.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from itertools import product as _cartesian
from typing import Callable, Union

from .errors import FinPSError, NotStochastic, SpaceMismatch

Rat = Fraction
RatLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(value: RatLike) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Strings are parsed as ``"a/b"`` or ``"a"`` (surrounding whitespace allowed).
    Floats are rejected: they would silently break exactness.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rat(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def parse_rat(text: str) -> Fraction:
    s = text.strip()
    if not s:
        raise FinPSError("empty rational")
    num, sep, den = s.partition("/")
    try:
        n = int(num.strip())
        d = int(den.strip()) if sep else 1
    except ValueError:
        raise FinPSError(f"malformed rational {text!r}") from None
    if d == 0:
        raise FinPSError(f"zero denominator in {text!r}")
    if d < 0:
        raise FinPSError(f"negative denominator in {text!r}")
    return Fraction(n, d)


def fmt_rat(q: Fraction) -> str:
    """Render ``q`` as ``"a/b"`` in lowest terms, or ``"a"`` for integers."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class FinSpace:
    """A finite set of labelled states; objects of FinStoch."""

    __slots__ = ("labels", "_index")

    def __init__(self, labels: Iterable[str]):
        labels = tuple(str(l) for l in labels)
        if not labels:
            raise FinPSError("a finite space needs at least one state")
        index = {l: i for i, l in enumerate(labels)}
        if len(index) != len(labels):
            dupes = sorted({l for l in labels if labels.count(l) > 1})
            raise FinPSError(f"duplicate state labels: {dupes}")
        self.labels = labels
        self._index = index

    @classmethod
    def range(cls, n: int) -> "FinSpace":
        return cls(str(i) for i in range(n))

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label):
        return label in self._index

    def index(self, label) -> int:
        if isinstance(label, int) and not isinstance(label, bool):
            if 0 <= label < len(self.labels):
                return label
            raise FinPSError(f"state index {label} out of range")
        try:
            return self._index[label]
        except KeyError:
            raise FinPSError(f"unknown state {label!r}") from None

    def __eq__(self, other):
        return isinstance(other, FinSpace) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"FinSpace({list(self.labels)!r})"

    def __matmul__(self, other: "FinSpace") -> "FinSpace":
        return product_space(self, other)


UNIT = FinSpace(["*"])


def product_space(left: FinSpace, right: FinSpace) -> FinSpace:
    """``left ⊗ right`` with labels ``"(x,z)"``, left factor major."""
    return FinSpace(f"({x},{z})" for x in left.labels for z in right.labels)


def _check_space(expected: FinSpace, got: FinSpace, what: str):
    if expected != got:
        raise SpaceMismatch(f"{what}: expected {expected!r}, got {got!r}")


class Dist:
    """A probability distribution on a finite space (a state ``I -> X``)."""

    __slots__ = ("space", "mass")

    def __init__(self, space: FinSpace, mass, *, check: bool = True):
        if isinstance(mass, Mapping):
            dense = [ZERO] * len(space)
            for key, v in mass.items():
                dense[space.index(key)] = rat(v)
        else:
            dense = [rat(v) for v in mass]
            if len(dense) != len(space):
                raise SpaceMismatch(
                    f"distribution has {len(dense)} entries for {len(space)} states")
        self.space = space
        self.mass = tuple(dense)
        if check:
            if any(v < 0 for v in self.mass):
                raise NotStochastic("negative probability in distribution")
            total = sum(self.mass, ZERO)
            if total != 1:
                raise NotStochastic(f"distribution sums to {fmt_rat(total)}, not 1")

    @classmethod
    def point(cls, space: FinSpace, label) -> "Dist":
        return cls(space, {space.index(label): ONE})

    @classmethod
    def uniform(cls, space: FinSpace, labels=None) -> "Dist":
        idx = range(len(space)) if labels is None else [space.index(l) for l in labels]
        idx = list(idx)
        w = Fraction(1, len(idx))
        return cls(space, {i: w for i in idx})

    def __getitem__(self, label) -> Fraction:
        return self.mass[self.space.index(label)]

    def __len__(self):
        return len(self.mass)

    def support(self) -> tuple:
        """Indices of states with positive mass."""
        return tuple(i for i, v in enumerate(self.mass) if v > 0)

    def measure(self, indices: Iterable[int]) -> Fraction:
        return sum((self.mass[i] for i in indices), ZERO)

    def is_point_mass(self) -> bool:
        return len(self.support()) == 1

    def as_kernel(self) -> "Kernel":
        """The state viewed as a morphism ``I -> X``."""
        return Kernel(UNIT, self.space, [dict(enumerate(self.mass))], check=False)

    def __eq__(self, other):
        return isinstance(other, Dist) and self.space == other.space and self.mass == other.mass

    def __hash__(self):
        return hash((self.space, self.mass))

    def __repr__(self):
        body = ", ".join(f"{l}: {fmt_rat(v)}" for l, v in zip(self.space.labels, self.mass))
        return f"Dist({{{body}}})"


class Kernel:
    """A stochastic matrix ``source -> target`` with entries ``k(y|x)``.

    ``rows`` has one entry per source state, each either a dense sequence over
    the target or a mapping from target labels/indices to probabilities.
    """

    __slots__ = ("source", "target", "_rows")

    def __init__(self, source: FinSpace, target: FinSpace, rows, *, check: bool = True):
        rows = list(rows)
        if len(rows) != len(source):
            raise SpaceMismatch(f"kernel has {len(rows)} rows for {len(source)} source states")
        stored = []
        for row in rows:
            if isinstance(row, Mapping):
                entry = {}
                for key, v in row.items():
                    q = rat(v)
                    if q:
                        j = target.index(key)
                        entry[j] = entry.get(j, ZERO) + q
            else:
                row = list(row)
                if len(row) != len(target):
                    raise SpaceMismatch(
                        f"kernel row has {len(row)} entries for {len(target)} target states")
                entry = {j: q for j, q in ((j, rat(v)) for j, v in enumerate(row)) if q}
            stored.append(entry)
        self.source = source
        self.target = target
        self._rows = tuple(stored)
        if check:
            self._validate()

    def _validate(self):
        for i, row in enumerate(self._rows):
            if any(v < 0 for v in row.values()):
                raise NotStochastic(f"negative entry in column of state {self.source.labels[i]!r}")
            total = sum(row.values(), ZERO)
            if total != 1:
                raise NotStochastic(
                    f"column of state {self.source.labels[i]!r} sums to {fmt_rat(total)}")

    @classmethod
    def _raw(cls, source, target, rows) -> "Kernel":
        k = object.__new__(cls)
        k.source = source
        k.target = target
        k._rows = tuple(rows)
        return k

    @classmethod
    def from_matrix(cls, source: FinSpace, target: FinSpace, columns: Sequence[Sequence]) -> "Kernel":
        """Build from a column-stochastic matrix (rows = targets, columns = sources)."""
        if len(columns) != len(target):
            raise SpaceMismatch("matrix row count must equal target size")
        rows = [[columns[j][i] for j in range(len(target))] for i in range(len(source))]
        return cls(source, target, rows)

    def __call__(self, y, x) -> Fraction:
        """The entry ``k(y|x)``."""
        return self._rows[self.source.index(x)].get(self.target.index(y), ZERO)

    def column(self, x) -> dict:
        """Nonzero part of the distribution ``k(.|x)`` as ``{target index: prob}``."""
        return dict(self._rows[self.source.index(x)])

    def dist_at(self, x) -> Dist:
        return Dist(self.target, self.column(x), check=False)

    def prob_of(self, subset: Iterable[int], x) -> Fraction:
        """``k(B|x)`` for a set ``B`` of target indices."""
        row = self._rows[self.source.index(x)]
        return sum((row.get(j, ZERO) for j in subset), ZERO)

    def rows(self) -> list:
        """Dense row-per-source matrix."""
        n = len(self.target)
        return [[r.get(j, ZERO) for j in range(n)] for r in self._rows]

    def matrix(self) -> list:
        """Dense column-stochastic matrix (rows = targets), as printed in the paper."""
        rows = self.rows()
        return [[rows[i][j] for i in range(len(self.source))] for j in range(len(self.target))]

    def edges(self):
        """Yield ``(x, y, k(y|x))`` for every positive entry, by index."""
        for i, row in enumerate(self._rows):
            for j in sorted(row):
                yield i, j, row[j]

    def __eq__(self, other):
        return (isinstance(other, Kernel) and self.source == other.source
                and self.target == other.target and self._rows == other._rows)

    def __hash__(self):
        return hash((self.source, self.target,
                     tuple(tuple(sorted(r.items())) for r in self._rows)))

    def __repr__(self):
        return f"Kernel({len(self.source)}->{len(self.target)}, {self.rows()!r})"

    def __matmul__(self, other: "Kernel") -> "Kernel":
        """``h @ k`` is ``compose(h, k)``: first ``k``, then ``h``."""
        return compose(self, other)


def identity(space: FinSpace) -> Kernel:
    return Kernel._raw(space, space, ({i: ONE} for i in range(len(space))))


def compose(h: Kernel, k: Kernel) -> Kernel:
    """``h ∘ k``: the Chapman-Kolmogorov sum ``Σ_y h(z|y) k(y|x)``."""
    if k.target != h.source:
        raise SpaceMismatch(f"cannot compose: {k.target!r} is not {h.source!r}")
    hrows = h._rows
    out = []
    for row in k._rows:
        acc: dict = {}
        for y, w in row.items():
            for z, v in hrows[y].items():
                acc[z] = acc.get(z, ZERO) + w * v
        out.append(acc)
    return Kernel._raw(k.source, h.target, out)


def compose_all(*kernels: Kernel) -> Kernel:
    """``compose_all(a, b, c) == a ∘ b ∘ c``."""
    result = kernels[-1]
    for k in reversed(kernels[:-1]):
        result = compose(k, result)
    return result


def tensor(k: Kernel, h: Kernel) -> Kernel:
    """Parallel product ``k ⊗ h`` with entries ``k(y|x) h(w|z)``."""
    nw = len(h.target)
    out = []
    for krow in k._rows:
        for hrow in h._rows:
            out.append({y * nw + w: a * b for y, a in krow.items() for w, b in hrow.items()})
    return Kernel._raw(product_space(k.source, h.source), product_space(k.target, h.target), out)


def copy(space: FinSpace) -> Kernel:
    n = len(space)
    return Kernel._raw(space, product_space(space, space), ({i * n + i: ONE} for i in range(n)))


def discard(space: FinSpace) -> Kernel:
    return Kernel._raw(space, UNIT, ({0: ONE} for _ in range(len(space))))


# ``del`` is a keyword; keep the categorical name reachable.
delete = discard


def swap(left: FinSpace, right: FinSpace) -> Kernel:
    """The braiding ``left ⊗ right -> right ⊗ left``."""
    nl, nr = len(left), len(right)
    return Kernel._raw(product_space(left, right), product_space(right, left),
                       ({z * nl + x: ONE} for x in range(nl) for z in range(nr)))


def left_unitor(space: FinSpace) -> Kernel:
    """``I ⊗ X -> X``."""
    return relabel(product_space(UNIT, space), space)


def right_unitor(space: FinSpace) -> Kernel:
    """``X ⊗ I -> X``."""
    return relabel(product_space(space, UNIT), space)


def associator(a: FinSpace, b: FinSpace, c: FinSpace) -> Kernel:
    """``(a ⊗ b) ⊗ c -> a ⊗ (b ⊗ c)``; the identity on flat indices."""
    return relabel(product_space(product_space(a, b), c), product_space(a, product_space(b, c)))


def relabel(source: FinSpace, target: FinSpace) -> Kernel:
    """The index-preserving bijection between two spaces of equal size."""
    if len(source) != len(target):
        raise SpaceMismatch("relabel needs spaces of equal size")
    return Kernel._raw(source, target, ({i: ONE} for i in range(len(source))))


def push(k: Kernel, p: Dist) -> Dist:
    """Pushforward ``k ∘ p``."""
    if p.space != k.source:
        raise SpaceMismatch(f"cannot push {p.space!r} through a kernel from {k.source!r}")
    acc = [ZERO] * len(k.target)
    for x, px in enumerate(p.mass):
        if px:
            for y, v in k._rows[x].items():
                acc[y] += px * v
    return Dist(k.target, acc, check=False)


def dirac(source: FinSpace, target: FinSpace, f: Union[Mapping, Callable]) -> Kernel:
    """The deterministic kernel of a total function on labels.

    ``f`` is either a mapping from source labels to target labels or a callable.
    """
    rows = []
    for label in source.labels:
        if isinstance(f, Mapping):
            if label not in f:
                raise FinPSError(f"function undefined at {label!r}")
            image = f[label]
        else:
            image = f(label)
        if image not in target:
            raise FinPSError(f"{label!r} maps to unknown state {image!r}")
        rows.append({target.index(image): ONE})
    return Kernel._raw(source, target, rows)


def is_deterministic(k: Kernel) -> bool:
    """True iff every column is a point mass (all entries are 0 or 1)."""
    return all(len(row) == 1 for row in k._rows)


def commutes_with_copy(k: Kernel) -> bool:
    """The diagrammatic determinism equation ``copy ∘ k == (k ⊗ k) ∘ copy``."""
    return compose(copy(k.target), k) == compose(tensor(k, k), copy(k.source))


def marginals(k: Kernel, left: FinSpace, right: FinSpace):
    """Split a kernel into a product target into its two marginal kernels."""
    _check_space(product_space(left, right), k.target, "marginal target")
    to_left = compose(right_unitor(left), tensor(identity(left), discard(right)))
    to_right = compose(left_unitor(right), tensor(discard(left), identity(right)))
    return compose(to_left, k), compose(to_right, k)


def constant(source: FinSpace, p: Dist) -> Kernel:
    """The kernel ignoring its input and returning ``p``: ``p ∘ del``."""
    row = {i: v for i, v in enumerate(p.mass) if v}
    return Kernel._raw(source, p.space, (dict(row) for _ in range(len(source))))


def tuples(base: FinSpace, n: int):
    """All ``n``-tuples of base indices in lexicographic order."""
    return _cartesian(range(len(base)), repeat=n)
