"""Chain-spec files: JSON with exact rational strings, one matrix row per source state.

A minimal spec::

    {
      "states": ["a", "b"],
      "dist": ["1/2", "1/2"],
      "generators": [{"name": "m", "matrix": [["0", "1"], ["1", "0"]]}]
    }

Rows may also be objects mapping target labels to rationals (missing
targets are zero). Optional sections: ``partition`` (list of label blocks),
``probes`` (extra morphisms used by ``split``), and ``"idempotent": true`` on
a generator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import ZERO, Dist, FinSpace, Kernel, fmt_rat, parse_rat, push
from .dynamics import DynSystem
from .errors import FinPSError, SpecError
from .ps import Partition, ProbSpace, PSMorphism


@dataclass(frozen=True)
class Probe:
    name: str
    direction: str  # "in": (A, q) -> (X, p); "out": (X, p) -> Y
    morphism: PSMorphism


@dataclass
class ChainSpec:
    space: FinSpace
    dist: Dist
    names: list
    generators: list
    idempotent: list = field(default_factory=list)
    partition: Optional[Partition] = None
    probes: list = field(default_factory=list)

    @property
    def base(self) -> ProbSpace:
        return ProbSpace(self.dist)

    def system(self) -> DynSystem:
        return DynSystem(self.base, self.generators, names=self.names)

    def generator(self, name: str) -> Kernel:
        return self.generators[self.names.index(name)]


def _rational(value, path: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise SpecError(f"expected a rational string like \"1/3\", got {json.dumps(value)}", path)
    try:
        q = parse_rat(value) if isinstance(value, str) else Fraction(value)
    except FinPSError as exc:
        raise SpecError(str(exc), path) from None
    if q < 0:
        raise SpecError(f"negative probability {fmt_rat(q)}", path)
    return q


def _labels(value, path: str) -> FinSpace:
    if not isinstance(value, list) or not value:
        raise SpecError("expected a non-empty list of state labels", path)
    for i, v in enumerate(value):
        if not isinstance(v, str):
            raise SpecError(f"state label must be a string, got {json.dumps(v)}", f"{path}[{i}]")
    if len(set(value)) != len(value):
        dup = next(v for v in value if value.count(v) > 1)
        raise SpecError(f"duplicate state label {dup!r}", path)
    return FinSpace(value)


def _label_index(space: FinSpace, label, path: str) -> int:
    if not isinstance(label, str) or label not in space:
        raise SpecError(f"unknown state {json.dumps(label)}", path)
    return space.index(label)


def _vector(value, space: FinSpace, path: str) -> list:
    """A probability vector over ``space`` given as a list or a label mapping."""
    if isinstance(value, dict):
        out = [ZERO] * len(space)
        for k, v in value.items():
            out[_label_index(space, k, f"{path}.{k}")] = _rational(v, f"{path}.{k}")
    elif isinstance(value, list):
        if len(value) != len(space):
            raise SpecError(f"expected {len(space)} entries, got {len(value)}", path)
        out = [_rational(v, f"{path}[{i}]") for i, v in enumerate(value)]
    else:
        raise SpecError("expected a list of rationals or a label -> rational object", path)
    total = sum(out, ZERO)
    if total != 1:
        raise SpecError(f"entries sum to {fmt_rat(total)}, not 1", path)
    return out


def parse_dist(value, space: FinSpace, path: str = "dist") -> Dist:
    return Dist(space, _vector(value, space, path), check=False)


def parse_rows(value, source: FinSpace, target: FinSpace, path: str) -> Kernel:
    """A kernel from one row per source state."""
    if not isinstance(value, list):
        raise SpecError("expected a list of rows, one per source state", path)
    if len(value) != len(source):
        raise SpecError(f"expected {len(source)} rows (one per source state), got {len(value)}", path)
    rows = []
    for i, row in enumerate(value):
        label = source.labels[i]
        rpath = f"{path}[{i}]"
        try:
            vec = _vector(row, target, rpath)
        except SpecError as exc:
            if exc.detail.startswith("entries sum to"):
                raise SpecError(f"row {label!r} {exc.detail[len('entries '):]}", rpath) from None
            raise
        rows.append({j: v for j, v in enumerate(vec) if v})
    return Kernel._raw(source, target, rows)


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise SpecError(f"missing required field {key!r}", path)
    return obj[key]


def _json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg} (column {exc.colno})", "", exc.lineno) from None


def parse_chain_spec(text: str) -> ChainSpec:
    data = _json(text)
    if not isinstance(data, dict):
        raise SpecError("top level must be an object")
    known = {"states", "dist", "generators", "partition", "probes", "description"}
    for key in data:
        if key not in known:
            raise SpecError(f"unknown field {key!r}", key)
    space = _labels(_require(data, "states", ""), "states")
    dist = parse_dist(_require(data, "dist", ""), space)

    gens = _require(data, "generators", "")
    if not isinstance(gens, list) or not gens:
        raise SpecError("expected a non-empty list of generators", "generators")
    names, kernels, idem = [], [], []
    for g, item in enumerate(gens):
        gpath = f"generators[{g}]"
        if not isinstance(item, dict):
            raise SpecError("expected an object with 'name' and 'matrix'", gpath)
        name = item.get("name", f"m{g}")
        if not isinstance(name, str):
            raise SpecError("generator name must be a string", f"{gpath}.name")
        if name in names:
            raise SpecError(f"duplicate generator name {name!r}", f"{gpath}.name")
        k = parse_rows(_require(item, "matrix", gpath), space, space, f"{gpath}.matrix")
        if push(k, dist) != dist:
            moved = push(k, dist)
            bad = next(i for i in range(len(space)) if moved.mass[i] != dist.mass[i])
            raise SpecError(f"generator {name!r} does not preserve dist: mass at "
                            f"{space.labels[bad]!r} becomes {fmt_rat(moved.mass[bad])}, "
                            f"expected {fmt_rat(dist.mass[bad])}", gpath)
        flag = item.get("idempotent", False)
        if not isinstance(flag, bool):
            raise SpecError("expected true or false", f"{gpath}.idempotent")
        if flag:
            idem.append(name)
        names.append(name)
        kernels.append(k)

    partition = None
    if "partition" in data:
        partition = _parse_partition(data["partition"], space)

    probes = []
    for i, item in enumerate(data.get("probes", [])):
        probes.append(_parse_probe(item, space, dist, f"probes[{i}]"))
    return ChainSpec(space, dist, names, kernels, idem, partition, probes)


def _parse_partition(value, space: FinSpace) -> Partition:
    if not isinstance(value, list):
        raise SpecError("expected a list of blocks", "partition")
    seen = {}
    blocks = []
    for b, block in enumerate(value):
        bpath = f"partition[{b}]"
        if not isinstance(block, list) or not block:
            raise SpecError("expected a non-empty list of labels", bpath)
        idx = []
        for j, label in enumerate(block):
            i = _label_index(space, label, f"{bpath}[{j}]")
            if i in seen:
                raise SpecError(f"state {label!r} already in partition[{seen[i]}]", f"{bpath}[{j}]")
            seen[i] = b
            idx.append(i)
        blocks.append(idx)
    missing = [space.labels[i] for i in range(len(space)) if i not in seen]
    if missing:
        raise SpecError(f"states not covered: {', '.join(missing)}", "partition")
    return Partition(space, tuple(tuple(b) for b in blocks))


def _parse_probe(item, space: FinSpace, dist: Dist, path: str) -> Probe:
    if not isinstance(item, dict):
        raise SpecError("expected an object", path)
    name = item.get("name", path)
    direction = _require(item, "direction", path)
    base = ProbSpace(dist)
    if direction == "out":
        target = _labels(_require(item, "target", path), f"{path}.target")
        k = parse_rows(_require(item, "matrix", path), space, target, f"{path}.matrix")
        mor = PSMorphism(base, ProbSpace(push(k, dist)), k, check=False)
    elif direction == "in":
        source = _labels(_require(item, "source", path), f"{path}.source")
        q = parse_dist(_require(item, "dist", path), source, f"{path}.dist")
        k = parse_rows(_require(item, "matrix", path), source, space, f"{path}.matrix")
        if push(k, q) != dist:
            raise SpecError("probe does not push its dist onto the spec dist", path)
        mor = PSMorphism(ProbSpace(q), base, k, check=False)
    else:
        raise SpecError("direction must be \"in\" or \"out\"", f"{path}.direction")
    return Probe(name, direction, mor)


def load_chain_spec(path) -> ChainSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_chain_spec(fh.read())


# -- emission ------------------------------------------------------------------

def kernel_rows(k: Kernel) -> list:
    return [[fmt_rat(v) for v in row] for row in k.rows()]


def kernel_json(k: Kernel) -> dict:
    return {"source": list(k.source.labels), "target": list(k.target.labels), "rows": kernel_rows(k)}


def kernel_from_json(obj: dict, path: str = "kernel") -> Kernel:
    source = _labels(_require(obj, "source", path), f"{path}.source")
    target = _labels(_require(obj, "target", path), f"{path}.target")
    return parse_rows(_require(obj, "rows", path), source, target, f"{path}.rows")


def spec_dict(space: FinSpace, dist: Dist, generators, names=None, *, idempotent=(),
              partition: Optional[Partition] = None) -> dict:
    names = names or [f"m{i}" for i in range(len(generators))]
    out = {
        "states": list(space.labels),
        "dist": [fmt_rat(v) for v in dist.mass],
        "generators": [],
    }
    for name, k in zip(names, generators):
        g = {"name": name, "matrix": kernel_rows(k)}
        if name in idempotent:
            g["idempotent"] = True
        out["generators"].append(g)
    if partition is not None:
        out["partition"] = partition.label_blocks()
    return out


def spec_from_system(sys: DynSystem, **kw) -> dict:
    return spec_dict(sys.space, sys.p, sys.generators, list(sys.names), **kw)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
