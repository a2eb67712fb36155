"""Analysis reports: a machine form (JSON, rationals as strings) and a human form."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .chainspec import ChainSpec, kernel_from_json, kernel_json
from .core import Dist, Kernel, fmt_rat, push
from .dynamics import (DynSystem, InvariantObject, equilibrium_checks, ergodic_decomposition,
                       invariant_object, is_as_invariant_set, mixture,
                       strict_invariant_partition)
from .ps import (Partition, ProbSpace, as_equal, partitions_as_isomorphic,
                 quotient_by_partition)


@dataclass
class AnalysisReport:
    states: list
    p: list
    generators: list
    blocks: list
    p_inv: list
    r: dict
    r_dag: dict
    e_D: dict
    ergodic: bool
    decomposition: list
    equilibrium: dict
    checks: dict
    strict: Optional[dict] = None
    partition: Optional[dict] = None
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        out = {
            "states": self.states, "p": self.p, "generators": self.generators,
            "blocks": self.blocks, "p_inv": self.p_inv,
            "r": self.r, "r_dag": self.r_dag, "e_D": self.e_D,
            "ergodic": self.ergodic, "decomposition": self.decomposition,
            "equilibrium": self.equilibrium, "checks": self.checks, "ok": self.ok,
        }
        if self.strict is not None:
            out["strict"] = self.strict
        if self.partition is not None:
            out["partition"] = self.partition
        if self.notes:
            out["notes"] = self.notes
        return out


def _masses(d: Dist) -> list:
    return [fmt_rat(v) for v in d.mass]


def _block_entries(part: Partition, masses) -> list:
    return [{"name": name, "states": labels, "mass": fmt_rat(w), "positive": w > 0}
            for name, labels, w in zip(part.block_names(), part.label_blocks(), masses)]


def analyze(spec: ChainSpec, *, strict: bool = False, seed: int = 0,
            samples: int = 8) -> tuple:
    """Run the full analysis; returns ``(report, system, invariant object)``."""
    sys = spec.system()
    inv = invariant_object(sys)
    p = sys.p
    eq = equilibrium_checks(sys, samples=samples, seed=seed, inv=inv)
    dec = ergodic_decomposition(sys)

    checks = {"equilibrium": eq.ok}
    checks["mixture_identity"] = mixture(dec) == p
    checks["components_invariant"] = all(push(m, comp) == comp
                                         for _, comp in dec for m in sys.generators)
    again = invariant_object(DynSystem(sys.base, [inv.e_D.kernel], names=["e_D"]))
    checks["e_D_fixed_point"] = (again.positive_blocks == inv.positive_blocks
                                 and as_equal(again.e_D.kernel, inv.e_D.kernel, p))

    report = AnalysisReport(
        states=list(sys.space.labels),
        p=_masses(p),
        generators=list(sys.names),
        blocks=_block_entries(inv.blocks, inv.p_inv.mass),
        p_inv=_masses(inv.p_inv),
        r=kernel_json(inv.r.kernel),
        r_dag=kernel_json(inv.r_dag.kernel),
        e_D=kernel_json(inv.e_D.kernel),
        ergodic=eq.ergodic,
        decomposition=[{"weight": fmt_rat(w), "component": _masses(c)} for w, c in dec],
        equilibrium=eq.as_dict(),
        checks=checks,
    )
    if strict:
        report.strict = _strict_section(sys, inv, checks)
    if spec.partition is not None:
        report.partition = _partition_section(sys, inv, spec.partition)
    return report, sys, inv


def _strict_section(sys: DynSystem, inv: InvariantObject, checks: dict) -> dict:
    sp = strict_invariant_partition(sys)
    masses = [sys.p.measure(b) for b in sp.blocks]
    same = sp.blocks == inv.blocks.blocks
    iso = same_sigma_algebra(sys.base, inv.blocks, sp)
    # Strictly invariant sets are a.s. invariant, so the strict partition is coarser.
    checks["strict_coarser"] = inv.blocks.is_finer_than(sp)
    return {"blocks": _block_entries(sp, masses), "same_as_almost_sure": same,
            "quotients_isomorphic": iso}


def common_refinement(a: Partition, b: Partition) -> Partition:
    groups: dict = {}
    for i in range(len(a.space)):
        groups.setdefault((a.block_of[i], b.block_of[i]), []).append(i)
    return Partition(a.space, tuple(tuple(g) for g in groups.values()))


def same_sigma_algebra(x: ProbSpace, a: Partition, b: Partition) -> bool:
    """Whether two partitions generate the same σ-algebra up to null sets."""
    meet = common_refinement(a, b)
    return partitions_as_isomorphic(x, meet, a) and partitions_as_isomorphic(x, meet, b)


def _partition_section(sys: DynSystem, inv: InvariantObject, part: Partition) -> dict:
    q, _ = quotient_by_partition(sys.base, part)
    invariant = [is_as_invariant_set(sys, b) for b in part.blocks]
    return {"blocks": _block_entries(part, q.p.mass), "blocks_invariant": invariant,
            "isomorphic_to_invariant": same_sigma_algebra(sys.base, inv.blocks, part)}


def kernels_from_report(obj: dict) -> dict:
    """Re-parse the matrices of a machine report."""
    return {k: kernel_from_json(obj[k], k) for k in ("r", "r_dag", "e_D")}


# -- human form ----------------------------------------------------------------

def column_matrix(k: Kernel) -> str:
    """The kernel as a column-stochastic table: columns are sources, rows targets."""
    cols = list(k.source.labels)
    rows = list(k.target.labels)
    cells = [[fmt_rat(v) for v in row] for row in k.matrix()]
    w_row = max(len(r) for r in rows)
    widths = [max(len(c), *(len(cells[i][j]) for i in range(len(rows)))) for j, c in enumerate(cols)]
    lines = [" " * w_row + " | " + "  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines.append("-" * len(lines[0]))
    for label, row in zip(rows, cells):
        lines.append(label.rjust(w_row) + " | " + "  ".join(v.rjust(w) for v, w in zip(row, widths)))
    return "\n".join(lines)


def render_text(report: AnalysisReport, inv: InvariantObject) -> str:
    out = []
    out.append(f"states: {', '.join(report.states)}")
    out.append(f"p: ({', '.join(report.p)})")
    out.append(f"generators: {', '.join(report.generators)}")
    out.append("")
    out.append("invariant blocks:")
    for b in report.blocks:
        tag = "" if b["positive"] else "  (null)"
        out.append(f"  {b['name']}  mass {b['mass']}{tag}")
    out.append(f"p_inv: ({', '.join(report.p_inv)})")
    out.append(f"ergodic: {'yes' if report.ergodic else 'no'}")
    out.append("")
    for title, mor in (("r", inv.r), ("r_dag", inv.r_dag), ("e_D", inv.e_D)):
        out.append(f"{title} (column = source):")
        out.append(column_matrix(mor.kernel))
        out.append("")
    out.append("ergodic decomposition:")
    for item in report.decomposition:
        out.append(f"  {item['weight']} x ({', '.join(item['component'])})")
    if report.strict is not None:
        out.append("")
        out.append("strict invariant partition: "
                   + " ".join(b["name"] for b in report.strict["blocks"]))
        out.append(f"  same as almost-sure: {report.strict['same_as_almost_sure']}")
        out.append(f"  quotients isomorphic: {report.strict['quotients_isomorphic']}")
    if report.partition is not None:
        out.append("")
        out.append("given partition: " + " ".join(
            f"{b['name']}={b['mass']}" for b in report.partition["blocks"]))
        out.append(f"  blocks invariant: {report.partition['blocks_invariant']}")
        out.append(f"  isomorphic to invariant quotient: {report.partition['isomorphic_to_invariant']}")
    out.append("")
    out.append("checks:")
    for name, ok in report.checks.items():
        out.append(f"  {name}: {'pass' if ok else 'FAIL'}")
    for line in report.equilibrium.get("details", []):
        out.append(f"  - {line}")
    return "\n".join(out) + "\n"
