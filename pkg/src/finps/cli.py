"""Command-line entry point: ``finps <subcommand> ...``.

Exit status is 0 when every embedded check passes, 1 on validation errors and
2 when a theorem check fails. Errors are written to stderr as a JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import laws
from .chainspec import ChainSpec, dumps, kernel_json, load_chain_spec, parse_chain_spec, spec_dict
from .core import Dist, FinSpace, fmt_rat, identity, parse_rat
from .dynamics import invariant_object
from .errors import ConsistencyError, FinPSError, PreconditionError, SpecError
from .exchangeability import (finite_definetti, hewitt_savage_finite, iid, orbit_count,
                              orbit_structure, permutation_system)
from .fixtures import discchain, partition_sketch, seanexample, seanexample_measure
from .idempotents import (is_as_idempotent, split_idempotent, strictify_idempotent,
                          verify_equalizer_coequalizer)
from .ps import PSMorphism, as_equal, find_ps_iso
from .report import analyze, render_text

EXIT_OK, EXIT_INVALID, EXIT_THEOREM = 0, 1, 2


class TheoremFailure(Exception):
    def __init__(self, payload):
        super().__init__("theorem check failed")
        self.payload = payload


def fixture_spec(name: str) -> dict:
    if name == "discchain":
        fx = discchain()
        return spec_dict(fx.data["space"], fx.data["p"], [fx.data["m"]], ["m"])
    if name == "seanexample":
        fx = seanexample()
        return spec_dict(fx.data["space"], seanexample_measure(Fraction(1, 2)), [fx.data["m"]], ["m"])
    if name == "partition-sketch":
        fx = partition_sketch()
        X = fx.data["space"]
        return spec_dict(X, fx.data["p"], [identity(X)], ["id"], partition=fx.data["partition"])
    raise SpecError(f"unknown fixture {name!r}; known: discchain, seanexample, partition-sketch")


def read_spec(arg: str) -> ChainSpec:
    """A spec file path, ``-`` for stdin, or ``fixture:<name>``."""
    if arg.startswith("fixture:"):
        return parse_chain_spec(json.dumps(fixture_spec(arg.split(":", 1)[1])))
    if arg == "-":
        return parse_chain_spec(sys.stdin.read())
    try:
        return load_chain_spec(arg)
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc.strerror}", arg) from None


def emit(args, payload: dict, text: str | None = None):
    if args.format == "machine" or text is None:
        sys.stdout.write(dumps(payload))
    else:
        sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------------

def cmd_analyze(args) -> int:
    spec = read_spec(args.spec)
    report, system, inv = analyze(spec, strict=args.strict, seed=args.seed)
    payload = report.as_dict()
    if args.plot_dir:
        from .plotting import analysis_figures
        payload["figures"] = [str(p) for p in analysis_figures(args.plot_dir, system, inv)]
    emit(args, payload, render_text(report, inv))
    if not report.ok:
        raise TheoremFailure({"failed_checks": [k for k, v in report.checks.items() if not v],
                              "details": report.equilibrium["details"]})
    return EXIT_OK


def cmd_split(args) -> int:
    spec = read_spec(args.spec)
    if len(spec.idempotent) != 1:
        raise SpecError(f"exactly one generator must be flagged idempotent, found {len(spec.idempotent)}",
                        "generators")
    name = spec.idempotent[0]
    e = PSMorphism(spec.base, spec.base, spec.generator(name), check=False)
    if not is_as_idempotent(e):
        raise PreconditionError(f"generator {name!r} is not almost surely idempotent",
                                {"generator": name})
    strict = strictify_idempotent(e)
    split = split_idempotent(e)
    probes = verify_equalizer_coequalizer(e, split, [p.morphism for p in spec.probes])
    checks = {
        "strict_idempotent": strict @ strict == strict,
        "strict_as_equal": as_equal(strict, e.kernel, spec.dist),
        "probes": probes.ok,
    }
    payload = {
        "generator": name,
        "strictified": kernel_json(strict),
        "mid": {"states": list(split.mid.space.labels),
                "p": [fmt_rat(v) for v in split.mid.p.mass]},
        "pi": kernel_json(split.pi.kernel),
        "iota": kernel_json(split.iota.kernel),
        "probes": [{"name": spec.probes[r.index].name, "side": r.side, "applicable": r.applicable,
                    "factorization": kernel_json(r.factorization.kernel) if r.factorization else None,
                    "ok": r.ok} for r in probes.results],
        "checks": checks,
        "ok": all(checks.values()),
    }
    from .report import column_matrix
    text = [f"idempotent: {name}",
            f"splitting object: {', '.join(payload['mid']['states'])}",
            f"  mass ({', '.join(payload['mid']['p'])})",
            "pi (column = source):", column_matrix(split.pi.kernel),
            "iota (column = source):", column_matrix(split.iota.kernel),
            "strictified (column = source):", column_matrix(strict)]
    for pr in payload["probes"]:
        text.append(f"probe {pr['name']}: {pr['side']} {'pass' if pr['ok'] else 'FAIL'}")
    text += [f"{k}: {'pass' if v else 'FAIL'}" for k, v in checks.items()]
    emit(args, payload, "\n".join(text) + "\n")
    if not payload["ok"]:
        raise TheoremFailure({"failed_checks": [k for k, v in checks.items() if not v]})
    return EXIT_OK


def _parse_product_dist(text: str, base: FinSpace, n: int, space: FinSpace) -> Dist:
    text = text.strip()
    if text == "uniform":
        return Dist.uniform(space)
    if text.startswith("iid:"):
        q = [parse_rat(v) for v in text[4:].split(",")]
        if len(q) != len(base):
            raise SpecError(f"iid needs {len(base)} entries, got {len(q)}", "--dist")
        if sum(q) != 1 or any(v < 0 for v in q):
            raise SpecError("iid marginal must be a probability vector", "--dist")
        return iid(base, n, Dist(base, q))
    vals = [parse_rat(v) for v in text.split(",")]
    if len(vals) != len(space):
        raise SpecError(f"expected {len(space)} masses in lexicographic tuple order, got {len(vals)}",
                        "--dist")
    if sum(vals) != 1 or any(v < 0 for v in vals):
        raise SpecError(f"masses sum to {fmt_rat(sum(vals, Fraction(0)))}, not 1", "--dist")
    return Dist(space, vals)


def cmd_exchangeable(args) -> int:
    labels = [s.strip() for s in args.base.split(",")]
    base = FinSpace(labels)
    orbits = orbit_structure(base, args.n)
    space = orbits.product.space
    try:
        p = _parse_product_dist(args.dist, base, args.n, space)
    except FinPSError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(str(exc), "--dist") from None
    system = permutation_system(base, args.n, p)
    inv = invariant_object(system)
    dec = finite_definetti(base, args.n, p)
    hs = hewitt_savage_finite(base, args.n, p, seed=args.seed)

    orbit_rows = []
    uniform_ok = True
    averaging_ok = True
    e = inv.e_D.kernel
    for members, counts in zip(orbits.orbits.blocks, orbits.types):
        mass = p.measure(members)
        orbit_rows.append({"type": list(counts), "size": len(members), "mass": fmt_rat(mass),
                           "states": [space.labels[i] for i in members]})
        b = inv.blocks.block_of[members[0]]
        col = inv.r_dag.kernel._rows[b]
        if mass and col != {i: p.mass[i] / mass for i in members}:
            uniform_ok = False
        # Exchangeable p is constant on an orbit, so r† is uniform there.
        if mass and any(v != Fraction(1, len(members)) for v in col.values()):
            uniform_ok = False
        if mass and any(e._rows[x] != {i: Fraction(1, len(members)) for i in members} for x in members):
            averaging_ok = False
    checks = {
        "orbit_count": len(orbits.orbits) == orbit_count(len(base), args.n),
        "orbits_are_invariant_blocks": inv.blocks.blocks == orbits.orbits.blocks,
        "r_dag_uniform_on_orbits": uniform_ok,
        "e_D_orbit_average": averaging_ok,
        "mixture_identity": sum(w for w, _ in dec) == 1 and all(
            sum(w * c.mass[i] for w, c in dec) == p.mass[i] for i in range(len(space))),
        "hewitt_savage_equivalences": hs.consistent,
    }
    payload = {
        "base": labels, "n": args.n, "orbit_count": len(orbits.orbits),
        "orbits": orbit_rows,
        "decomposition": [{"weight": fmt_rat(w), "support": [space.labels[i] for i in c.support()]}
                          for w, c in dec],
        "hewitt_savage": hs.as_dict(),
        "checks": checks, "ok": all(checks.values()),
    }
    if args.plot_dir:
        from .plotting import orbit_figure
        names = ["".join(map(str, o["type"])) for o in orbit_rows]
        payload["figures"] = [str(orbit_figure(args.plot_dir, names,
                                               [Fraction(o["mass"]) for o in orbit_rows]))]
    lines = [f"X = {{{', '.join(labels)}}}, n = {args.n}: {len(orbit_rows)} orbits"]
    for o in orbit_rows:
        lines.append(f"  type {o['type']}  size {o['size']}  mass {o['mass']}")
    lines.append(f"ergodic: {'yes' if hs.ergodic else 'no'}; product measure: "
                 f"{'yes' if hs.product_measure else 'no'}")
    lines += [f"{k}: {'pass' if v else 'FAIL'}" for k, v in checks.items()]
    emit(args, payload, "\n".join(lines) + "\n")
    if not payload["ok"]:
        raise TheoremFailure({"failed_checks": [k for k, v in checks.items() if not v]})
    return EXIT_OK


def cmd_axioms(args) -> int:
    names = args.law or laws.law_names()
    for n in names:
        if n not in laws.LAWS:
            raise SpecError(f"unknown law {n!r}; known: {', '.join(laws.law_names())}", "--law")
    gen = laws.CaseGen(args.seed, args.max_states, args.max_den)
    reports = [laws.run_law(n, gen, args.cases) for n in names]
    payload = {"seed": args.seed, "cases": args.cases, "laws": [r.as_dict() for r in reports],
               "ok": all(r.ok for r in reports)}
    if args.plot_dir:
        from .plotting import law_figure
        payload["figures"] = [str(law_figure(args.plot_dir, reports))]
    lines = [f"{r.law:28s} {r.cases:6d} cases  {len(r.failures):4d} failures  {r.seconds:7.2f}s"
             for r in reports]
    emit(args, payload, "\n".join(lines) + "\n")
    if not payload["ok"]:
        first = next(r for r in reports if not r.ok)
        raise TheoremFailure({"law": first.law, "counterexample": first.failures[0]})
    return EXIT_OK


def cmd_iso(args) -> int:
    a, b = read_spec(args.spec_a).base, read_spec(args.spec_b).base
    found = find_ps_iso(a, b)
    payload = {"isomorphic": found is not None}
    if found is not None:
        f, g = found
        payload["forward"] = kernel_json(f.kernel)
        payload["backward"] = kernel_json(g.kernel)
        payload["bijection"] = {a.space.labels[x]: b.space.labels[next(iter(f.kernel._rows[x]))]
                                for x in a.support}
        ok = laws.ps_pair_ok(f, g)
        payload["ok"] = ok
        text = "isomorphic: " + ", ".join(f"{k} -> {v}" for k, v in payload["bijection"].items())
    else:
        payload["ok"] = True
        text = "not isomorphic: the positive masses differ as multisets"
    emit(args, payload, text + "\n")
    if not payload["ok"]:
        raise TheoremFailure({"failed_checks": ["iso_pair"]})
    return EXIT_OK


PALETTE = ["#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"]


def dot_graph(spec: ChainSpec) -> str:
    system = spec.system()
    inv = invariant_object(system)
    lines = ["digraph chain {", "  rankdir=LR;", "  node [shape=circle, style=filled];"]
    color = {}
    c = 0
    for b, w in zip(inv.blocks.blocks, inv.p_inv.mass):
        for i in b:
            color[i] = PALETTE[c % len(PALETTE)] if w else "#cccccc"
        if w:
            c += 1
    for i, label in enumerate(system.space.labels):
        mass = fmt_rat(system.p.mass[i])
        lines.append(f'  "{label}" [fillcolor="{color[i]}", label="{label}\\n{mass}"];')
    multi = len(system.generators) > 1
    for name, m in zip(system.names, system.generators):
        for x, row in enumerate(m._rows):
            for y, v in sorted(row.items()):
                lab = f"{name}: {fmt_rat(v)}" if multi else fmt_rat(v)
                lines.append(f'  "{system.space.labels[x]}" -> "{system.space.labels[y]}" '
                             f'[label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_dot(args) -> int:
    text = dot_graph(read_spec(args.spec))
    sys.stdout.write(dumps({"dot": text}) if args.format == "machine" else text)
    return EXIT_OK


# -- wiring ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["report", "machine"], default="report")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--plot-dir", default=None, help="write matplotlib figures here")

    parser = argparse.ArgumentParser(prog="finps", description="Exact analysis of finite "
                                     "measure-preserving Markov dynamics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="invariant object, e_D and decomposition")
    p.add_argument("spec", help="spec file, '-' for stdin, or fixture:<name>")
    p.add_argument("--strict", action="store_true", help="include the strict invariant partition")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("split", parents=[common], help="split the generator flagged idempotent")
    p.add_argument("spec")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("exchangeable", parents=[common], help="permutation dynamics on X^n")
    p.add_argument("--base", required=True, help="comma-separated base labels")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dist", default="uniform",
                   help="'uniform', 'iid:q1,q2,...', or masses in lexicographic tuple order")
    p.set_defaults(func=cmd_exchangeable)

    p = sub.add_parser("axioms", parents=[common], help="run the law suites")
    p.add_argument("--law", action="append", help="law name (repeatable); default all")
    p.add_argument("--cases", type=int, default=200)
    p.add_argument("--max-states", type=int, default=5)
    p.add_argument("--max-den", type=int, default=32)
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("iso", parents=[common], help="PS-isomorphism between two base spaces")
    p.add_argument("spec_a")
    p.add_argument("spec_b")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("dot", parents=[common], help="graphviz transition graph")
    p.add_argument("spec")
    p.set_defaults(func=cmd_dot)
    return parser


def _error(kind: str, message: str, **extra) -> dict:
    err = {"kind": kind, "message": message}
    err.update({k: v for k, v in extra.items() if v is not None})
    return {"error": err}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TheoremFailure as exc:
        sys.stderr.write(json.dumps(_error("theorem-failure", "an embedded check failed",
                                           counterexample=exc.payload), default=str) + "\n")
        return EXIT_THEOREM
    except ConsistencyError as exc:
        sys.stderr.write(json.dumps(_error("theorem-failure", str(exc))) + "\n")
        return EXIT_THEOREM
    except SpecError as exc:
        sys.stderr.write(json.dumps(_error("validation", str(exc), path=exc.path,
                                           line=exc.line)) + "\n")
        return EXIT_INVALID
    except PreconditionError as exc:
        sys.stderr.write(json.dumps(_error("precondition", str(exc), witness=exc.witness or None),
                                    default=str) + "\n")
        return EXIT_INVALID
    except FinPSError as exc:
        sys.stderr.write(json.dumps(_error("validation", str(exc))) + "\n")
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())


def main_exit():  # pragma: no cover
    sys.exit(main())
