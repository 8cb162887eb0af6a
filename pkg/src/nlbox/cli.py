"""``nlbox`` command line.

Every command prints JSON (or CSV with ``--csv``) and exits 0 only when all
of its checks pass.  Inputs are 1-based on the command line and in files.

Boxes are given as a path to a box JSON file or as a short spec::

    ks:P         5-input KS box with marginal P (e.g. ks:1/3)
    ks:N:P       N-input KS box
    pr           the PR box
    det:FA:FB    deterministic box, e.g. det:00000:00000
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import boxcore
from .analysis import (
    classical_membership,
    monogamy_check,
    optimize_classical,
    optimize_contextuality,
    scan_2x2_restrictions,
    verify_membership,
)
from .boxcore import BoxError, DeterministicAssignment, as_probability
from .charts import ChartMixture, chart_mixture_box, m1_mixture, m2_mixture, mixture_marginals, mixture_success
from .correlations import chsh_max, contextuality, ks_fidelity
from .prsim import PrSimStrategy, induced_pr_box, default_strategy, pr_sim_success, search_strategies
from .quantum import StrategySpec, basis_strategy, entangled_strategy_box, klyachko_strategy
from .report import dumps_report, fmt, paper_report


class CliError(Exception):
    pass


# -- argument helpers ----------------------------------------------------

def load_box(spec: str) -> boxcore.BipartiteBox:
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        return boxcore.loads_box(path.read_text())
    kind, *rest = spec.split(":")
    if kind == "pr" and not rest:
        return boxcore.make_pr_box()
    if kind == "ks" and len(rest) in (1, 2):
        n = int(rest[0]) if len(rest) == 2 else 5
        return boxcore.make_ks_box(n, as_probability(rest[-1]))
    if kind == "det" and len(rest) == 2:
        fa, fb = (tuple(int(c) for c in s) for s in rest)
        return boxcore.make_deterministic_box(DeterministicAssignment(fa, fb))
    raise CliError(f"cannot read box {spec!r}")


def load_mixture(spec: str) -> ChartMixture:
    named = {"m1": m1_mixture, "m2": m2_mixture}
    if spec in named:
        return named[spec]()
    return ChartMixture.from_dict(json.loads(Path(spec).read_text()))


def load_quantum(spec: str) -> StrategySpec:
    if spec == "klyachko":
        return klyachko_strategy()
    if spec.startswith("basis"):
        _, _, n = spec.partition(":")
        return basis_strategy(int(n or 5))
    return StrategySpec.from_dict(json.loads(Path(spec).read_text()))


def one_based_pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(t) - 1 for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated inputs, got {text!r}") from None
    return a, b


def one_based(text: str) -> int:
    return int(text) - 1


def _selection(sel) -> dict:
    return {"x": [v + 1 for v in sel.x], "y": [v + 1 for v in sel.y]}


def _emit(args, doc: dict, table: list[dict] | None = None) -> None:
    if args.csv and table is not None:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(table[0]) if table else [], lineterminator="\n")
        w.writeheader()
        for row in table:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in row.items()})
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _box_rows(box) -> list[dict]:
    rows = []
    for x, y, c in boxcore.iter_cells(box):
        rows.append({"x": x + 1, "y": y + 1, **{f"p{a}{b}": boxcore.format_probability(c[a, b])
                                               for a in (0, 1) for b in (0, 1)}})
    return rows


# -- commands ------------------------------------------------------------

def cmd_box_build(args) -> bool:
    box = load_box(args.spec)
    text = boxcore.dumps_box(box)
    if args.output:
        Path(args.output).write_text(text + "\n")
    _emit(args, boxcore.box_to_dict(box), _box_rows(box))
    return True


def cmd_box_check(args) -> bool:
    box = load_box(args.box)
    rep = boxcore.check_no_signaling(box, args.tol)
    rows = [{"side": v.side, "output": v.output, "input": v.input + 1,
             "other_inputs": [i + 1 for i in v.other_inputs], "magnitude": fmt(v.magnitude)}
            for v in rep.violations]
    _emit(args, {"no_signaling": rep.passed, "tol": rep.tol, "violations": rows, "passed": rep.passed}, rows)
    return rep.passed


def cmd_box_show(args) -> bool:
    box = load_box(args.box)
    doc = boxcore.box_to_dict(box)
    doc["exact"] = box.exact
    doc["no_signaling"] = boxcore.check_no_signaling(box, args.tol).passed
    if box.shape == (5, 5):
        Z, K = contextuality(box)
        doc.update(ks_fidelity=fmt(ks_fidelity(box)), Z=fmt(Z), K=fmt(K))
    _emit(args, doc, _box_rows(box))
    return True


def cmd_chsh(args) -> bool:
    box = load_box(args.box)
    if args.flip:
        box = boxcore.flip_outputs(box, args.flip)
    if args.x or args.y:
        if not (args.x and args.y):
            raise CliError("--x and --y go together")
        box = boxcore.restrict(box, args.x, args.y)
    r = chsh_max(box)
    sel = _selection(r.selection)
    if args.x:
        # report the witness in the unrestricted box's labels
        sel = {"x": [args.x[v - 1] + 1 for v in sel["x"]], "y": [args.y[v - 1] + 1 for v in sel["y"]]}
    doc = {"chsh_max": fmt(r.value), "selection": sel,
           "minus": [v + 1 for v in r.variant.minus], "sign": r.variant.sign}
    if args.x:
        doc["restricted_to"] = {"x": [v + 1 for v in args.x], "y": [v + 1 for v in args.y]}
    _emit(args, doc)
    return True


def cmd_classical_optimize(args) -> bool:
    p = as_probability(args.p)
    opt = optimize_classical(p)
    ctx = optimize_contextuality(p)
    doc = {
        "p": fmt(p),
        "optimum": fmt(opt.optimum),
        "witness": opt.witness.to_dict(),
        "witness_success": fmt(mixture_success(opt.witness)),
        "contextuality_optimum": fmt(ctx.value),
        "contextuality_witness": None if ctx.witness is None else ctx.witness.to_dict(),
        "contextuality_chart_class": ctx.chart_class,
    }
    ok = mixture_success(opt.witness) == opt.optimum
    doc["passed"] = ok
    _emit(args, doc)
    return ok


def cmd_classical_eval(args) -> bool:
    m = load_mixture(args.mixture)
    box = chart_mixture_box(m)
    Z, K = contextuality(box)
    doc = {
        "mixture": m.to_dict(),
        "success": fmt(mixture_success(m)),
        "ks_fidelity": fmt(ks_fidelity(box)),
        "marginals": fmt(mixture_marginals(m)),
        "Z": fmt(Z),
        "K": fmt(K),
    }
    ok = doc["success"] == doc["ks_fidelity"]
    doc["passed"] = ok
    _emit(args, doc)
    return ok


def cmd_quantum_eval(args) -> bool:
    spec = load_quantum(args.strategy)
    box = entangled_strategy_box(spec)
    doc = {"m": spec.m, "no_signaling": boxcore.check_no_signaling(box).passed}
    if box.shape == (5, 5):
        Z, K = contextuality(box)
        doc.update(ks_fidelity=fmt(ks_fidelity(box)), Z=fmt(Z), K=fmt(K))
    doc["chsh_max"] = fmt(chsh_max(box).value)
    if args.show_box:
        doc["box"] = boxcore.box_to_dict(box)
    doc["passed"] = doc["no_signaling"]
    _emit(args, doc)
    return doc["passed"]


def _membership_doc(box, rep) -> dict:
    doc = {"feasible": rep.feasible, "verified": verify_membership(box, rep)}
    if rep.feasible:
        doc["witness"] = {d.key(): fmt(w) for d, w in rep.witness.items()}
    else:
        doc["certificate"] = fmt(list(rep.certificate))
    return doc


def cmd_polytope_member(args) -> bool:
    box = load_box(args.box)
    doc = _membership_doc(box, classical_membership(box))
    doc["passed"] = doc["verified"]
    _emit(args, doc)
    return doc["verified"]


def cmd_polytope_scan(args) -> bool:
    box = load_box(args.box)
    rows = []
    ok = True
    for r in scan_2x2_restrictions(box):
        verified = verify_membership(boxcore.restrict(box, r.xs, r.ys), r.membership)
        # a classical sub-box can never beat the local bound
        ok &= verified and (not r.membership.feasible or r.chsh.value <= 2)
        rows.append({"x": [v + 1 for v in r.xs], "y": [v + 1 for v in r.ys],
                     "chsh_max": fmt(r.chsh.value), "feasible": r.membership.feasible, "verified": verified})
    doc = {"rows": rows, "all_feasible": all(r["feasible"] for r in rows), "passed": ok}
    _emit(args, doc, rows)
    return ok


def cmd_prsim(args) -> bool:
    ks = load_box(args.box)
    plan = default_strategy()
    if args.map_a or args.map_b:
        plan = PrSimStrategy(args.map_a or plan.input_map_a, args.map_b or plan.input_map_b,
                             not args.no_sync, not args.no_bob_flip)
    pr = induced_pr_box(ks, plan)
    doc = {
        "strategy": {"input_map_a": [v + 1 for v in plan.input_map_a], "input_map_b": [v + 1 for v in plan.input_map_b],
                     "synchronized_flip": plan.synchronized_flip, "bob_flip": plan.bob_flip},
        "success": fmt(pr_sim_success(pr)),
        "box": boxcore.box_to_dict(pr),
    }
    if args.search:
        best, s = search_strategies(ks)
        doc["search_best"] = fmt(best)
        doc["search_strategy"] = {"input_map_a": [v + 1 for v in s.input_map_a],
                                  "input_map_b": [v + 1 for v in s.input_map_b],
                                  "synchronized_flip": s.synchronized_flip, "bob_flip": s.bob_flip,
                                  "alice_flip": s.alice_flip}
    doc["passed"] = boxcore.check_no_signaling(pr).passed
    _emit(args, doc)
    return doc["passed"]


def cmd_monogamy(args) -> bool:
    box = load_box(args.box)
    rep = monogamy_check(box, args.alice, args.bc)

    def dist(d):
        return {f"{b}{c}": fmt(v) for (b, c), v in d.items()}

    doc = {
        "alice_inputs": [x + 1 for x in rep.alice_inputs],
        "bc_input": rep.bc_input + 1,
        "feasible": rep.feasible,
        "signaling": rep.signaling,
        "feasible_unrestricted": rep.feasible_unrestricted,
        "bc_distributions": {str(x + 1): dist(d) for x, d in rep.bc_distributions.items()},
        "bc_ranges": {str(x + 1): {f"{b}{c}": fmt(list(r)) for (b, c), r in d.items()}
                      for x, d in rep.bc_ranges.items()},
    }
    _emit(args, doc)
    return True


def cmd_harness_run(args) -> bool:
    from .harness import RunConfig, run_rounds, run_strategy

    cfg = RunConfig(args.seed, args.rounds, args.tol, args.workers)
    if args.box:
        rep = run_rounds(load_box(args.box), cfg)
    else:
        s = args.strategy
        if s in ("m1", "m2") or s.endswith(".mix.json"):
            obj = load_mixture(s)
        elif s == "prsim":
            obj = default_strategy()
        else:
            obj = load_quantum(s)
        rep = run_strategy(obj, cfg)
    doc = rep.to_dict()
    rows = [{"x": k.split(",")[0], "y": k.split(",")[1], "rounds": v["rounds"],
             **{f"f{a}{b}": (None if v["frequencies"] is None else v["frequencies"][a][b])
                for a in (0, 1) for b in (0, 1)}}
            for k, v in doc["pairs"].items()]
    _emit(args, doc, rows)
    return rep.passed


def cmd_report_paper(args) -> bool:
    doc = paper_report(args.seed, args.rounds, args.tol)
    if args.csv:
        rows = doc["checks"] + doc.get("monte_carlo", {}).get("checks", [])
        _emit(args, doc, [{"name": r["name"], "expected": r["expected"], "computed": r["computed"],
                           "pass": r["pass"]} for r in rows])
    else:
        sys.stdout.write(dumps_report(doc) + "\n")
    return doc["passed"]


# -- parser --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlbox", description="No-signaling box and KS-correlation toolkit.")
    p.add_argument("--csv", action="store_true", help="print tabular sections as CSV")
    sub = p.add_subparsers(dest="command", required=True)

    def add(parent, name, fn, help_):
        sp = parent.add_parser(name, help=help_)
        sp.add_argument("--csv", action="store_true", default=argparse.SUPPRESS, help="CSV output")
        sp.set_defaults(fn=fn)
        return sp

    box = sub.add_parser("box", help="build, check and show boxes").add_subparsers(dest="action", required=True)
    sp = add(box, "build", cmd_box_build, "write a box document")
    sp.add_argument("spec", help="ks:P, ks:N:P, pr or det:FA:FB")
    sp.add_argument("-o", "--output")
    sp = add(box, "check", cmd_box_check, "no-signaling check")
    sp.add_argument("box")
    sp.add_argument("--tol", type=float, default=None)
    sp = add(box, "show", cmd_box_show, "cells and summary values")
    sp.add_argument("box")
    sp.add_argument("--tol", type=float, default=None)

    sp = add(sub, "chsh", cmd_chsh, "maximal CHSH value")
    sp.add_argument("box")
    sp.add_argument("--flip", choices=["A", "B", "both"])
    sp.add_argument("--x", type=one_based_pair, help="restrict Alice to two inputs, e.g. 2,1")
    sp.add_argument("--y", type=one_based_pair, help="restrict Bob to two inputs")

    cl = sub.add_parser("classical", help="chart mixtures").add_subparsers(dest="action", required=True)
    sp = add(cl, "optimize", cmd_classical_optimize, "best chart mixture for a marginal")
    sp.add_argument("--p", default="1/3")
    sp = add(cl, "eval", cmd_classical_eval, "evaluate a chart mixture")
    sp.add_argument("mixture", help="m1, m2 or a mixture JSON file")

    qu = sub.add_parser("quantum", help="entangled strategies").add_subparsers(dest="action", required=True)
    sp = add(qu, "eval", cmd_quantum_eval, "evaluate an entangled strategy")
    sp.add_argument("strategy", nargs="?", default="klyachko", help="klyachko, basis[:N] or a spec JSON file")
    sp.add_argument("--show-box", action="store_true")

    po = sub.add_parser("polytope", help="classical polytope").add_subparsers(dest="action", required=True)
    sp = add(po, "member", cmd_polytope_member, "exact membership with witness or certificate")
    sp.add_argument("box")
    sp = add(po, "scan", cmd_polytope_scan, "every 2x2 restriction")
    sp.add_argument("box")

    sp = add(sub, "prsim", cmd_prsim, "PR-box simulation through a KS box")
    sp.add_argument("box", nargs="?", default="ks:1/3")
    sp.add_argument("--map-a", type=one_based_pair)
    sp.add_argument("--map-b", type=one_based_pair)
    sp.add_argument("--no-sync", action="store_true")
    sp.add_argument("--no-bob-flip", action="store_true")
    sp.add_argument("--search", action="store_true", help="exhaustive strategy search")

    sp = add(sub, "monogamy", cmd_monogamy, "sharing a box with two partners")
    sp.add_argument("box", nargs="?", default="ks:1/3")
    sp.add_argument("--alice", type=one_based_pair, default=(0, 1))
    sp.add_argument("--bc", type=one_based, default=0)

    ha = sub.add_parser("harness", help="Monte Carlo harness").add_subparsers(dest="action", required=True)
    sp = add(ha, "run", cmd_harness_run, "seeded simulation")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--box")
    g.add_argument("--strategy", help="m1, m2, *.mix.json, klyachko, basis[:N], prsim or a spec JSON file")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--rounds", type=int, default=10 ** 6)
    sp.add_argument("--tol", type=float, default=5.0, help="tolerance in binomial standard deviations")
    sp.add_argument("--workers", type=int, default=1)

    rp = sub.add_parser("report", help="reproduction report").add_subparsers(dest="action", required=True)
    sp = add(rp, "paper", cmd_report_paper, "every headline constant, expected vs computed")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--rounds", type=int, default=0, help="also run the Monte Carlo checks")
    sp.add_argument("--tol", type=float, default=5.0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ok = args.fn(args)
    except (CliError, BoxError, ValueError, OSError) as exc:
        sys.stderr.write(f"nlbox: error: {exc}\n")
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
