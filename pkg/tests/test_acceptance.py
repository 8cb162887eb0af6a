"""One test per acceptance criterion, each reporting a PASS/FAIL line."""

import math
import time
from fractions import Fraction as F

import numpy as np
from hypothesis import given, settings, strategies as st

from conftest import ACCEPTANCE_LINES
from nlbox import ratlp
from nlbox.analysis import (
    classical_membership,
    monogamy_check,
    optimize_classical,
    optimize_contextuality,
    scan_2x2_restrictions,
    verify_membership,
)
from nlbox.boxcore import flip_outputs, make_ks_box, mix, zero_box
from nlbox.charts import C1, PENTAGRAM_ADMISSIBLE, ChartMixture, chart_mixture_box, m2_mixture, mixture_marginals, mixture_success
from nlbox.correlations import PENTAGON_EDGES, PENTAGRAM_EDGES, ChshSelection, chsh, chsh_max, contextuality, ks_fidelity
from nlbox.harness import RunConfig, run_strategy
from nlbox.charts import m1_mixture
from nlbox.prsim import induced_pr_box, default_strategy, pr_sim_success, search_strategies
from nlbox.boxcore import marginal
from nlbox.quantum import basis_strategy, entangled_strategy_box, klyachko_strategy, klyachko_vectors

QUANTUM_VALUE = 1 - (2 / 15) * ((3 - math.sqrt(5)) / 2)
EPS = 10 * (3 - math.sqrt(5)) / 6


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_classical_optimum():
    t0 = time.perf_counter()
    opt = optimize_classical(F(1, 3))
    dt = time.perf_counter() - t0
    ok = opt.optimum == F(71, 75) and mixture_success(opt.witness) == F(71, 75) and dt < 1.0
    record(1, ok, f"optimum={opt.optimum} witness={mixture_success(opt.witness)} time={dt:.3f}s")


def test_criterion_02_m2_value():
    v = mixture_success(m2_mixture())
    record(2, v == F(14, 15), f"mixture_success(M2)={v}")


def test_criterion_03_quantum_value():
    v = ks_fidelity(entangled_strategy_box(klyachko_strategy()))
    ok = abs(v - QUANTUM_VALUE) <= 1e-9 and v > 71 / 75
    record(3, ok, f"ks_fidelity={v:.12f} expected={QUANTUM_VALUE:.12f}")


def test_criterion_04_klyachko():
    vecs, psi = klyachko_vectors()
    s = float(np.sum((vecs @ psi) ** 2))
    # vertices of the hull are the admissible charts themselves
    vertex_max = max(sum(mixture_marginals(ChartMixture.point(c))) for c in PENTAGRAM_ADMISSIBLE)
    # and an LP over the whole hull agrees
    lp = ratlp.LinearProgram([len(c.ones) for c in PENTAGRAM_ADMISSIBLE],
                             A_eq=[[1] * len(PENTAGRAM_ADMISSIBLE)], b_eq=[1])
    hull_max = ratlp.solve(lp).optimum
    ok = abs(s - math.sqrt(5)) <= 1e-12 and vertex_max <= 2 and hull_max == 2
    record(4, ok, f"sum<i|psi>^2={s:.15f} vertex max={vertex_max} hull max={hull_max}")


def test_criterion_05_geometry():
    vecs, psi = klyachko_vectors()
    gram = max(abs(vecs[i] @ vecs[j]) for i, j in map(sorted, PENTAGRAM_EDGES))
    gon = max(abs(abs(vecs[i] @ vecs[j]) - (math.sqrt(5) - 1) / 2) for i, j in map(sorted, PENTAGON_EDGES))
    proj = float(np.max(np.abs((vecs @ psi) ** 2 - 1 / math.sqrt(5))))
    ok = gram <= 1e-12 and gon <= 1e-12 and proj <= 1e-12
    record(5, ok, f"pentagram |dot| {gram:.1e}, pentagon err {gon:.1e}, projection err {proj:.1e}")


def test_criterion_06_perfect_simulations():
    charts_ok = chart_mixture_box(ChartMixture.uniform(C1)) == make_ks_box(5, F(1, 5))
    q_ok = entangled_strategy_box(basis_strategy(5)).equals(make_ks_box(5, F(1, 5)), 1e-12)
    record(6, charts_ok and q_ok, f"uniform C1 exact={charts_ok} basis m=5 within 1e-12={q_ok}")


def test_criterion_07_chsh_landscape():
    a = chsh_max(make_ks_box(5, F(1, 3))).value
    flipped = flip_outputs(make_ks_box(5, F(1, 2)), "B")
    b = chsh_max(make_ks_box(5, F(1, 2))).value
    witness = chsh(flipped, ChshSelection((1, 0), (2, 0)))
    c = chsh_max(make_ks_box(5, (1 + math.sqrt(2)) / 6)).value
    ok = a == 2 and b == 4 and witness == 4 and chsh_max(flipped).value == 4 and abs(c - 2 * math.sqrt(2)) <= 1e-12
    record(7, ok, f"KS(1/3)={a} KS(1/2)={b} witness x=(2,1),y=(3,1) after Bob flip={witness} Tsirelson={c:.14f}")


def test_criterion_08_pr_simulation():
    ks = make_ks_box(5, F(1, 3))
    pr = induced_pr_box(ks, default_strategy())
    v = pr_sim_success(pr)
    margins = {marginal(pr, s, 1, i, j) for s in "AB" for i in (0, 1) for j in (0, 1)}
    best, _ = search_strategies(ks)
    ok = v == F(3, 4) and margins == {F(1, 2)} and best == F(3, 4)
    record(8, ok, f"success={v} marginals={','.join(map(str, sorted(margins)))} search best={best}")


def test_criterion_09_membership():
    t0 = time.perf_counter()
    ks3, ks5 = make_ks_box(5, F(1, 3)), make_ks_box(5, F(1, 5))
    r3, r5 = classical_membership(ks3), classical_membership(ks5)
    rows = scan_2x2_restrictions(ks3)
    dt = time.perf_counter() - t0
    ok = (not r3.feasible and verify_membership(ks3, r3) and r5.feasible and verify_membership(ks5, r5)
          and all(r.membership.feasible for r in rows) and dt < 30)
    record(9, ok, f"KS(1/3) infeasible+certified, KS(1/5) feasible+witnessed, "
                  f"{sum(r.membership.feasible for r in rows)}/{len(rows)} restrictions feasible, {dt:.2f}s")


def test_criterion_10_contextuality():
    ks = tuple(contextuality(make_ks_box(5, F(1, 3))))
    opt = optimize_contextuality(F(1, 3)).value
    Z, K = contextuality(entangled_strategy_box(klyachko_strategy()))
    ok = ks == (0, 5) and opt == F(11, 3) and abs(Z - EPS) <= 1e-9 and abs(K - (5 - EPS)) <= 1e-9
    record(10, ok, f"KS=(Z,K)=({ks[0]}, {ks[1]}) classical optimum={opt} quantum=({Z:.10f}, {K:.10f})")


def test_criterion_11_monogamy():
    rep = monogamy_check(make_ks_box(5, F(1, 3)), (0, 1), 0)
    a, b = rep.bc_distributions[0][(0, 1)], rep.bc_distributions[1][(0, 1)]
    ok = a == 0 and b == F(1, 6) and not rep.feasible
    record(11, ok, f"p_BC(01|x=1)={a} p_BC(01|x=2)={b} LP {'feasible' if rep.feasible else 'infeasible'}")


_decomp = {"n": 0, "ok": True}


@settings(max_examples=100, deadline=None, database=None)
@given(st.fractions(min_value=0, max_value=F(1, 2), max_denominator=10 ** 6))
def _decomposition_property(p):
    ok = make_ks_box(5, p) == mix([make_ks_box(5, F(1, 2)), zero_box(5)], [2 * p, 1 - 2 * p])
    _decomp["n"] += 1
    _decomp["ok"] &= ok
    assert ok


def test_criterion_12_mixture_decomposition():
    _decomposition_property()
    record(12, _decomp["ok"] and _decomp["n"] >= 100,
           f"KS(p) = 2p KS(1/2) + (1-2p) det00 on {_decomp['n']} random rationals")


def test_criterion_13_monte_carlo():
    cfg = RunConfig(20241014, 10 ** 6)
    t0 = time.perf_counter()
    reps = {name: run_strategy(s, cfg) for name, s in
            (("M1", m1_mixture()), ("quantum", klyachko_strategy()), ("prsim", default_strategy()))}
    again = run_strategy(m1_mixture(), cfg).dumps() == reps["M1"].dumps()
    again &= run_strategy(default_strategy(), cfg).dumps() == reps["prsim"].dumps()
    dt = time.perf_counter() - t0
    within = all(r.score_sigmas <= 5 for r in reps.values())
    detail = ", ".join(f"{k} {r.score:.6f} ({r.score_sigmas:.2f} sigma)" for k, r in reps.items())
    record(13, within and again, f"{detail}; byte-identical reruns={again}; {dt:.1f}s")
