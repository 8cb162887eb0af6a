"""Optimization and membership questions answered with the exact LP core."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from . import ratlp
from .boxcore import (
    BipartiteBox,
    BoxError,
    DeterministicAssignment,
    as_probability,
    make_deterministic_box,
    mix,
    restrict,
)
from .charts import (
    CHARTS,
    PENTAGON_ADMISSIBLE,
    PENTAGRAM_ADMISSIBLE,
    Chart,
    ChartMixture,
    chart_success,
    edge_failures,
)
from .correlations import ChshResult, chsh_max

#: n_a + n_b above this would mean more than 65536 deterministic vertices
MAX_MEMBERSHIP_INPUTS = 16


def _check_marginal(p) -> Fraction:
    p = as_probability(p)
    if not isinstance(p, Fraction):
        raise BoxError("exact optimization needs a rational marginal")
    if p < 0 or p > Fraction(1, 2):
        raise BoxError(f"marginal p={p} outside [0, 1/2]")
    return p


def _marginal_constraints(charts: Sequence[Chart], p: Fraction):
    A = [[1] * len(charts)]
    b = [Fraction(1)]
    for i in range(5):
        A.append([c.bits[i] for c in charts])
        b.append(p)
    return A, b


def _mixture_from(charts: Sequence[Chart], weights) -> ChartMixture:
    return ChartMixture.from_weights({c: w for c, w in zip(charts, weights) if w})


@dataclass(frozen=True)
class ClassicalOptimum:
    optimum: Fraction
    witness: ChartMixture
    outcome: ratlp.LPOutcome


def optimize_classical(p) -> ClassicalOptimum:
    """Best KS success over chart mixtures whose every marginal equals ``p``."""
    p = _check_marginal(p)
    charts = list(CHARTS)
    A, b = _marginal_constraints(charts, p)
    lp = ratlp.LinearProgram([chart_success(c) for c in charts], A, b)
    out = ratlp.solve(lp)
    if out.status != ratlp.OPTIMAL:
        raise RuntimeError(f"chart LP unexpectedly {out.status}")
    return ClassicalOptimum(out.optimum, _mixture_from(charts, out.witness), out)


@dataclass(frozen=True)
class ContextualityOptimum:
    value: Fraction | None
    witness: ChartMixture | None
    chart_class: str | None
    sign: int | None

    @property
    def feasible(self) -> bool:
        return self.value is not None


_CHART_CLASSES = {
    "pentagram": PENTAGRAM_ADMISSIBLE,
    "pentagon": PENTAGON_ADMISSIBLE,
    "all": list(CHARTS),
}


def optimize_contextuality(p, classes: Sequence[str] = ("pentagram", "pentagon")) -> ContextualityOptimum:
    """Maximize ``diag - Z`` over chart mixtures with marginal ``p``.

    Charts are restricted to one orthogonality class at a time (those that
    never put 1 on both ends of a pentagram edge, or of a pentagon edge).
    Within a class the absolute value in ``Z`` is split into its two sign
    cases, each a linear program.  Pass ``classes=("all",)`` to drop the
    restriction.  Returns ``value=None`` when no admissible mixture has
    marginal ``p`` (``p > 2/5`` for the restricted classes).
    """
    p = _check_marginal(p)
    best = ContextualityOptimum(None, None, None, None)
    for name in classes:
        charts = _CHART_CLASSES[name]
        # gon - gram failure count; Z = |E[imbalance]| and diag = 5 for any chart
        imbalance = [Fraction(gon - gram) for gram, gon in (edge_failures(c) for c in charts)]
        A, b = _marginal_constraints(charts, p)
        for sign in (1, -1):
            lp = ratlp.LinearProgram(
                [-sign * v for v in imbalance], A, b,
                A_ub=[[-sign * v for v in imbalance]], b_ub=[0],
            )
            out = ratlp.solve(lp)
            if out.status != ratlp.OPTIMAL:
                continue
            value = 5 + out.optimum
            if best.value is None or value > best.value:
                best = ContextualityOptimum(value, _mixture_from(charts, out.witness), name, sign)
    return best


# -- classical polytope membership ---------------------------------------

def deterministic_assignments(n_a: int, n_b: int) -> list[DeterministicAssignment]:
    return [DeterministicAssignment(fa, fb)
            for fa in product((0, 1), repeat=n_a) for fb in product((0, 1), repeat=n_b)]


def _entry_index(n_b: int, x: int, y: int, a: int, b: int) -> int:
    return ((x * n_b + y) * 2 + a) * 2 + b


@dataclass(frozen=True)
class MembershipReport:
    feasible: bool
    witness: dict | None = None
    certificate: tuple | None = None

    def witness_box(self, n_a: int, n_b: int) -> BipartiteBox:
        items = list(self.witness.items())
        return mix([make_deterministic_box(d, n_a, n_b) for d, _ in items], [w for _, w in items])


def classical_membership(box: BipartiteBox) -> MembershipReport:
    """Is ``box`` an exact mixture of deterministic boxes?

    Infeasible reports carry ``y`` indexed like ``box.cells.flat`` with
    ``y . D <= 0`` for every deterministic box ``D`` and ``y . box > 0``.
    """
    if not box.exact:
        raise BoxError("classical membership needs a rational box")
    if box.n_a + box.n_b > MAX_MEMBERSHIP_INPUTS:
        raise BoxError(f"{box.n_a}+{box.n_b} inputs exceed the vertex guard")
    verts = deterministic_assignments(box.n_a, box.n_b)
    n_rows = box.n_a * box.n_b * 4
    A = [[0] * len(verts) for _ in range(n_rows)]
    for j, d in enumerate(verts):
        for x in range(box.n_a):
            for y in range(box.n_b):
                A[_entry_index(box.n_b, x, y, d.f_a[x], d.f_b[y])][j] = 1
    b = list(box.cells.flat)
    out = ratlp.solve(ratlp.LinearProgram([0] * len(verts), A, b))
    if out.status == ratlp.INFEASIBLE:
        return MembershipReport(False, certificate=out.certificate)
    witness = {d: w for d, w in zip(verts, out.witness) if w}
    return MembershipReport(True, witness=witness)


def verify_membership(box: BipartiteBox, report: MembershipReport) -> bool:
    """Independent exact check of a membership witness or certificate."""
    if report.feasible:
        if report.witness is None or sum(report.witness.values()) != 1:
            return False
        return report.witness_box(box.n_a, box.n_b) == box
    y = report.certificate
    if y is None or len(y) != box.cells.size:
        return False
    if sum(yi * v for yi, v in zip(y, box.cells.flat)) <= 0:
        return False
    for d in deterministic_assignments(box.n_a, box.n_b):
        val = sum(y[_entry_index(box.n_b, x, yy, d.f_a[x], d.f_b[yy])]
                  for x in range(box.n_a) for yy in range(box.n_b))
        if val > 0:
            return False
    return True


@dataclass(frozen=True)
class ScanRow:
    xs: tuple[int, int]
    ys: tuple[int, int]
    chsh: ChshResult
    membership: MembershipReport


def scan_2x2_restrictions(box: BipartiteBox) -> list[ScanRow]:
    """CHSH maximum and classical membership for every unordered 2x2 sub-box."""
    rows = []
    for xs in combinations(range(box.n_a), 2):
        for ys in combinations(range(box.n_b), 2):
            sub = restrict(box, xs, ys)
            rows.append(ScanRow(xs, ys, chsh_max(sub), classical_membership(sub)))
    return rows


# -- monogamy ------------------------------------------------------------

BC_OUTCOMES = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class MonogamyReport:
    alice_inputs: tuple[int, int]
    bc_input: int
    feasible: bool
    feasible_unrestricted: bool
    bc_distributions: dict
    bc_ranges: dict
    certificate: tuple | None

    @property
    def signaling(self) -> bool:
        return not self.feasible


def _tri_index(k: int, a: int, b: int, c: int) -> int:
    return k * 8 + a * 4 + b * 2 + c


def _monogamy_lp(box, xs, y0, independent: bool) -> ratlp.LinearProgram:
    A, rhs = [], []

    def row():
        r = [Fraction(0)] * 16
        A.append(r)
        return r

    for k, x in enumerate(xs):
        cell = box.cells[x, y0]
        for a, s in product((0, 1), repeat=2):
            r = row()  # Alice-Bob marginal
            for c in (0, 1):
                r[_tri_index(k, a, s, c)] = Fraction(1)
            rhs.append(cell[a, s])
            r = row()  # Alice-Charles marginal
            for bb in (0, 1):
                r[_tri_index(k, a, bb, s)] = Fraction(1)
            rhs.append(cell[a, s])
        if independent:
            # p(abc|x) p(a|x) = p(ab|x) p(ac|x): linear once the cell is fixed
            for a, bb, c in product((0, 1), repeat=3):
                pa = cell[a, 0] + cell[a, 1]
                r = row()
                r[_tri_index(k, a, bb, c)] = pa
                rhs.append(cell[a, bb] * cell[a, c])
    for bb, c in BC_OUTCOMES:
        r = row()  # Bob-Charles statistics may not depend on Alice's input
        for a in (0, 1):
            r[_tri_index(0, a, bb, c)] += 1
            r[_tri_index(1, a, bb, c)] -= 1
        rhs.append(Fraction(0))
    return ratlp.LinearProgram([0] * 16, A, rhs)


def _bc_range(box, x, y0, bc) -> tuple[Fraction, Fraction]:
    cell = box.cells[x, y0]
    A, rhs = [], []
    for a, s in product((0, 1), repeat=2):
        A.append([int(aa == a and bb == s) for aa, bb, _ in product((0, 1), repeat=3)])
        rhs.append(cell[a, s])
        A.append([int(aa == a and cc == s) for aa, _, cc in product((0, 1), repeat=3)])
        rhs.append(cell[a, s])
    target = [int((bb, cc) == bc) for _, bb, cc in product((0, 1), repeat=3)]
    hi = ratlp.solve(ratlp.LinearProgram(target, A, rhs)).optimum
    lo = -ratlp.solve(ratlp.LinearProgram([-t for t in target], A, rhs)).optimum
    return lo, hi


def monogamy_check(box: BipartiteBox, alice_inputs: Sequence[int], bc_input: int) -> MonogamyReport:
    """Can Alice share ``box`` with both Bob and Charles without signaling to them?

    Bob and Charles both use input ``bc_input`` and each sees the box's
    ``(x, bc_input)`` cell with Alice.  Bob and Charles are taken to share no
    correlations of their own, i.e. their outputs are independent given
    Alice's input and output; this pins down ``p(b, c | x)`` for each of
    Alice's inputs, and the check asks whether it depends on ``x``.

    ``bc_ranges`` gives the interval of each ``p_BC(b, c | x)`` allowed by
    the two marginals alone, and ``feasible_unrestricted`` repeats the
    feasibility question without the independence assumption.
    """
    if not box.exact:
        raise BoxError("monogamy check needs a rational box")
    xs = tuple(alice_inputs)
    if len(xs) != 2 or xs[0] == xs[1] or not all(0 <= x < box.n_a for x in xs):
        raise BoxError(f"alice_inputs {xs} must be two distinct A-inputs")
    if not 0 <= bc_input < box.n_b:
        raise BoxError(f"bc_input {bc_input} out of range")

    dists, ranges = {}, {}
    for x in xs:
        cell = box.cells[x, bc_input]
        d = {}
        for bb, c in BC_OUTCOMES:
            total = Fraction(0)
            for a in (0, 1):
                pa = cell[a, 0] + cell[a, 1]
                if pa:
                    total += cell[a, bb] * cell[a, c] / pa
            d[(bb, c)] = total
        dists[x] = d
        ranges[x] = {bc: _bc_range(box, x, bc_input, bc) for bc in BC_OUTCOMES}

    strict = ratlp.solve(_monogamy_lp(box, xs, bc_input, independent=True))
    loose = ratlp.solve(_monogamy_lp(box, xs, bc_input, independent=False))
    return MonogamyReport(
        alice_inputs=xs,
        bc_input=bc_input,
        feasible=strict.feasible,
        feasible_unrestricted=loose.feasible,
        bc_distributions=dists,
        bc_ranges=ranges,
        certificate=strict.certificate,
    )
