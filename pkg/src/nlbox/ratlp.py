"""Exact rational linear programming.

A two-phase primal simplex with Bland's rule.  The tableau is kept as a
numpy object array of Python integers; each row carries an implicit
positive scale factor, so a pivot is a fraction-free row combination
followed by a gcd reduction.  This is much faster than ``Fraction``
arithmetic and still exact.

Problems are stated as::

    maximize    c . w
    subject to  A_eq w  = b_eq
                A_ub w <= b_ub
                w >= 0

Inequality rows get slack columns.  Returned certificates refer to the
standard form ``[A_ub I; A_eq 0] [w; s] = [b_ub; b_eq]``, with the
inequality rows first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LPError(ValueError):
    """Malformed linear program."""


def _frac_rows(rows) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in rows]


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple
    A_eq: tuple = ()
    b_eq: tuple = ()
    A_ub: tuple = ()
    b_ub: tuple = ()

    def __init__(self, objective, A_eq=(), b_eq=(), A_ub=(), b_ub=()):
        c = tuple(Fraction(v) for v in objective)
        Aeq = tuple(tuple(r) for r in _frac_rows(A_eq))
        beq = tuple(Fraction(v) for v in b_eq)
        Aub = tuple(tuple(r) for r in _frac_rows(A_ub))
        bub = tuple(Fraction(v) for v in b_ub)
        n = len(c)
        if len(Aeq) != len(beq) or len(Aub) != len(bub):
            raise LPError("constraint matrix and right-hand side lengths differ")
        for row in Aeq + Aub:
            if len(row) != n:
                raise LPError(f"constraint row has {len(row)} entries, expected {n}")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "A_eq", Aeq)
        object.__setattr__(self, "b_eq", beq)
        object.__setattr__(self, "A_ub", Aub)
        object.__setattr__(self, "b_ub", bub)

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def standard_form(self):
        """Return ``(A, b, c)`` as Fraction lists with slack columns appended."""
        n, k = self.n_vars, len(self.A_ub)
        A = []
        for i, row in enumerate(self.A_ub):
            A.append(list(row) + [Fraction(int(i == j)) for j in range(k)])
        for row in self.A_eq:
            A.append(list(row) + [Fraction(0)] * k)
        b = list(self.b_ub) + list(self.b_eq)
        c = list(self.objective) + [Fraction(0)] * k
        return A, b, c


@dataclass(frozen=True)
class LPOutcome:
    status: str
    optimum: Fraction | None = None
    witness: tuple | None = None
    certificate: tuple | None = None
    dual: tuple | None = None
    ray: tuple | None = None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


def _row_gcd_reduce(row: np.ndarray) -> np.ndarray:
    g = math.gcd(*row.tolist())
    if g > 1:
        return row // g
    return row


def _lcm(values) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


class _Tableau:
    """Scaled-integer simplex tableau.  Last column is the right-hand side."""

    def __init__(self, A: list[list[Fraction]], b: list[Fraction]):
        m = len(A)
        n = len(A[0]) if m else 0
        self.m, self.n = m, n
        self.sign = [1] * m
        T = np.empty((m, n + m + 1), dtype=object)
        for i in range(m):
            row = list(A[i]) + [b[i]]
            if b[i] < 0:
                self.sign[i] = -1
                row = [-v for v in row]
            den = _lcm(v.denominator for v in row)
            ints = [int(v * den) for v in row]
            T[i, :n] = ints[:n]
            T[i, n:n + m] = 0
            T[i, n + i] = 1 * den
            T[i, -1] = ints[n]
            T[i] = _row_gcd_reduce(T[i])
        self.T = T
        self.basis = [n + i for i in range(m)]
        self.active = np.ones(m, dtype=bool)

    def reduced_costs(self, cost: list[Fraction]) -> list[Fraction]:
        """``c_j - c_B B^-1 A_j`` for every column, plus ``-c_B B^-1 b`` last."""
        width = self.T.shape[1]
        z = [Fraction(cost[j]) if j < len(cost) else Fraction(0) for j in range(width - 1)]
        z.append(Fraction(0))
        for i in range(self.m):
            if not self.active[i]:
                continue
            cb = cost[self.basis[i]] if self.basis[i] < len(cost) else 0
            if cb == 0:
                continue
            scale = Fraction(cb) / self.T[i, self.basis[i]]
            for j in np.nonzero(self.T[i])[0]:
                z[j] -= scale * self.T[i, j]
        return z

    def objective_row(self, cost: list[Fraction]) -> np.ndarray:
        z = self.reduced_costs(cost)
        den = _lcm(v.denominator for v in z)
        out = np.array([int(v * den) for v in z], dtype=object)
        return _row_gcd_reduce(out) if any(out) else out

    def pivot(self, obj: np.ndarray, p: int, j: int) -> np.ndarray:
        T = self.T
        piv = T[p, j]
        if piv < 0:
            T[p] = -T[p]
            piv = -piv
        prow = T[p]
        col = T[:, j]
        for i in np.nonzero(col)[0]:
            if i == p or not self.active[i]:
                continue
            T[i] = _row_gcd_reduce(T[i] * piv - col[i] * prow)
        if obj[j]:
            obj = _row_gcd_reduce(obj * piv - obj[j] * prow)
        self.basis[p] = j
        return obj

    def run(self, obj: np.ndarray, allowed: int) -> tuple[str, np.ndarray, int | None]:
        """Iterate Bland's rule on columns ``< allowed``; maximize."""
        T = self.T
        while True:
            enter = None
            for j in range(allowed):
                if obj[j] > 0:
                    enter = j
                    break
            if enter is None:
                return OPTIMAL, obj, None
            best = None
            leave = None
            for i in range(self.m):
                if not self.active[i]:
                    continue
                tij = T[i, enter]
                if tij > 0:
                    ratio = Fraction(T[i, -1], tij)
                    if (best is None or ratio < best
                            or (ratio == best and self.basis[i] < self.basis[leave])):
                        best, leave = ratio, i
            if leave is None:
                return UNBOUNDED, obj, enter
            obj = self.pivot(obj, leave, enter)

    def value(self, i: int) -> Fraction:
        return Fraction(self.T[i, -1], self.T[i, self.basis[i]])

    def primal(self, width: int) -> list[Fraction]:
        x = [Fraction(0)] * width
        for i in range(self.m):
            if self.active[i] and self.basis[i] < width:
                x[self.basis[i]] = self.value(i)
        return x


def _solve_square(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan on a nonsingular Fraction system."""
    k = len(M)
    aug = [list(M[i]) + [rhs[i]] for i in range(k)]
    for c in range(k):
        r = next(r for r in range(c, k) if aug[r][c] != 0)
        aug[c], aug[r] = aug[r], aug[c]
        pv = aug[c][c]
        aug[c] = [v / pv for v in aug[c]]
        for r2 in range(k):
            f = aug[r2][c]
            if r2 != c and f:
                aug[r2] = [a - f * b for a, b in zip(aug[r2], aug[c])]
    return [aug[i][k] for i in range(k)]


def _matvec_ok_eq(A, x, b) -> bool:
    return all(sum(a * v for a, v in zip(row, x) if a) == bi for row, bi in zip(A, b))


def verify_witness(lp: LinearProgram, w: Sequence) -> bool:
    """Exact check that ``w`` is feasible for ``lp``."""
    w = [Fraction(v) for v in w]
    if len(w) != lp.n_vars or any(v < 0 for v in w):
        return False
    if not _matvec_ok_eq(lp.A_eq, w, lp.b_eq):
        return False
    return all(sum(a * v for a, v in zip(row, w)) <= bi for row, bi in zip(lp.A_ub, lp.b_ub))


def verify_certificate(lp: LinearProgram, y: Sequence) -> bool:
    """Exact Farkas check on the standard form: ``y^T A <= 0`` and ``y^T b > 0``."""
    A, b, _ = lp.standard_form()
    y = [Fraction(v) for v in y]
    if len(y) != len(A):
        return False
    ncols = len(A[0]) if A else 0
    for j in range(ncols):
        if sum(y[i] * A[i][j] for i in range(len(A)) if A[i][j]) > 0:
            return False
    return sum(yi * bi for yi, bi in zip(y, b)) > 0


def verify_dual(lp: LinearProgram, y: Sequence, optimum) -> bool:
    """Exact optimality check: ``y^T A >= c`` and ``y^T b == optimum``."""
    A, b, c = lp.standard_form()
    y = [Fraction(v) for v in y]
    for j in range(len(c)):
        if sum(y[i] * A[i][j] for i in range(len(A)) if A[i][j]) < c[j]:
            return False
    return sum(yi * bi for yi, bi in zip(y, b)) == optimum


def solve(lp: LinearProgram) -> LPOutcome:
    """Solve ``lp`` exactly.

    Optimal outcomes carry a primal witness and a dual vector; infeasible
    ones carry a Farkas certificate; unbounded ones carry an improving ray.
    Every certificate is re-verified before it is returned.
    """
    A, b, c = lp.standard_form()
    n_orig = lp.n_vars
    n = len(c)
    m = len(A)
    if m == 0:
        if any(v > 0 for v in c):
            j = next(j for j, v in enumerate(c) if v > 0)
            ray = [Fraction(int(k == j)) for k in range(n)]
            return LPOutcome(UNBOUNDED, ray=tuple(ray[:n_orig]))
        return LPOutcome(OPTIMAL, Fraction(0), tuple([Fraction(0)] * n_orig), dual=())

    tab = _Tableau(A, b)
    # Phase 1: maximize -sum(artificials).
    cost1 = [Fraction(0)] * n + [Fraction(-1)] * m
    obj = tab.objective_row(cost1)
    _, obj, _ = tab.run(obj, n)
    phase1 = Fraction(0)
    for i in range(m):
        if tab.basis[i] >= n:
            phase1 -= tab.value(i)
    if phase1 < 0:
        # Reduced cost of artificial i is -1 - y_i where y = c_B B^-1, so
        # 1 + r_i = -y_i satisfies y^T A <= 0 and y^T b > 0.
        r = tab.reduced_costs(cost1)
        y = [1 + r[n + i] for i in range(m)]
        y = [s * v for s, v in zip(tab.sign, y)]
        cert = tuple(y)
        assert verify_certificate(lp, cert), "internal error: Farkas certificate failed"
        return LPOutcome(INFEASIBLE, certificate=cert)

    # Drive zero-level artificials out of the basis, dropping redundant rows.
    for i in range(m):
        if tab.basis[i] < n:
            continue
        row = tab.T[i, :n]
        nz = np.nonzero(row)[0]
        if len(nz) == 0:
            tab.active[i] = False
            continue
        obj = tab.pivot(obj, i, int(nz[0]))

    # Phase 2 on the original (plus slack) columns.
    obj = tab.objective_row(c)
    status, obj, enter = tab.run(obj, n)
    if status == UNBOUNDED:
        ray = [Fraction(0)] * n
        ray[enter] = Fraction(1)
        for i in range(m):
            if tab.active[i]:
                ray[tab.basis[i]] = -Fraction(tab.T[i, enter], tab.T[i, tab.basis[i]])
        return LPOutcome(UNBOUNDED, ray=tuple(ray[:n_orig]))

    x = tab.primal(n)
    optimum = sum(ci * xi for ci, xi in zip(c, x))
    rows = [i for i in range(m) if tab.active[i]]
    B = [[A[i][tab.basis[r]] * tab.sign[i] for i in rows] for r in rows]
    cb = [c[tab.basis[r]] for r in rows]
    y_active = _solve_square(B, cb)
    y = [Fraction(0)] * m
    for r, val in zip(rows, y_active):
        y[r] = val * tab.sign[r]
    witness = tuple(x[:n_orig])
    assert verify_witness(lp, witness), "internal error: witness failed"
    dual = tuple(y)
    assert verify_dual(lp, dual, optimum), "internal error: dual failed"
    return LPOutcome(OPTIMAL, optimum, witness, dual=dual)
