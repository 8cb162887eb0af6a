from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from nlbox import ratlp
from nlbox.ratlp import LinearProgram, solve


def _gauss(M, rhs):
    """Exact solve of a square system, None when singular."""
    n = len(M)
    aug = [list(r) + [v] for r, v in zip(M, rhs)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            return None
        aug[c], aug[piv] = aug[piv], aug[c]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c] / aug[c][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
    return [aug[i][n] / aug[i][i] for i in range(n)]


def brute_force_max(c, A, b):
    """Best vertex of {x >= 0, A x <= b} by trying every active set."""
    n = len(c)
    rows = [(list(r), bi) for r, bi in zip(A, b)]
    rows += [([F(-int(i == j)) for j in range(n)], F(0)) for i in range(n)]
    best = None
    for active in combinations(rows, n):
        x = _gauss([r for r, _ in active], [bi for _, bi in active])
        if x is None:
            continue
        if all(sum(a * v for a, v in zip(r, x)) <= bi for r, bi in rows):
            val = sum(ci * xi for ci, xi in zip(c, x))
            best = val if best is None else max(best, val)
    return best


small = st.integers(-4, 4).map(F)


@settings(max_examples=150, deadline=None)
@given(
    n=st.integers(1, 3),
    data=st.data(),
)
def test_matches_vertex_enumeration(n, data):
    m = data.draw(st.integers(1, 3))
    c = data.draw(st.lists(small, min_size=n, max_size=n))
    A = [data.draw(st.lists(small, min_size=n, max_size=n)) for _ in range(m)]
    b = data.draw(st.lists(st.integers(-3, 6).map(F), min_size=m, max_size=m))
    # a bounding row keeps the region a polytope
    A.append([F(1)] * n)
    b.append(F(10))
    lp = LinearProgram(c, A_ub=A, b_ub=b)
    out = solve(lp)
    expected = brute_force_max(c, A, b)
    if expected is None:
        assert out.status == ratlp.INFEASIBLE
        assert ratlp.verify_certificate(lp, out.certificate)
    else:
        assert out.status == ratlp.OPTIMAL
        assert out.optimum == expected
        assert ratlp.verify_witness(lp, out.witness)
        assert ratlp.verify_dual(lp, out.dual, out.optimum)


def test_equality_problem():
    # max x + 2y, x + y = 1, x - y <= 1/2
    lp = LinearProgram([1, 2], A_eq=[[1, 1]], b_eq=[1], A_ub=[[1, -1]], b_ub=[F(1, 2)])
    out = solve(lp)
    assert out.status == ratlp.OPTIMAL
    assert out.optimum == 2
    assert out.witness == (0, 1)


def test_infeasible_equalities_give_certificate():
    lp = LinearProgram([0, 0], A_eq=[[1, 1], [1, 1]], b_eq=[1, 2])
    out = solve(lp)
    assert out.status == ratlp.INFEASIBLE
    assert not out.feasible
    assert ratlp.verify_certificate(lp, out.certificate)


def test_unbounded_ray():
    lp = LinearProgram([1, 0], A_ub=[[1, -1]], b_ub=[1])
    out = solve(lp)
    assert out.status == ratlp.UNBOUNDED
    ray = out.ray
    assert ray[0] > 0
    assert ray[0] - ray[1] <= 0 and all(v >= 0 for v in ray)


def test_beale_cycling_example_terminates():
    # cycles under the textbook largest-coefficient rule
    c = [F(3, 4), -20, F(1, 2), -6]
    A = [[F(1, 4), -8, -1, 9], [F(1, 2), -12, F(-1, 2), 3], [0, 0, 1, 0]]
    out = solve(LinearProgram(c, A_ub=A, b_ub=[0, 0, 1]))
    assert out.optimum == F(5, 4)
    assert out.witness == (1, 0, 1, 0)


def test_redundant_rows_are_tolerated():
    lp = LinearProgram([1, 1, 1], A_eq=[[1, 1, 1], [2, 2, 2], [1, 0, 0]], b_eq=[1, 2, F(1, 3)])
    out = solve(lp)
    assert out.optimum == 1
    assert out.witness[0] == F(1, 3)
    assert ratlp.verify_dual(lp, out.dual, out.optimum)


def test_no_constraints():
    assert solve(LinearProgram([-1, 0])).optimum == 0
    assert solve(LinearProgram([0, 1])).status == ratlp.UNBOUNDED


def test_shape_errors():
    with pytest.raises(ratlp.LPError):
        LinearProgram([1, 1], A_eq=[[1]], b_eq=[1])
    with pytest.raises(ratlp.LPError):
        LinearProgram([1], A_ub=[[1]], b_ub=[1, 2])


def test_verifiers_reject_bad_vectors():
    lp = LinearProgram([1], A_ub=[[1]], b_ub=[1])
    assert not ratlp.verify_witness(lp, [2])
    assert not ratlp.verify_witness(lp, [-1])
    assert not ratlp.verify_certificate(lp, [1])
    assert not ratlp.verify_dual(lp, [0], 1)
    assert ratlp.verify_dual(lp, [1], 1)
