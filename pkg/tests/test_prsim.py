from fractions import Fraction as F

import pytest

from nlbox.boxcore import BoxError, make_ks_box, marginal
from nlbox.prsim import PrSimStrategy, induced_pr_box, default_strategy, pr_sim_success, search_strategies
from nlbox.boxcore import make_pr_box


def test_pr_box_wins_always():
    assert pr_sim_success(make_pr_box()) == 1


def test_default_strategy():
    ks = make_ks_box(5, F(1, 3))
    pr = induced_pr_box(ks, default_strategy())
    assert pr_sim_success(pr) == F(3, 4)
    assert pr.cells[0, 0].tolist() == [[F(1, 3), F(1, 6)], [F(1, 6), F(1, 3)]]
    assert pr.cells[1, 1].tolist() == [[0, F(1, 2)], [F(1, 2), 0]]
    for side in "AB":
        for i in (0, 1):
            for j in (0, 1):
                assert marginal(pr, side, 1, i, j) == F(1, 2)


def test_without_flip_marginals_are_biased():
    ks = make_ks_box(5, F(1, 3))
    s = PrSimStrategy(synchronized_flip=False)
    pr = induced_pr_box(ks, s)
    assert marginal(pr, "A", 1, 0, 0) == F(1, 3)
    assert pr_sim_success(pr) == F(3, 4)


def test_search():
    best, s = search_strategies(make_ks_box(5, F(1, 3)))
    assert best == F(3, 4)
    best, _ = search_strategies(make_ks_box(5, F(1, 2)))
    assert best == 1


def test_errors():
    with pytest.raises(BoxError):
        induced_pr_box(make_ks_box(2, F(1, 3)), default_strategy())
    with pytest.raises(BoxError):
        pr_sim_success(make_ks_box(5, F(1, 3)))
