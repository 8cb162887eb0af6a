from fractions import Fraction as F

import pytest

from nlbox.boxcore import BoxError, make_ks_box
from nlbox.charts import (
    C0,
    C1,
    C2_PENTAGON_OK,
    C2_PENTAGRAM_OK,
    CHARTS,
    PENTAGON_ADMISSIBLE,
    PENTAGRAM_ADMISSIBLE,
    Chart,
    ChartMixture,
    chart_mixture_box,
    chart_success,
    edge_failures,
    m1_mixture,
    m2_mixture,
    mixture_marginals,
    mixture_success,
)
from nlbox.correlations import contextuality, ks_fidelity


def test_chart_enumeration():
    assert len(CHARTS) == 32 and len(set(CHARTS)) == 32
    assert CHARTS[0].key == "00000" and CHARTS[-1].key == "11111"
    assert len(C0) == 1 and len(C1) == 5
    assert {c.key for c in C2_PENTAGRAM_OK} == {"10100", "01010", "00101", "10010", "01001"}
    assert len(C2_PENTAGON_OK) == 5
    assert len(PENTAGRAM_ADMISSIBLE) == len(PENTAGON_ADMISSIBLE) == 11


def test_chart_helpers():
    c = Chart.from_ones([0, 2])
    assert c.key == "10100" and Chart.from_key("10100") == c
    assert c.classify().pentagram_ok and not c.classify().pentagon_ok
    assert edge_failures(c) == (0, 2)
    with pytest.raises(BoxError):
        Chart((1, 0))


def test_chart_success_formula():
    for c in CHARTS:
        box = chart_mixture_box(ChartMixture.point(c))
        assert ks_fidelity(box) == chart_success(c)


def test_m1_m2():
    assert mixture_success(m1_mixture()) == F(71, 75)
    assert mixture_success(m2_mixture()) == F(14, 15)
    assert mixture_marginals(m1_mixture()) == [F(1, 3)] * 5
    assert mixture_marginals(m2_mixture()) == [F(1, 3)] * 5
    assert ks_fidelity(chart_mixture_box(m1_mixture())) == F(71, 75)
    assert tuple(contextuality(chart_mixture_box(m1_mixture()))) == (F(4, 3), F(11, 3))


def test_uniform_c1_is_ks():
    assert chart_mixture_box(ChartMixture.uniform(C1)) == make_ks_box(5, F(1, 5))


def test_mixture_validation_and_round_trip():
    with pytest.raises(BoxError):
        ChartMixture((F(1, 2),) * 32)
    with pytest.raises(BoxError):
        ChartMixture.from_weights({CHARTS[0]: F(3, 2), CHARTS[1]: F(-1, 2)})
    m = m1_mixture()
    assert m.to_dict()["10000"] == "1/15"
    assert ChartMixture.from_dict(m.to_dict()) == m
