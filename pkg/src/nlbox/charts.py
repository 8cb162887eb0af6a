"""Charts: noncontextual 0/1 assignments to the five KS inputs.

A chart is a shared hidden variable: both parties read their output off
the same chart, which forces perfect agreement on equal inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .boxcore import BipartiteBox, BoxError, as_probability, format_probability
from .correlations import EDGES, PENTAGON_EDGES, PENTAGRAM_EDGES


@dataclass(frozen=True)
class ChartClass:
    ones_count: int
    pentagram_ok: bool
    pentagon_ok: bool


@dataclass(frozen=True, order=True)
class Chart:
    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if len(bits) != 5 or any(b not in (0, 1) for b in bits):
            raise BoxError(f"a chart needs exactly five bits, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_key(cls, key: str) -> "Chart":
        return cls(tuple(int(c) for c in key))

    @classmethod
    def from_ones(cls, ones: Iterable[int]) -> "Chart":
        """Chart with 1s at the given 0-based inputs."""
        s = set(ones)
        return cls(tuple(int(i in s) for i in range(5)))

    @property
    def key(self) -> str:
        return "".join(map(str, self.bits))

    @property
    def ones(self) -> frozenset:
        return frozenset(i for i, b in enumerate(self.bits) if b)

    def classify(self) -> ChartClass:
        ones = self.ones
        return ChartClass(
            ones_count=len(ones),
            pentagram_ok=not any(e <= ones for e in PENTAGRAM_EDGES),
            pentagon_ok=not any(e <= ones for e in PENTAGON_EDGES),
        )


def enumerate_charts() -> list[Chart]:
    """All 32 charts, ordered by their bit string."""
    return [Chart(bits) for bits in product((0, 1), repeat=5)]


CHARTS = tuple(enumerate_charts())
CHART_INDEX = {c: i for i, c in enumerate(CHARTS)}


def charts_where(pred) -> list[Chart]:
    return [c for c in CHARTS if pred(c.classify())]


C0 = charts_where(lambda k: k.ones_count == 0)
C1 = charts_where(lambda k: k.ones_count == 1)
C2_PENTAGRAM_OK = charts_where(lambda k: k.ones_count == 2 and k.pentagram_ok)
C2_PENTAGON_OK = charts_where(lambda k: k.ones_count == 2 and k.pentagon_ok)
PENTAGRAM_ADMISSIBLE = charts_where(lambda k: k.pentagram_ok)
PENTAGON_ADMISSIBLE = charts_where(lambda k: k.pentagon_ok)


@dataclass(frozen=True, eq=False)
class ChartMixture:
    """Probability weights over the 32 charts, in ``CHARTS`` order."""

    weights: tuple

    def __post_init__(self):
        ws = tuple(as_probability(w) for w in self.weights)
        if len(ws) != len(CHARTS):
            raise BoxError(f"need {len(CHARTS)} weights, got {len(ws)}")
        if any(w < 0 for w in ws):
            raise BoxError("negative chart weight")
        total = sum(ws)
        exact = all(isinstance(w, Fraction) for w in ws)
        if (exact and total != 1) or (not exact and abs(total - 1) > 1e-12):
            raise BoxError(f"chart weights sum to {total}")
        object.__setattr__(self, "weights", ws)

    @classmethod
    def from_weights(cls, weights: Mapping[Chart, object]) -> "ChartMixture":
        ws = [Fraction(0)] * len(CHARTS)
        for chart, w in weights.items():
            ws[CHART_INDEX[chart]] += as_probability(w)
        return cls(tuple(ws))

    @classmethod
    def uniform(cls, charts: Sequence[Chart]) -> "ChartMixture":
        w = Fraction(1, len(charts))
        return cls.from_weights({c: w for c in charts})

    @classmethod
    def point(cls, chart: Chart) -> "ChartMixture":
        return cls.from_weights({chart: 1})

    @classmethod
    def combine(cls, parts: Sequence[tuple[object, "ChartMixture"]]) -> "ChartMixture":
        """Convex combination ``sum alpha_k m_k``."""
        ws = [Fraction(0)] * len(CHARTS)
        for alpha, m in parts:
            alpha = as_probability(alpha)
            for i, w in enumerate(m.weights):
                ws[i] = ws[i] + alpha * w
        return cls(tuple(ws))

    def support(self) -> dict[Chart, object]:
        return {c: w for c, w in zip(CHARTS, self.weights) if w}

    def __eq__(self, other):
        if not isinstance(other, ChartMixture):
            return NotImplemented
        return self.weights == other.weights

    __hash__ = None

    def to_dict(self) -> dict[str, str]:
        return {c.key: format_probability(w) for c, w in self.support().items()}

    @classmethod
    def from_dict(cls, doc: Mapping[str, object]) -> "ChartMixture":
        return cls.from_weights({Chart.from_key(k): v for k, v in doc.items()})

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def m1_mixture() -> ChartMixture:
    """2/3 rotation-uniform pentagram-ok C2, 1/3 uniform C1."""
    return ChartMixture.combine([
        (Fraction(2, 3), ChartMixture.uniform(C2_PENTAGRAM_OK)),
        (Fraction(1, 3), ChartMixture.uniform(C1)),
    ])


def m2_mixture() -> ChartMixture:
    """5/6 rotation-uniform pentagram-ok C2, 1/6 the all-zero chart."""
    return ChartMixture.combine([
        (Fraction(5, 6), ChartMixture.uniform(C2_PENTAGRAM_OK)),
        (Fraction(1, 6), ChartMixture.uniform(C0)),
    ])


def mixture_marginals(m: ChartMixture) -> list:
    """Per-input probability that the chart assigns 1."""
    return [sum(w for c, w in zip(CHARTS, m.weights) if c.bits[i]) for i in range(5)]


def chart_mixture_box(m: ChartMixture) -> BipartiteBox:
    cells = np.empty((5, 5, 2, 2), dtype=object)
    zero = Fraction(0)
    cells.fill(zero)
    for c, w in zip(CHARTS, m.weights):
        if not w:
            continue
        for x in range(5):
            for y in range(5):
                cells[x, y, c.bits[x], c.bits[y]] += w
    return BipartiteBox(cells)


def chart_success(chart: Chart) -> Fraction:
    """KS success rate of a single chart over uniform 5x5 inputs.

    The diagonal always agrees; an ordered off-diagonal pair fails iff both
    of its inputs carry a 1.
    """
    k = len(chart.ones)
    return Fraction(25 - k * (k - 1), 25)


def mixture_success(m: ChartMixture):
    return sum(w * chart_success(c) for c, w in zip(CHARTS, m.weights) if w)


def edge_failures(chart: Chart) -> tuple[int, int]:
    """Ordered pentagram and pentagon pairs on which the chart outputs 11."""
    ones = chart.ones
    gram = sum(1 for x, y in EDGES.ordered("pentagram") if x in ones and y in ones)
    gon = sum(1 for x, y in EDGES.ordered("pentagon") if x in ones and y in ones)
    return gram, gon
