"""Operational strategies under the two-party isolation contract.

A strategy supplies ``alice(inputs, shared)`` and ``bob(inputs, shared)``.
Each party function sees only its own block of inputs and the
:class:`Shared` object, which is built before any input is drawn.  Shared
randomness is plain arrays; nonlocal resources (entangled pairs, a box)
expose a single ``measure``/``use`` call per side and keep their internal
state private.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..boxcore import BipartiteBox, BoxError, check_no_signaling
from ..charts import CHARTS, ChartMixture, chart_mixture_box
from ..prsim import PrSimStrategy, induced_pr_box
from ..quantum import StrategySpec, entangled_strategy_box
from . import kernels
from .rng import stream

KS_GAME = "ks"
PR_GAME = "pr"


@dataclass
class Shared:
    """Everything both parties agreed on or hold jointly for one block of rounds."""

    values: dict = field(default_factory=dict)
    resource: object = None


class _TwoEnded:
    """Sequential simulation of a two-ended resource.

    Whichever side acts first gets a sample from its marginal; the second
    side is sampled conditionally on what the first end recorded.
    """

    def __init__(self, seed: int, block: int, size: int):
        self._size = size
        self._u = {
            "A": stream(seed, "party-a", block).random(size),
            "B": stream(seed, "party-b", block).random(size),
        }
        self._first = None

    def _use(self, side: str, settings: np.ndarray) -> np.ndarray:
        if side not in ("A", "B"):
            raise ValueError(f"unknown side {side!r}")
        settings = np.asarray(settings, dtype=np.int64)
        if settings.shape != (self._size,):
            raise ValueError("one setting per round is required")
        if self._first is None:
            out = kernels.threshold1(self._first_table(side), settings, self._u[side])
            self._first = (side, settings, out.astype(np.int64))
            return out
        first_side, i, o = self._first
        if first_side == side:
            raise RuntimeError(f"side {side} already used this resource")
        return kernels.threshold3(self._second_table(first_side), i, o, settings, self._u[side])


class EntangledPairs(_TwoEnded):
    """Copies of the maximally entangled state in ``R^m (x) R^m``.

    ``settings`` index the projector table declared at construction.
    """

    def __init__(self, vectors: np.ndarray, m: int, seed: int, block: int, size: int):
        super().__init__(seed, block, size)
        g = np.asarray(vectors) @ np.asarray(vectors).T
        g = np.clip(g * g, 0.0, 1.0)
        n = len(vectors)
        self._p1 = np.full(n, 1.0 / m)
        second = np.empty((n, 2, n))
        second[:, 1, :] = g
        second[:, 0, :] = (1.0 - g) / (m - 1) if m > 1 else 0.0
        self._second = second

    def _first_table(self, side):
        return self._p1

    def _second_table(self, first_side):
        return self._second

    def measure(self, side: str, settings) -> np.ndarray:
        return self._use(side, settings)


class BoxResource(_TwoEnded):
    """A no-signaling box used as a communication-free channel."""

    def __init__(self, box: BipartiteBox, seed: int, block: int, size: int):
        super().__init__(seed, block, size)
        if not check_no_signaling(box).passed:
            raise BoxError("only no-signaling boxes can be used as a resource")
        p = box.as_float()
        pa = p[:, 0, :, :].sum(axis=2)  # p(a|x), read at y = 0
        pb = p[0, :, :, :].sum(axis=1)  # p(b|y), read at x = 0
        with np.errstate(invalid="ignore", divide="ignore"):
            cond_b = np.where(pa[:, None, :] > 0, p[:, :, :, 1] / pa[:, None, :], 0.0)  # [x, y, a]
            cond_a = np.where(pb[None, :, :] > 0, p[:, :, 1, :] / pb[None, :, :], 0.0)  # [x, y, b]
        self._tables = {
            "A": pa[:, 1],
            "B": pb[:, 1],
        }
        self._seconds = {
            "A": np.transpose(cond_b, (0, 2, 1)).copy(),  # [x, a, y]
            "B": np.transpose(cond_a, (1, 2, 0)).copy(),  # [y, b, x]
        }
        # exact zeros/ones stay exact so impossible outcomes never occur
        for t in list(self._tables.values()) + list(self._seconds.values()):
            np.clip(t, 0.0, 1.0, out=t)

    def _first_table(self, side):
        return self._tables[side]

    def _second_table(self, first_side):
        return self._seconds[first_side]

    def use(self, side: str, inputs) -> np.ndarray:
        return self._use(side, inputs)


class Strategy:
    name = "strategy"
    game = KS_GAME
    target: BipartiteBox

    def share(self, seed: int, block: int, size: int) -> Shared:
        return Shared()

    def alice(self, inputs, shared):
        raise NotImplementedError

    def bob(self, inputs, shared):
        raise NotImplementedError


class ChartStrategy(Strategy):
    """Both parties read their output off a shared random chart."""

    name = "charts"

    def __init__(self, mixture: ChartMixture):
        self.mixture = mixture
        self.target = chart_mixture_box(mixture)
        self._bits = np.array([c.bits for c in CHARTS], dtype=np.int8)
        w = np.array([float(v) for v in mixture.weights])
        cum = np.cumsum(w)
        # trailing zero-weight charts must be unreachable
        last = int(np.nonzero(w)[0][-1])
        cum[last:] = 1.0
        self._cum = cum

    def share(self, seed, block, size):
        u = stream(seed, "shared", block).random(size)
        return Shared({"chart": kernels.categorical(self._cum, u)})

    def alice(self, inputs, shared):
        return kernels.chart_lookup(self._bits, shared.values["chart"], inputs)

    def bob(self, inputs, shared):
        return kernels.chart_lookup(self._bits, shared.values["chart"], inputs)


class QuantumStrategy(Strategy):
    """Measure the projector for your input on your half of an entangled pair."""

    name = "quantum"

    def __init__(self, spec: StrategySpec):
        self.spec = spec
        self.target = entangled_strategy_box(spec)

    def share(self, seed, block, size):
        return Shared(resource=EntangledPairs(self.spec.vectors, self.spec.m, seed, block, size))

    def alice(self, inputs, shared):
        return shared.resource.measure("A", inputs)

    def bob(self, inputs, shared):
        return shared.resource.measure("B", inputs)


class PrSimulation(Strategy):
    """PR-box simulation through a KS box with a shared flip bit."""

    name = "prsim"
    game = PR_GAME

    def __init__(self, ks: BipartiteBox, plan: PrSimStrategy):
        self.ks = ks
        self.plan = plan
        self.target = induced_pr_box(ks, plan)
        self._map_a = np.array(plan.input_map_a, dtype=np.int64)
        self._map_b = np.array(plan.input_map_b, dtype=np.int64)

    def share(self, seed, block, size):
        flip = stream(seed, "shared-flip", block).integers(0, 2, size, dtype=np.int8)
        if not self.plan.synchronized_flip:
            flip[:] = 0
        return Shared({"flip": flip}, BoxResource(self.ks, seed, block, size))

    def alice(self, inputs, shared):
        a = shared.resource.use("A", self._map_a[inputs]) ^ shared.values["flip"]
        return a ^ np.int8(self.plan.alice_flip)

    def bob(self, inputs, shared):
        b = shared.resource.use("B", self._map_b[inputs]) ^ shared.values["flip"]
        return b ^ np.int8(self.plan.bob_flip)


def strategy_from(obj, ks: BipartiteBox | None = None) -> Strategy:
    if isinstance(obj, Strategy):
        return obj
    if isinstance(obj, ChartMixture):
        return ChartStrategy(obj)
    if isinstance(obj, StrategySpec):
        return QuantumStrategy(obj)
    if isinstance(obj, PrSimStrategy):
        from ..boxcore import make_ks_box
        return PrSimulation(ks if ks is not None else make_ks_box(5, Fraction(1, 3)), obj)
    raise TypeError(f"no strategy for {type(obj).__name__}")
