"""Simulating a PR box with a KS box.

Each PR input is mapped to a KS input on each side.  A shared fair bit
flips both outputs on half the rounds, which makes every marginal 1/2
without touching whether the outputs agree; Bob can additionally
complement every output.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .boxcore import BipartiteBox, BoxError


@dataclass(frozen=True)
class PrSimStrategy:
    input_map_a: tuple[int, int] = (1, 0)
    input_map_b: tuple[int, int] = (2, 0)
    synchronized_flip: bool = True
    bob_flip: bool = True
    alice_flip: bool = False


def default_strategy() -> PrSimStrategy:
    """Alice: PR 0 -> KS 2, PR 1 -> KS 1; Bob: PR 0 -> KS 3, PR 1 -> KS 1 (1-based)."""
    return PrSimStrategy()


def induced_pr_box(ks: BipartiteBox, s: PrSimStrategy) -> BipartiteBox:
    if not all(0 <= v < ks.n_a for v in s.input_map_a) or not all(0 <= v < ks.n_b for v in s.input_map_b):
        raise BoxError(f"input map out of range for a {ks.n_a}x{ks.n_b} box")
    half = Fraction(1, 2) if ks.exact else 0.5
    cells = np.empty((2, 2, 2, 2), dtype=object)
    for X in (0, 1):
        for Y in (0, 1):
            c = ks.cells[s.input_map_a[X], s.input_map_b[Y]]
            if s.synchronized_flip:
                c = half * (c + c[::-1, ::-1])
            if s.alice_flip:
                c = c[::-1, :]
            if s.bob_flip:
                c = c[:, ::-1]
            cells[X, Y] = c
    return BipartiteBox(cells)


def pr_sim_success(box: BipartiteBox):
    """Win rate of ``a XOR b = x AND y`` for uniform inputs."""
    if box.shape != (2, 2):
        raise BoxError("needs a 2x2-input box")
    total = 0
    for x, y in product((0, 1), repeat=2):
        c = box.cells[x, y]
        total += (c[0, 1] + c[1, 0]) if (x & y) else (c[0, 0] + c[1, 1])
    return total / 4


def search_strategies(ks: BipartiteBox) -> tuple[object, PrSimStrategy]:
    """Best success over every input mapping and flip convention."""
    best = None
    rng_a = list(product(range(ks.n_a), repeat=2))
    rng_b = list(product(range(ks.n_b), repeat=2))
    for ma, mb in product(rng_a, rng_b):
        for sync, af, bf in product((False, True), repeat=3):
            s = PrSimStrategy(ma, mb, sync, bf, af)
            v = pr_sim_success(induced_pr_box(ks, s))
            if best is None or v > best[0]:
                best = (v, s)
    return best
