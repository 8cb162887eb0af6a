"""Correlation functionals on boxes.

Expectations use the +-1 convention: ``<xy> = p(a=b) - p(a!=b)``.  The
5-input functionals (KS fidelity, contextuality) use the pentagram edges
``{i, i+1 mod 5}`` and pentagon edges ``{i, i+2 mod 5}`` on 0-based inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .boxcore import BipartiteBox, BoxError, Probability

PENTAGRAM_EDGES = frozenset(frozenset((i, (i + 1) % 5)) for i in range(5))
PENTAGON_EDGES = frozenset(frozenset((i, (i + 2) % 5)) for i in range(5))


@dataclass(frozen=True)
class EdgeSets:
    pentagram: frozenset
    pentagon: frozenset

    def kind(self, x: int, y: int) -> str | None:
        e = frozenset((x, y))
        if e in self.pentagram:
            return "pentagram"
        if e in self.pentagon:
            return "pentagon"
        return None

    def ordered(self, which: str) -> list[tuple[int, int]]:
        edges = self.pentagram if which == "pentagram" else self.pentagon
        out = []
        for e in sorted(tuple(sorted(e)) for e in edges):
            out.extend([e, e[::-1]])
        return out


EDGES = EdgeSets(PENTAGRAM_EDGES, PENTAGON_EDGES)


@dataclass(frozen=True)
class ChshSelection:
    """Ordered input pairs ``x = (x, x')`` and ``y = (y, y')``."""

    x: tuple[int, int]
    y: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "y", tuple(self.y))
        if len(self.x) != 2 or len(self.y) != 2:
            raise BoxError("selection needs two inputs per side")
        if self.x[0] == self.x[1] or self.y[0] == self.y[1]:
            raise BoxError(f"selection {self} repeats an input")

    def check(self, box: BipartiteBox) -> None:
        if not all(0 <= v < box.n_a for v in self.x) or not all(0 <= v < box.n_b for v in self.y):
            raise BoxError(f"selection {self} out of range for a {box.n_a}x{box.n_b} box")


# position of the minus sign: (i, j) means the term <x_i y_j> is subtracted
MINUS_POSITIONS = ((1, 1), (1, 0), (0, 1), (0, 0))


@dataclass(frozen=True)
class ChshVariant:
    minus: tuple[int, int] = (1, 1)
    sign: int = 1


@dataclass(frozen=True)
class ChshResult:
    value: Probability
    selection: ChshSelection
    variant: ChshVariant


def expectation(box: BipartiteBox, x: int, y: int):
    c = box.cells[x, y]
    return (c[0, 0] + c[1, 1]) - (c[0, 1] + c[1, 0])


def chsh(box: BipartiteBox, sel: ChshSelection, variant: ChshVariant = ChshVariant()):
    """``<xy> + <xy'> + <x'y> - <x'y'>`` with the minus moved per ``variant``."""
    sel.check(box)
    total = 0
    for i in (0, 1):
        for j in (0, 1):
            e = expectation(box, sel.x[i], sel.y[j])
            total = total - e if (i, j) == variant.minus else total + e
    return variant.sign * total


def chsh_max(box: BipartiteBox) -> ChshResult:
    """Exhaustive maximum over ordered selections and the 8 sign variants.

    Ties resolve to the first maximizer in (selection, variant) order.
    """
    if box.n_a < 2 or box.n_b < 2:
        raise BoxError("CHSH needs at least two inputs per side")
    E = [[expectation(box, x, y) for y in range(box.n_b)] for x in range(box.n_a)]
    best = None
    for xs in permutations(range(box.n_a), 2):
        for ys in permutations(range(box.n_b), 2):
            terms = [[E[xs[i]][ys[j]] for j in (0, 1)] for i in (0, 1)]
            plain = terms[0][0] + terms[0][1] + terms[1][0] + terms[1][1]
            for minus in MINUS_POSITIONS:
                core = plain - 2 * terms[minus[0]][minus[1]]
                for sign in (1, -1):
                    v = sign * core
                    if best is None or v > best[0]:
                        best = (v, xs, ys, minus, sign)
    v, xs, ys, minus, sign = best
    return ChshResult(v, ChshSelection(xs, ys), ChshVariant(minus, sign))


def pr_success_from_chsh(K) -> Probability:
    """Probability of winning the PR game given CHSH value ``K``."""
    if K < -4 or K > 4:
        raise BoxError(f"CHSH value {K} outside [-4, 4]")
    if isinstance(K, (int, Fraction)):
        return Fraction(K) / 8 + Fraction(1, 2)
    return K / 8 + 0.5


def _require_5x5(box: BipartiteBox):
    if box.shape != (5, 5):
        raise BoxError(f"needs a 5x5 box, got {box.n_a}x{box.n_b}")


def _agree(box, x, y):
    c = box.cells[x, y]
    return c[0, 0] + c[1, 1]


def _not_both_one(box, x, y):
    return 1 - box.cells[x, y][1, 1]


def _scale(box, num, den):
    return Fraction(num, den) if box.exact else num / den


def ks_fidelity(box: BipartiteBox) -> Probability:
    """Success rate of the KS constraints for uniformly random 5x5 inputs."""
    _require_5x5(box)
    total = 0
    for x in range(5):
        for y in range(5):
            total += _agree(box, x, y) if x == y else _not_both_one(box, x, y)
    return total * _scale(box, 1, 25)


def klyachko_sum(probs: Sequence) -> Probability:
    if len(probs) != 5:
        raise BoxError("need five probabilities")
    if any(p < 0 or p > 1 for p in probs):
        raise BoxError("entries must lie in [0, 1]")
    return sum(probs)


@dataclass(frozen=True)
class Contextuality:
    Z: Probability
    K: Probability

    def __iter__(self):
        return iter((self.Z, self.K))


def orthogonality_sums(box: BipartiteBox) -> tuple:
    """``sum p(a.b=0)`` over the ordered pentagram and pentagon pairs (10 each)."""
    _require_5x5(box)
    gram = sum(_not_both_one(box, x, y) for x, y in EDGES.ordered("pentagram"))
    gon = sum(_not_both_one(box, x, y) for x, y in EDGES.ordered("pentagon"))
    return gram, gon


def contextuality(box: BipartiteBox) -> Contextuality:
    """Imbalance ``Z`` between the two edge classes and ``K = diag - Z``."""
    gram, gon = orthogonality_sums(box)
    Z = abs(gram - gon)
    diag = sum(_agree(box, x, x) for x in range(5))
    return Contextuality(Z, diag - Z)
