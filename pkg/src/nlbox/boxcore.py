"""Bipartite boxes with binary outputs.

A box is the full table ``p(a, b | x, y)`` stored as an array of shape
``(n_a, n_b, 2, 2)``.  Entries are ``Fraction`` when the box comes from
rational parameters and ``float`` when it involves irrational numbers
(quantum strategies, the Tsirelson marginal).  Inputs are 0-based here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Iterable, Sequence, Union

import numpy as np

Probability = Union[Fraction, float]

#: tolerance used for float-backed boxes when the caller gives none
REAL_TOL = 1e-12

SIDES = ("A", "B")


class BoxError(ValueError):
    """Invalid box construction or operation."""


def as_probability(value) -> Probability:
    """Coerce ints, Fractions and ``"num/den"`` strings to Fraction; floats stay floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise BoxError("booleans are not probabilities")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        if "/" in value or value.lstrip("-").isdigit():
            return Fraction(value)
        return float(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, Real):
        return float(value)
    raise BoxError(f"cannot interpret {value!r} as a probability")


def _is_exact(v) -> bool:
    return isinstance(v, Fraction)


@dataclass(frozen=True, eq=False)
class BipartiteBox:
    """Joint conditional distribution over binary outputs."""

    cells: np.ndarray
    exact: bool = field(init=False)

    def __post_init__(self):
        arr = np.empty(np.shape(self.cells), dtype=object)
        src = np.asarray(self.cells, dtype=object)
        if src.ndim != 4 or src.shape[2:] != (2, 2) or src.shape[0] < 1 or src.shape[1] < 1:
            raise BoxError(f"cells must have shape (n_a, n_b, 2, 2), got {src.shape}")
        for idx in np.ndindex(src.shape):
            arr[idx] = as_probability(src[idx])
        exact = all(_is_exact(v) for v in arr.flat)
        if not exact:
            arr = np.vectorize(float, otypes=[object])(arr)
        for x in range(arr.shape[0]):
            for y in range(arr.shape[1]):
                cell = arr[x, y]
                total = cell.sum()
                if exact:
                    if total != 1 or any(v < 0 for v in cell.flat):
                        raise BoxError(f"cell ({x},{y}) is not a distribution: {cell.tolist()}")
                else:
                    if abs(total - 1) > REAL_TOL or any(v < -REAL_TOL for v in cell.flat):
                        raise BoxError(f"cell ({x},{y}) is not a distribution: {cell.tolist()}")
        arr.flags.writeable = False
        object.__setattr__(self, "cells", arr)
        object.__setattr__(self, "exact", exact)

    @property
    def n_a(self) -> int:
        return self.cells.shape[0]

    @property
    def n_b(self) -> int:
        return self.cells.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_a, self.n_b

    def __getitem__(self, key):
        return self.cells[key]

    def cell(self, x: int, y: int) -> np.ndarray:
        return self.cells[x, y]

    def as_float(self) -> np.ndarray:
        return np.array(self.cells.tolist(), dtype=float)

    def equals(self, other: "BipartiteBox", tol: float | None = None) -> bool:
        """Cell-wise equality; exact unless either side is float-backed."""
        if self.shape != other.shape:
            return False
        if tol is None:
            tol = 0 if (self.exact and other.exact) else REAL_TOL
        if tol == 0:
            return all(a == b for a, b in zip(self.cells.flat, other.cells.flat))
        return bool(np.all(np.abs(self.as_float() - other.as_float()) <= tol))

    def __eq__(self, other):
        if not isinstance(other, BipartiteBox):
            return NotImplemented
        return self.equals(other, tol=0)

    __hash__ = None

    def __repr__(self):
        kind = "exact" if self.exact else "real"
        return f"BipartiteBox({self.n_a}x{self.n_b}, {kind})"


@dataclass(frozen=True)
class DeterministicAssignment:
    """Each party's output as a function of its own input."""

    f_a: tuple
    f_b: tuple

    def __post_init__(self):
        object.__setattr__(self, "f_a", tuple(int(v) for v in self.f_a))
        object.__setattr__(self, "f_b", tuple(int(v) for v in self.f_b))
        if any(v not in (0, 1) for v in self.f_a + self.f_b):
            raise BoxError("assignment outputs must be bits")

    @classmethod
    def constant(cls, a: int, b: int, n_a: int, n_b: int) -> "DeterministicAssignment":
        return cls((a,) * n_a, (b,) * n_b)

    def key(self) -> str:
        return "".join(map(str, self.f_a)) + "|" + "".join(map(str, self.f_b))


def _box_from_function(n_a: int, n_b: int, fn) -> BipartiteBox:
    cells = np.empty((n_a, n_b, 2, 2), dtype=object)
    for x in range(n_a):
        for y in range(n_b):
            for a in (0, 1):
                for b in (0, 1):
                    cells[x, y, a, b] = fn(x, y, a, b)
    return BipartiteBox(cells)


def make_pr_box() -> BipartiteBox:
    """The 2-input box with ``a XOR b = x AND y`` and uniform marginals."""
    half = Fraction(1, 2)
    return _box_from_function(2, 2, lambda x, y, a, b: half if (a ^ b) == (x & y) else Fraction(0))


def make_ks_box(n: int, p) -> BipartiteBox:
    """KS_p-box: equal inputs give equal outputs, distinct inputs never give 11."""
    p = as_probability(p)
    if n < 1:
        raise BoxError("n must be positive")
    if p < 0 or p > Fraction(1, 2):
        raise BoxError(f"marginal p={p} outside [0, 1/2]")
    zero = Fraction(0) if isinstance(p, Fraction) else 0.0

    def entry(x, y, a, b):
        if x == y:
            return {(0, 0): 1 - p, (1, 1): p}.get((a, b), zero)
        return {(0, 0): 1 - 2 * p, (0, 1): p, (1, 0): p}.get((a, b), zero)

    return _box_from_function(n, n, entry)


def make_deterministic_box(d: DeterministicAssignment, n_a: int | None = None,
                           n_b: int | None = None) -> BipartiteBox:
    n_a = len(d.f_a) if n_a is None else n_a
    n_b = len(d.f_b) if n_b is None else n_b
    if len(d.f_a) < n_a or len(d.f_b) < n_b:
        raise BoxError("assignment is not total on the declared inputs")
    return _box_from_function(
        n_a, n_b, lambda x, y, a, b: Fraction(int(a == d.f_a[x] and b == d.f_b[y])))


def zero_box(n_a: int, n_b: int | None = None) -> BipartiteBox:
    """Deterministic box with output 00 for every input pair."""
    n_b = n_a if n_b is None else n_b
    return make_deterministic_box(DeterministicAssignment.constant(0, 0, n_a, n_b))


def mix(boxes: Sequence[BipartiteBox], weights: Sequence) -> BipartiteBox:
    """Cell-wise convex combination."""
    if len(boxes) != len(weights) or not boxes:
        raise BoxError("need one weight per box")
    shape = boxes[0].shape
    if any(b.shape != shape for b in boxes):
        raise BoxError("boxes have different input dimensions")
    ws = [as_probability(w) for w in weights]
    if any(w < 0 for w in ws):
        raise BoxError("negative mixture weight")
    total = sum(ws)
    exact = all(isinstance(w, Fraction) for w in ws) and all(b.exact for b in boxes)
    if (exact and total != 1) or (not exact and abs(total - 1) > REAL_TOL):
        raise BoxError(f"weights sum to {total}, not 1")
    acc = ws[0] * boxes[0].cells
    for w, b in zip(ws[1:], boxes[1:]):
        acc = acc + w * b.cells
    return BipartiteBox(acc)


def _side(side: str) -> str:
    s = side.upper()
    if s not in ("A", "B", "BOTH"):
        raise BoxError(f"unknown side {side!r}")
    return s


def marginal(box: BipartiteBox, side: str, output: int, own_input: int, other_input: int) -> Probability:
    """``p(a=output|x=own, y=other)`` for side A, or the B analogue."""
    s = _side(side)
    if s == "A":
        return box.cells[own_input, other_input, output, :].sum()
    if s == "B":
        return box.cells[other_input, own_input, :, output].sum()
    raise BoxError("marginal needs side A or B")


@dataclass(frozen=True)
class SignalingViolation:
    side: str
    output: int
    input: int
    other_inputs: tuple[int, int]
    magnitude: Probability


@dataclass(frozen=True)
class NoSignalingReport:
    passed: bool
    tol: float
    violations: tuple[SignalingViolation, ...] = ()


def check_no_signaling(box: BipartiteBox, tol: float | None = None) -> NoSignalingReport:
    """Compare every marginal against the one at the other side's input 0."""
    if tol is None:
        tol = 0 if box.exact else REAL_TOL
    found = []
    for side, n_own, n_other in (("A", box.n_a, box.n_b), ("B", box.n_b, box.n_a)):
        for own in range(n_own):
            for out in (0, 1):
                ref = marginal(box, side, out, own, 0)
                for other in range(1, n_other):
                    diff = abs(marginal(box, side, out, own, other) - ref)
                    if diff > tol:
                        found.append(SignalingViolation(side, out, own, (0, other), diff))
    return NoSignalingReport(not found, tol, tuple(found))


def _check_pair(pair, n, what):
    if len(pair) != 2:
        raise BoxError(f"{what} must be a pair")
    i, j = pair
    if not (0 <= i < n and 0 <= j < n):
        raise BoxError(f"{what} {pair} out of range 0..{n - 1}")
    if i == j:
        raise BoxError(f"{what} {pair} repeats an input")


def restrict(box: BipartiteBox, xs: Sequence[int], ys: Sequence[int]) -> BipartiteBox:
    """2x2-input sub-box; ``xs[k]`` becomes input ``k`` and likewise for ``ys``."""
    _check_pair(xs, box.n_a, "A-inputs")
    _check_pair(ys, box.n_b, "B-inputs")
    return BipartiteBox(box.cells[np.ix_(list(xs), list(ys))])


def flip_outputs(box: BipartiteBox, side: str) -> BipartiteBox:
    """Complement the chosen side's output bit."""
    s = _side(side)
    cells = box.cells
    if s in ("A", "BOTH"):
        cells = cells[:, :, ::-1, :]
    if s in ("B", "BOTH"):
        cells = cells[:, :, :, ::-1]
    return BipartiteBox(cells.copy())


def sample(box: BipartiteBox, x: int, y: int, rng: np.random.Generator) -> tuple[int, int]:
    """Draw ``(a, b)`` from cell ``(x, y)``."""
    u = rng.random()
    acc = 0.0
    flat = [float(v) for v in box.cells[x, y].flat]
    for k, q in enumerate(flat):
        acc += q
        if u < acc:
            return k >> 1, k & 1
    last = max(k for k, q in enumerate(flat) if q > 0)
    return last >> 1, last & 1


# -- serialization -------------------------------------------------------

def format_probability(v: Probability) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return f"{float(v):.16e}"


def box_to_dict(box: BipartiteBox) -> dict:
    cells = {}
    for x in range(box.n_a):
        for y in range(box.n_b):
            c = box.cells[x, y]
            cells[f"{x + 1},{y + 1}"] = [[format_probability(c[a, b]) for b in (0, 1)] for a in (0, 1)]
    return {"n_a": box.n_a, "n_b": box.n_b, "cells": cells}


def box_from_dict(doc: dict) -> BipartiteBox:
    try:
        n_a, n_b = int(doc["n_a"]), int(doc["n_b"])
        raw = doc["cells"]
    except (KeyError, TypeError) as exc:
        raise BoxError(f"malformed box document: {exc}") from None
    cells = np.empty((n_a, n_b, 2, 2), dtype=object)
    seen = set()
    for key, table in raw.items():
        x, y = (int(t) - 1 for t in key.split(","))
        if not (0 <= x < n_a and 0 <= y < n_b):
            raise BoxError(f"cell key {key!r} out of range")
        for a in (0, 1):
            for b in (0, 1):
                cells[x, y, a, b] = as_probability(table[a][b])
        seen.add((x, y))
    if len(seen) != n_a * n_b:
        raise BoxError("box document is missing cells")
    return BipartiteBox(cells)


def dumps_box(box: BipartiteBox) -> str:
    return json.dumps(box_to_dict(box), indent=2, sort_keys=True)


def loads_box(text: str) -> BipartiteBox:
    return box_from_dict(json.loads(text))


def iter_cells(box: BipartiteBox) -> Iterable[tuple[int, int, np.ndarray]]:
    for x in range(box.n_a):
        for y in range(box.n_b):
            yield x, y, box.cells[x, y]
