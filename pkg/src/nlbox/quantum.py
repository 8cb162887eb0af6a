"""Klyachko pentagram vectors and maximally-entangled measurement strategies."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .boxcore import BipartiteBox, BoxError

GEOM_TOL = 1e-12


def _unit(v, tol: float = GEOM_TOL) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise BoxError("vectors must be one-dimensional")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise BoxError(f"vector {v.tolist()} is not unit length")
    return v


def klyachko_vectors() -> tuple[np.ndarray, np.ndarray]:
    """Five unit vectors on a cone around ``psi = e_z`` plus ``psi`` itself.

    Vector ``i`` sits at azimuth ``4*pi*i/5`` with ``cos^2(theta) = 1/sqrt(5)``,
    so label-adjacent vectors are orthogonal.
    """
    cos_t = 5 ** -0.25
    sin_t = math.sqrt(1.0 - 1.0 / math.sqrt(5.0))
    vecs = np.array([
        [sin_t * math.cos(4 * math.pi * i / 5), sin_t * math.sin(4 * math.pi * i / 5), cos_t]
        for i in range(5)
    ])
    psi = np.array([0.0, 0.0, 1.0])
    return vecs, psi


@dataclass(frozen=True, eq=False)
class StrategySpec:
    """Maximally entangled state of local dimension ``m``; input ``i`` measures ``vectors[i]``."""

    m: int
    vectors: np.ndarray

    def __post_init__(self):
        if int(self.m) < 1:
            raise BoxError("local dimension must be positive")
        vecs = np.array([_unit(v) for v in self.vectors], dtype=float)
        if vecs.ndim != 2 or vecs.shape[1] != self.m:
            raise BoxError(f"vectors must have {self.m} components")
        vecs.flags.writeable = False
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "vectors", vecs)

    def to_dict(self) -> dict:
        return {"m": self.m, "vectors": [[float(c) for c in v] for v in self.vectors]}

    @classmethod
    def from_dict(cls, doc: dict) -> "StrategySpec":
        return cls(int(doc["m"]), np.array(doc["vectors"], dtype=float))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def klyachko_strategy() -> StrategySpec:
    return StrategySpec(3, klyachko_vectors()[0])


def basis_strategy(n: int = 5) -> StrategySpec:
    return StrategySpec(n, np.eye(n))


def born_joint(u, v, m: int) -> np.ndarray:
    """Outcome table ``[[p00, p01], [p10, p11]]`` for projectors on ``u`` and ``v``."""
    if m < 1:
        raise BoxError("local dimension must be positive")
    u, v = _unit(u), _unit(v)
    if u.shape != (m,) or v.shape != (m,):
        raise BoxError(f"vectors must have dimension {m}")
    p11 = float(np.dot(u, v)) ** 2 / m
    p10 = 1.0 / m - p11
    return np.array([[1.0 - 2.0 / m + p11, p10], [p10, p11]])


def entangled_strategy_box(s: StrategySpec) -> BipartiteBox:
    n = len(s.vectors)
    cells = np.empty((n, n, 2, 2), dtype=object)
    for x in range(n):
        for y in range(n):
            cells[x, y] = born_joint(s.vectors[x], s.vectors[y], s.m)
    return BipartiteBox(cells)


def tsirelson_marginal() -> float:
    """KS marginal whose CHSH maximum equals ``2*sqrt(2)``."""
    return (1.0 + math.sqrt(2.0)) / 6.0
