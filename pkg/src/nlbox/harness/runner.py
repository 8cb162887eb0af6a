"""Run rounds, count outcomes, compare against exact cells."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..boxcore import BipartiteBox, format_probability
from ..correlations import ks_fidelity
from ..prsim import pr_sim_success
from . import kernels
from .rng import blocks, stream
from .strategies import KS_GAME, PR_GAME, Strategy, strategy_from


@dataclass(frozen=True)
class RunConfig:
    seed: int
    rounds: int
    tolerance_sigmas: float = 5.0
    workers: int = 1

    def __post_init__(self):
        if int(self.rounds) < 1:
            raise ValueError("rounds must be at least 1")
        if not self.tolerance_sigmas > 0:
            raise ValueError("tolerance_sigmas must be positive")
        if int(self.workers) < 1:
            raise ValueError("workers must be at least 1")


@dataclass
class SimReport:
    kind: str
    config: RunConfig
    target: BipartiteBox
    counts: np.ndarray  # [x, y, a, b] integer counts
    max_deviation_sigmas: float
    worst_cell: tuple | None
    score_name: str | None = None
    score: float | None = None
    expected_score: object = None
    score_sigmas: float | None = None
    passed: bool = False

    @property
    def frequencies(self) -> np.ndarray:
        n = self.counts.sum(axis=(2, 3), keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(n > 0, self.counts / np.maximum(n, 1), np.nan)

    def pair_rounds(self, x: int, y: int) -> int:
        return int(self.counts[x, y].sum())

    def to_dict(self) -> dict:
        freq = self.frequencies
        pairs = {}
        for x in range(self.target.n_a):
            for y in range(self.target.n_b):
                n = self.pair_rounds(x, y)
                pairs[f"{x + 1},{y + 1}"] = {
                    "rounds": n,
                    "counts": self.counts[x, y].tolist(),
                    "frequencies": None if n == 0 else [[float(v) for v in row] for row in freq[x, y]],
                    "expected": [[format_probability(v) for v in row] for row in self.target.cells[x, y]],
                }
        out = {
            "kind": self.kind,
            "seed": int(self.config.seed),
            "rounds": int(self.config.rounds),
            "tolerance_sigmas": float(self.config.tolerance_sigmas),
            "rng": "philox4x64/seedsequence",
            "max_deviation_sigmas": float(self.max_deviation_sigmas),
            "worst_cell": None if self.worst_cell is None else [i + 1 for i in self.worst_cell[:2]] + list(self.worst_cell[2:]),
            "pairs": pairs,
            "passed": bool(self.passed),
        }
        if self.score_name is not None:
            out["score"] = {
                "name": self.score_name,
                "empirical": float(self.score),
                "expected": format_probability(self.expected_score),
                "deviation_sigmas": float(self.score_sigmas),
            }
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def cumulative_table(box: BipartiteBox) -> np.ndarray:
    """``cum[x, y, k] = P(2a + b <= k)`` with unreachable tails pinned to 1."""
    p = box.as_float().reshape(box.n_a, box.n_b, 4)
    cum = np.cumsum(p, axis=2)
    for x in range(box.n_a):
        for y in range(box.n_b):
            nz = np.nonzero(p[x, y])[0]
            last = int(nz[-1]) if len(nz) else 3
            cum[x, y, last:] = 1.0
    return cum


def _binomial_z(k: int, n: int, q: float) -> float:
    if n == 0:
        return 0.0
    var = n * q * (1.0 - q)
    dev = abs(k - n * q)
    if var <= 0.0:
        # a certain or impossible event: any miss is an infinite deviation
        return 0.0 if dev < 0.5 else math.inf
    return dev / math.sqrt(var)


def _cell_deviations(counts: np.ndarray, target: BipartiteBox):
    p = target.as_float()
    worst, where = 0.0, None
    for x in range(target.n_a):
        for y in range(target.n_b):
            n = int(counts[x, y].sum())
            for a in (0, 1):
                for b in (0, 1):
                    z = _binomial_z(int(counts[x, y, a, b]), n, float(p[x, y, a, b]))
                    if z > worst:
                        worst, where = z, (x, y, a, b)
    return worst, where


def _map_blocks(fn, cfg: RunConfig):
    todo = list(blocks(int(cfg.rounds)))
    if cfg.workers > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=int(cfg.workers)) as pool:
            parts = list(pool.map(lambda kb: fn(*kb), todo))
    else:
        parts = [fn(k, size) for k, size in todo]
    total = parts[0]
    for c in parts[1:]:
        total = total + c
    return total


def _inputs(seed, block, size, n_a, n_b):
    xs = stream(seed, "input-a", block).integers(0, n_a, size, dtype=np.int64)
    ys = stream(seed, "input-b", block).integers(0, n_b, size, dtype=np.int64)
    return xs, ys


def run_rounds(box: BipartiteBox, cfg: RunConfig) -> SimReport:
    """A referee samples each round's outcome directly from the box."""
    cum = cumulative_table(box)
    n_a, n_b = box.n_a, box.n_b

    def one(block, size):
        xs, ys = _inputs(cfg.seed, block, size, n_a, n_b)
        u = stream(cfg.seed, "referee", block).random(size)
        k = kernels.sample_cells(cum, xs, ys, u)
        return kernels.tally(xs, ys, (k >> 1).astype(np.int8), (k & 1).astype(np.int8), n_a, n_b)

    counts = _map_blocks(one, cfg)
    worst, where = _cell_deviations(counts, box)
    return SimReport("box", cfg, box, counts, worst, where, passed=worst <= cfg.tolerance_sigmas)


def empirical_score(counts: np.ndarray, game: str) -> float:
    n = counts.sum()
    wins = 0
    for x in range(counts.shape[0]):
        for y in range(counts.shape[1]):
            c = counts[x, y]
            if game == KS_GAME:
                wins += (c[0, 0] + c[1, 1]) if x == y else (c[0, 0] + c[0, 1] + c[1, 0])
            else:
                wins += (c[0, 1] + c[1, 0]) if (x & y) else (c[0, 0] + c[1, 1])
    return float(wins) / float(n)


def run_strategy(strategy, cfg: RunConfig) -> SimReport:
    """Play ``strategy`` round by round with independently delivered inputs.

    ``strategy`` may be a chart mixture, a quantum strategy spec, a PR
    simulation plan or an already built :class:`Strategy`.
    """
    st: Strategy = strategy_from(strategy)
    target = st.target
    n_a, n_b = target.n_a, target.n_b

    def one(block, size):
        shared = st.share(cfg.seed, block, size)
        xs, ys = _inputs(cfg.seed, block, size, n_a, n_b)
        a = np.asarray(st.alice(xs, shared), dtype=np.int8)
        b = np.asarray(st.bob(ys, shared), dtype=np.int8)
        return kernels.tally(xs, ys, a, b, n_a, n_b)

    counts = _map_blocks(one, cfg)
    worst, where = _cell_deviations(counts, target)
    if st.game == PR_GAME:
        name, expected = "pr_success", pr_sim_success(target)
    else:
        name, expected = "ks_fidelity", ks_fidelity(target)
    score = empirical_score(counts, st.game)
    n = int(counts.sum())
    z = _binomial_z(int(round(score * n)), n, float(expected))
    ok = worst <= cfg.tolerance_sigmas and z <= cfg.tolerance_sigmas
    return SimReport(st.name, cfg, target, counts, worst, where, name, score, expected, z, ok)
