"""Seeded Monte Carlo harness."""

from .kernels import BACKEND
from .rng import BLOCK, STREAMS, stream
from .runner import RunConfig, SimReport, cumulative_table, empirical_score, run_rounds, run_strategy
from .strategies import (
    BoxResource,
    ChartStrategy,
    EntangledPairs,
    PrSimulation,
    QuantumStrategy,
    Shared,
    Strategy,
    strategy_from,
)
