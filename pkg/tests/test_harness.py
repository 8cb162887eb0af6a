import inspect
import os
import subprocess
import sys
from fractions import Fraction as F

import numpy as np
import pytest

from nlbox.boxcore import make_deterministic_box, make_ks_box, make_pr_box, DeterministicAssignment
from nlbox.charts import m1_mixture
from nlbox.harness import (
    BACKEND,
    BoxResource,
    ChartStrategy,
    EntangledPairs,
    PrSimulation,
    QuantumStrategy,
    RunConfig,
    cumulative_table,
    run_rounds,
    run_strategy,
    stream,
)
from nlbox.harness import kernels
from nlbox.prsim import default_strategy
from nlbox.quantum import klyachko_strategy

STRATEGIES = [
    ChartStrategy(m1_mixture()),
    QuantumStrategy(klyachko_strategy()),
    PrSimulation(make_ks_box(5, F(1, 3)), default_strategy()),
]


@pytest.mark.parametrize("st", STRATEGIES, ids=lambda s: s.name)
def test_party_interfaces_see_only_own_input_and_shared(st):
    for party in (st.alice, st.bob):
        assert list(inspect.signature(party).parameters) == ["inputs", "shared"]
    sig = inspect.signature(st.share)
    assert list(sig.parameters) == ["seed", "block", "size"]


def test_resources_refuse_second_use_by_same_side():
    res = EntangledPairs(np.eye(3), 3, 0, 0, 4)
    res.measure("A", np.zeros(4, dtype=np.int64))
    with pytest.raises(RuntimeError):
        res.measure("A", np.zeros(4, dtype=np.int64))
    box = BoxResource(make_pr_box(), 0, 0, 4)
    with pytest.raises(ValueError):
        box.use("A", np.zeros(3, dtype=np.int64))


@pytest.mark.parametrize("first", ["A", "B"])
def test_either_side_may_use_the_resource_first(first):
    box = make_ks_box(5, F(1, 3))
    n = 400_000
    xs = stream(0, "input-a", 0).integers(0, 5, n)
    ys = stream(0, "input-b", 0).integers(0, 5, n)
    res = BoxResource(box, 0, 0, n)
    if first == "A":
        a = res.use("A", xs)
        b = res.use("B", ys)
    else:
        b = res.use("B", ys)
        a = res.use("A", xs)
    counts = kernels.tally(xs, ys, a, b, 5, 5)
    assert counts[:, :, 1, 1].trace() == counts[:, :, 1, 1].sum()  # never 11 off the diagonal
    freq = counts / counts.sum(axis=(2, 3), keepdims=True)
    assert np.abs(freq - box.as_float()).max() < 0.01


def test_cumulative_table_pins_unreachable_tail():
    cum = cumulative_table(make_ks_box(5, F(1, 3)))
    assert cum[0, 1, 2] == 1.0 and cum[0, 1, 3] == 1.0
    assert cum[0, 0, 0] == pytest.approx(2 / 3)


def test_streams_are_independent_and_reproducible():
    a = stream(5, "input-a", 0).random(4)
    assert np.array_equal(a, stream(5, "input-a", 0).random(4))
    assert not np.array_equal(a, stream(5, "input-b", 0).random(4))
    assert not np.array_equal(a, stream(5, "input-a", 1).random(4))
    assert not np.array_equal(a, stream(6, "input-a", 0).random(4))


def test_deterministic_box_exact_match():
    d = make_deterministic_box(DeterministicAssignment((0,) * 5, (0,) * 5))
    for n in (1, 17, 70_000):
        rep = run_rounds(d, RunConfig(3, n))
        assert rep.passed and rep.max_deviation_sigmas == 0
        assert rep.counts[:, :, 0, 0].sum() == n


def test_pr_box_constraint_is_deterministic():
    rep = run_rounds(make_pr_box(), RunConfig(2, 100_000))
    c = rep.counts[1, 1]
    assert c[0, 0] == c[1, 1] == 0
    assert rep.frequencies[1, 1, 0, 1] + rep.frequencies[1, 1, 1, 0] == 1
    assert rep.passed


def test_ks_box_million_rounds():
    rep = run_rounds(make_ks_box(5, F(1, 3)), RunConfig(1, 10 ** 6))
    assert rep.passed
    freq = rep.frequencies
    assert np.allclose(freq.sum(axis=(2, 3)), 1)


def test_workers_do_not_change_the_report():
    base = run_strategy(m1_mixture(), RunConfig(9, 300_000)).dumps()
    assert run_strategy(m1_mixture(), RunConfig(9, 300_000, workers=3)).dumps() == base
    assert run_strategy(m1_mixture(), RunConfig(10, 300_000)).dumps() != base


def test_bad_configs():
    with pytest.raises(ValueError):
        RunConfig(0, 0)
    with pytest.raises(ValueError):
        RunConfig(0, 10, tolerance_sigmas=0)


def _kernel_inputs(n=5000):
    rng = np.random.default_rng(1)
    xs, ys = rng.integers(0, 5, n), rng.integers(0, 5, n)
    u = rng.random(n)
    u[:50] = 0.0
    a = rng.integers(0, 2, n).astype(np.int8)
    b = rng.integers(0, 2, n).astype(np.int8)
    return xs, ys, u, a, b


@pytest.mark.skipif(kernels.numba_impl is None, reason="numba not installed")
def test_backends_agree_kernel_by_kernel():
    nb, npy = kernels.get_impl("numba"), kernels.get_impl("numpy")
    xs, ys, u, a, b = _kernel_inputs()
    cum = cumulative_table(make_ks_box(5, F(1, 3)))
    bits = np.random.default_rng(2).integers(0, 2, (32, 5)).astype(np.int8)
    lam = np.random.default_rng(3).integers(0, 32, len(xs))
    ccum = np.linspace(1 / 32, 1, 32)
    t3 = np.random.default_rng(4).random((5, 2, 5))
    pairs = [
        (nb.sample_cells(cum, xs, ys, u), npy.sample_cells(cum, xs, ys, u)),
        (nb.tally(xs, ys, a, b, 5, 5), npy.tally(xs, ys, a, b, 5, 5)),
        (nb.chart_lookup(bits, lam, xs), npy.chart_lookup(bits, lam, xs)),
        (nb.categorical(ccum, u), npy.categorical(ccum, u)),
        (nb.threshold1(t3[:, 0, 0], xs, u), npy.threshold1(t3[:, 0, 0], xs, u)),
        (nb.threshold3(t3, xs, a.astype(np.int64), ys, u), npy.threshold3(t3, xs, a.astype(np.int64), ys, u)),
    ]
    for got, want in pairs:
        assert np.array_equal(got, want)


def test_backend_flag_selects_numpy_and_matches():
    code = (
        "from nlbox.harness import BACKEND, RunConfig, run_strategy\n"
        "from nlbox.prsim import default_strategy\n"
        "print(BACKEND)\n"
        "print(run_strategy(default_strategy(), RunConfig(4, 100000)).dumps())\n"
    )
    env = dict(os.environ, NLBOX_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    backend, _, report = out.partition("\n")
    assert backend == "numpy"
    assert report.strip() == run_strategy(default_strategy(), RunConfig(4, 100000)).dumps()
    assert BACKEND in ("numba", "numpy")
