"""Hot loops of the Monte Carlo harness.

Every kernel exists twice: a numba ``@njit`` loop and a vectorized numpy
version.  Set ``NLBOX_NUMBA=0`` to force numpy (numba is also skipped when
it cannot be imported).  Both versions consume the same pre-drawn uniforms
and compare with the same float thresholds, so they return identical
arrays.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

_WANT_NUMBA = os.environ.get("NLBOX_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:
    import numba as _nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    _nb = None


# -- numpy ---------------------------------------------------------------

def _np_sample_cells(cum, xs, ys, u):
    # cum[x, y, k] = P(outcome <= k); outcome index is 2a + b
    c = cum[xs, ys]
    out = (u[:, None] >= c[:, :3]).sum(axis=1)
    return out.astype(np.int8)


def _np_tally(xs, ys, a, b, n_a, n_b):
    flat = ((xs.astype(np.int64) * n_b + ys) * 2 + a) * 2 + b
    return np.bincount(flat, minlength=n_a * n_b * 4).reshape(n_a, n_b, 2, 2)


def _np_chart_lookup(bits, lam, inputs):
    return bits[lam, inputs]


def _np_categorical(cum, u):
    idx = np.searchsorted(cum, u, side="right")
    return np.minimum(idx, len(cum) - 1).astype(np.int64)


def _np_threshold1(table, i, u):
    return (u < table[i]).astype(np.int8)


def _np_threshold3(table, i, o, j, u):
    return (u < table[i, o, j]).astype(np.int8)


numpy_impl = SimpleNamespace(
    sample_cells=_np_sample_cells,
    tally=_np_tally,
    chart_lookup=_np_chart_lookup,
    categorical=_np_categorical,
    threshold1=_np_threshold1,
    threshold3=_np_threshold3,
)


# -- numba ---------------------------------------------------------------

def _build_numba():
    njit = _nb.njit(cache=True, nogil=True)

    @njit
    def sample_cells(cum, xs, ys, u):
        out = np.empty(xs.shape[0], dtype=np.int8)
        for r in range(xs.shape[0]):
            k = 0
            while k < 3 and u[r] >= cum[xs[r], ys[r], k]:
                k += 1
            out[r] = k
        return out

    @njit
    def tally(xs, ys, a, b, n_a, n_b):
        counts = np.zeros((n_a, n_b, 2, 2), dtype=np.int64)
        for r in range(xs.shape[0]):
            counts[xs[r], ys[r], a[r], b[r]] += 1
        return counts

    @njit
    def chart_lookup(bits, lam, inputs):
        out = np.empty(inputs.shape[0], dtype=bits.dtype)
        for r in range(inputs.shape[0]):
            out[r] = bits[lam[r], inputs[r]]
        return out

    @njit
    def categorical(cum, u):
        out = np.empty(u.shape[0], dtype=np.int64)
        last = cum.shape[0] - 1
        for r in range(u.shape[0]):
            k = np.searchsorted(cum, u[r], side="right")
            out[r] = k if k < last else last
        return out

    @njit
    def threshold1(table, i, u):
        out = np.empty(u.shape[0], dtype=np.int8)
        for r in range(u.shape[0]):
            out[r] = 1 if u[r] < table[i[r]] else 0
        return out

    @njit
    def threshold3(table, i, o, j, u):
        out = np.empty(u.shape[0], dtype=np.int8)
        for r in range(u.shape[0]):
            out[r] = 1 if u[r] < table[i[r], o[r], j[r]] else 0
        return out

    return SimpleNamespace(
        sample_cells=sample_cells,
        tally=tally,
        chart_lookup=chart_lookup,
        categorical=categorical,
        threshold1=threshold1,
        threshold3=threshold3,
    )


numba_impl = _build_numba() if _nb is not None else None

BACKEND = "numba" if (_WANT_NUMBA and numba_impl is not None) else "numpy"
_impl = numba_impl if BACKEND == "numba" else numpy_impl

sample_cells = _impl.sample_cells
tally = _impl.tally
chart_lookup = _impl.chart_lookup
categorical = _impl.categorical
threshold1 = _impl.threshold1
threshold3 = _impl.threshold3


def get_impl(name: str) -> SimpleNamespace:
    if name == "numba":
        if numba_impl is None:
            raise RuntimeError("numba is not available")
        return numba_impl
    if name == "numpy":
        return numpy_impl
    raise ValueError(f"unknown backend {name!r}")
