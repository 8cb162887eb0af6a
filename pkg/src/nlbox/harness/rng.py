"""Counter-based random streams for the harness.

Rounds are processed in blocks of ``BLOCK`` rounds.  The generator for
stream ``name`` in block ``k`` is Philox-4x64 keyed by
``SeedSequence(seed, spawn_key=(STREAMS[name], k))``, so any block can be
regenerated on its own, by any worker, in any order.
"""

from __future__ import annotations

import numpy as np

BLOCK = 1 << 16

#: fixed ids; changing one changes every report
STREAMS = {
    "input-a": 1,
    "input-b": 2,
    "referee": 3,
    "shared": 4,
    "shared-flip": 5,
    "party-a": 6,
    "party-b": 7,
}


def stream(seed: int, name: str, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & ((1 << 64) - 1), spawn_key=(STREAMS[name], int(block)))
    return np.random.Generator(np.random.Philox(ss))


def blocks(rounds: int):
    """Yield ``(block_index, size)`` covering ``rounds`` rounds."""
    k = 0
    done = 0
    while done < rounds:
        size = min(BLOCK, rounds - done)
        yield k, size
        done += size
        k += 1
