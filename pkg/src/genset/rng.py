"""Counter-based SplitMix64 streams, one per trial.

Let ``base`` be the first SplitMix64 output from state ``seed``.  Trial ``i``
runs its own SplitMix64 generator whose initial state is output ``i+1`` of the
generator started at ``base``; draw ``j`` of the trial is that generator's
output ``j+1``.  Each draw is thus a pure function of ``(seed, i, j)``:
changing the number of trials never reshuffles earlier ones, and any split of
the trials across workers reproduces the same outcomes.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def trial_key(seed: int, trial: int) -> int:
    base = mix64(seed + GAMMA)
    return mix64(base + (trial + 1) * GAMMA)


def draw(seed: int, trial: int, j: int) -> int:
    return mix64(trial_key(seed, trial) + (j + 1) * GAMMA)


def bounded(x: int, m: int) -> int:
    """Map a 64-bit draw into ``range(m)`` by multiply-shift on its top 32 bits."""
    return ((x >> 32) * m) >> 32


# -- vectorised versions -------------------------------------------------------

_G = np.uint64(GAMMA)
_U1 = np.uint64(_M1)
_U2 = np.uint64(_M2)
_S30, _S27, _S31, _S32 = (np.uint64(s) for s in (30, 27, 31, 32))


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _U1
    z = (z ^ (z >> _S27)) * _U2
    return z ^ (z >> _S31)


def trial_keys(seed: int, start: int, stop: int) -> np.ndarray:
    base = np.uint64(mix64(seed + GAMMA))
    idx = np.arange(start + 1, stop + 1, dtype=np.uint64)
    return _mix_array(base + idx * _G)


def draw_matrix(seed: int, start: int, stop: int, count: int) -> np.ndarray:
    """Raw 64-bit draws, shape ``(stop - start, count)``."""
    keys = trial_keys(seed, start, stop)
    steps = np.arange(1, count + 1, dtype=np.uint64) * _G
    return _mix_array(keys[:, None] + steps[None, :])


def bounded_array(x: np.ndarray, m) -> np.ndarray:
    return ((x >> _S32) * np.asarray(m, dtype=np.uint64)) >> _S32
