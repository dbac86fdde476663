"""Counter-based random streams.

Every uniform is a pure function of ``(master_seed, replication, step, lane)``,
built from the SplitMix64 finaliser.  Nothing is sequential, so replications can
be evaluated in any order, in any chunking, on any number of workers and still
produce the same bits.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STEP_GAMMA = 0xD1B54A32D192ED03
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)

#: lanes reserved per step; no family consumes more than this
LANES = 4


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _mix_int(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def seed_key(master_seed: int) -> int:
    if not 0 <= master_seed <= _MASK:
        raise ValueError("master_seed must be a 64-bit unsigned integer")
    return _mix_int(master_seed + _GOLDEN)


def replication_keys(master_seed: int, replications: np.ndarray) -> np.ndarray:
    """Per-replication 64-bit keys for an array of replication indices."""
    reps = np.asarray(replications, dtype=np.uint64)
    k0 = np.uint64(seed_key(master_seed))
    with np.errstate(over="ignore"):
        return _mix(k0 ^ _mix((reps + np.uint64(1)) * np.uint64(_GOLDEN)))


def uniforms(keys: np.ndarray, step: int, lane: int = 0) -> np.ndarray:
    """Uniforms on the open interval (0, 1), one per key, for one (step, lane)."""
    if not 0 <= lane < LANES:
        raise ValueError(f"lane must be in [0, {LANES})")
    counter = np.uint64(((int(step) * LANES + lane + 1) * _STEP_GAMMA) & _MASK)
    with np.errstate(over="ignore"):
        bits = _mix(keys + counter) >> _S11
    # 53 random bits, offset by half an ulp so 0 and 1 are never produced
    return (bits.astype(np.float64) + 0.5) * (2.0**-53)


def uniforms_over_steps(key: np.ndarray, steps: np.ndarray, lane: int = 0) -> np.ndarray:
    """Same values as :func:`uniforms`, for one key and an array of steps."""
    if not 0 <= lane < LANES:
        raise ValueError(f"lane must be in [0, {LANES})")
    steps = np.asarray(steps, dtype=np.uint64)
    with np.errstate(over="ignore"):
        counter = (steps * np.uint64(LANES) + np.uint64(lane + 1)) * np.uint64(_STEP_GAMMA)
        bits = _mix(np.asarray(key, dtype=np.uint64).reshape(()) + counter) >> _S11
    return (bits.astype(np.float64) + 0.5) * (2.0**-53)


class Substream:
    """The random substream of one replication.

    >>> s = Substream(42, 7)
    >>> s.draws(3, 2) == Substream(42, 7).draws(3, 2)
    True
    """

    def __init__(self, master_seed: int, replication: int):
        self.master_seed = int(master_seed)
        self.replication = int(replication)
        self._key = replication_keys(self.master_seed, np.array([self.replication]))

    def draws(self, step: int, count: int) -> list[float]:
        return [float(uniforms(self._key, step, lane)[0]) for lane in range(count)]

    def block(self, steps, lane: int = 0) -> np.ndarray:
        """Lane ``lane`` of every step in ``steps``, as an array."""
        return uniforms_over_steps(self._key[0], np.asarray(steps), lane)

    def __repr__(self) -> str:
        return f"Substream(master_seed={self.master_seed}, replication={self.replication})"
