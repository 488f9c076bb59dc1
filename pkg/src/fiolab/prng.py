"""Counter-based deterministic random numbers.

All stochastic generators in this package are pure functions of
``(seed, parameters)``. The generator is the splitmix64 finalizer applied
to a strided counter, which makes any slice of the stream addressable
without sequential state and keeps results identical across platforms,
processes and thread counts.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64


def _mix(z: np.ndarray) -> np.ndarray:
    # wraparound multiplication is the point; silence numpy's scalar warning
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U64(30))) * _M1
        z = (z ^ (z >> _U64(27))) * _M2
        return z ^ (z >> _U64(31))


def derive_seed(seed: int, *keys: int) -> int:
    """Fold integer keys into a 64-bit sub-stream seed."""
    state = _U64(seed & 0xFFFFFFFFFFFFFFFF)
    for k in keys:
        with np.errstate(over="ignore"):
            state = _mix(state + _U64((k + 1) & 0xFFFFFFFFFFFFFFFF) * _GAMMA)
    return int(state)


def uniform(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """``count`` doubles in [0, 1), from counters offset..offset+count-1."""
    with np.errstate(over="ignore"):
        counters = _U64(seed) + (np.arange(offset + 1, offset + count + 1, dtype=np.uint64)) * _GAMMA
        bits = _mix(counters)
    return (bits >> _U64(11)).astype(np.float64) * (2.0 ** -53)


def standard_normal(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Box-Muller normals; consumes 2*count counters starting at offset."""
    u1 = uniform(seed, count, offset)
    u2 = uniform(seed, count, offset + count)
    # keep u1 away from 0 so the log is finite
    u1 = np.maximum(u1, 2.0 ** -53)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def complex_normal(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Standard complex normals (unit variance); consumes 4*count counters."""
    re = standard_normal(seed, count, offset)
    im = standard_normal(seed, count, offset + 2 * count)
    return (re + 1j * im) / np.sqrt(2.0)
