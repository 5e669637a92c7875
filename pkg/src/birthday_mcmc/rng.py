"""Counter-based random streams (Threefry-2x32, 20 rounds).

Every draw is a pure function of ``(seed, stream_id, counter)``, so a stream
can be evaluated for one copy at a time or for thousands of copies at once in
a numpy batch and both paths yield identical values.
"""

from __future__ import annotations

import numpy as np

MASK32 = 0xFFFFFFFF
MASK64 = 0xFFFFFFFFFFFFFFFF
_ROTATIONS = (13, 15, 26, 6, 17, 29, 16, 24)
_PARITY = 0x1BD11BDA
_INV_2_53 = 1.0 / (1 << 53)

# stream_id layout: phase(1) | stage(8) | experiment(24) | copy(31)
_COPY_BITS = 31
_EXPERIMENT_BITS = 24
_STAGE_BITS = 8


def threefry2x32(key0, key1, ctr0, ctr1):
    """Threefry-2x32-20 block function.

    Works elementwise on Python ints or on numpy ``uint32`` arrays (which
    broadcast against each other).
    """
    # uint32 wraparound is intended; numpy warns on it for 0-d operands.
    with np.errstate(over="ignore"):
        ks = (key0, key1, (key0 ^ key1 ^ _PARITY) & MASK32)
        x0 = (ctr0 + key0) & MASK32
        x1 = (ctr1 + key1) & MASK32
        for r in range(20):
            rot = _ROTATIONS[r % 8]
            x0 = (x0 + x1) & MASK32
            x1 = ((x1 << rot) | (x1 >> (32 - rot))) & MASK32
            x1 = x1 ^ x0
            if r % 4 == 3:
                s = (r + 1) // 4
                x0 = (x0 + ks[s % 3]) & MASK32
                x1 = (x1 + ks[(s + 1) % 3] + s) & MASK32
    return x0, x1


def _split(value):
    return value & MASK32, (value >> 32) & MASK32


def stream_key(seed: int, stream_id: int) -> int:
    """Derive the 64-bit block key of stream ``stream_id`` under ``seed``."""
    s0, s1 = _split(seed & MASK64)
    c0, c1 = _split(stream_id & MASK64)
    lo, hi = threefry2x32(s0, s1, c0, c1)
    return lo | (hi << 32)


def stream_keys(seed: int, stream_ids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`stream_key`, returned as (low, high) uint32 arrays."""
    ids = np.asarray(stream_ids, dtype=np.uint64)
    s0, s1 = _split(seed & MASK64)
    c0 = (ids & np.uint64(MASK32)).astype(np.uint32)
    c1 = (ids >> np.uint64(32)).astype(np.uint32)
    return threefry2x32(np.uint32(s0), np.uint32(s1), c0, c1)


def uniforms(keys: tuple[np.ndarray, np.ndarray], counter: int) -> np.ndarray:
    """Uniform [0, 1) doubles at position ``counter`` of each keyed stream."""
    c0, c1 = _split(counter)
    lo, hi = threefry2x32(keys[0], keys[1], np.uint32(c0), np.uint32(c1))
    bits = (hi.astype(np.uint64) << np.uint64(32)) | lo.astype(np.uint64)
    return (bits >> np.uint64(11)).astype(np.float64) * _INV_2_53


def bits_to_uniform(lo: int, hi: int) -> float:
    return (((hi << 32) | lo) >> 11) * _INV_2_53


def pack_stream_id(stage: int, experiment: int, copy: int, phase: int = 0) -> int:
    """Deterministic stream id for one chain copy.

    ``phase`` 0 is the estimation phase, 1 the final sampling run.
    """
    if not 0 <= copy < (1 << _COPY_BITS):
        raise ValueError(f"copy index out of range: {copy}")
    if not 0 <= experiment < (1 << _EXPERIMENT_BITS):
        raise ValueError(f"experiment index out of range: {experiment}")
    if not 0 <= stage < (1 << _STAGE_BITS):
        raise ValueError(f"stage index out of range: {stage}")
    if phase not in (0, 1):
        raise ValueError(f"phase must be 0 or 1, got {phase}")
    return (
        (phase << 63)
        | (stage << (_EXPERIMENT_BITS + _COPY_BITS))
        | (experiment << _COPY_BITS)
        | copy
    )


def pack_stream_ids(stage: int, experiments: np.ndarray, copies: np.ndarray, phase: int = 0) -> np.ndarray:
    """Vectorised :func:`pack_stream_id` (broadcasts ``experiments`` against ``copies``)."""
    exp = np.asarray(experiments, dtype=np.uint64)
    cop = np.asarray(copies, dtype=np.uint64)
    base = (phase << 63) | (stage << (_EXPERIMENT_BITS + _COPY_BITS))
    return np.uint64(base) | (exp << np.uint64(_COPY_BITS)) | cop


class RandomStream:
    """A reproducible stream of uniforms addressed by a running counter.

    Two streams with the same ``(seed, stream_id)`` produce the same sequence
    no matter when or where they are consumed.
    """

    __slots__ = ("seed", "stream_id", "counter", "_k0", "_k1")

    def __init__(self, seed: int, stream_id: int = 0, counter: int = 0):
        self.seed = seed & MASK64
        self.stream_id = stream_id & MASK64
        self.counter = counter
        self._k0, self._k1 = _split(stream_key(self.seed, self.stream_id))

    def random(self) -> float:
        lo, hi = threefry2x32(self._k0, self._k1, *_split(self.counter))
        self.counter += 1
        return bits_to_uniform(lo, hi)

    def integers(self, k: int) -> int:
        """Uniform integer in [0, k) from a single draw."""
        return min(int(self.random() * k), k - 1)

    def skip(self, count: int = 1) -> None:
        self.counter += count

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id}, counter={self.counter})"
