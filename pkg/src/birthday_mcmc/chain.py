"""Black-box chain oracles, the lazy (hold 1/n) wrapper, and simulation."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .rng import RandomStream, stream_keys, uniforms

StepFn = Callable[[int, RandomStream], int]
# (states, uniforms) -> next states; must agree with StepFn drawing one uniform.
BatchStepFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ChainOracle:
    """State count, start state and a one-step sampler.

    ``step_batch`` is an optional vectorised form of ``step``. When given it
    must return exactly what ``step`` would if ``step`` made one call to
    ``rng.random()`` and got the matching uniform.
    """

    n: int
    x0: int
    step: StepFn
    step_batch: Optional[BatchStepFn] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"state count must be positive, got {self.n}")
        if not 0 <= self.x0 < self.n:
            raise ValueError(f"start state {self.x0} outside [0, {self.n})")


class StepCounter:
    """Thread-safe tally of simulated steps (holds included)."""

    def __init__(self):
        self._total = 0
        self._lock = threading.Lock()

    def charge(self, steps: int) -> None:
        with self._lock:
            self._total += steps

    @property
    def total(self) -> int:
        return self._total


def lazy_step(oracle: ChainOracle, x: int, rng: RandomStream) -> int:
    # The hold draw is always consumed and a held step skips the move draw,
    # so for one-draw oracles step t always lives at counters 2t and 2t + 1.
    if rng.random() * oracle.n < 1.0:
        rng.skip(1)
        return x
    return oracle.step(x, rng)


def simulate(
    oracle: ChainOracle,
    t: int,
    rng: RandomStream,
    counter: Optional[StepCounter] = None,
) -> int:
    """State after ``t`` lazy steps from ``oracle.x0``."""
    if t < 0:
        raise ValueError(f"step count must be nonnegative, got {t}")
    x = oracle.x0
    for _ in range(t):
        x = lazy_step(oracle, x, rng)
    if counter is not None:
        counter.charge(t)
    return x


def simulate_batch(
    oracle: ChainOracle,
    t: int,
    seed: int,
    stream_ids: np.ndarray,
    counter: Optional[StepCounter] = None,
) -> np.ndarray:
    """Run one independent copy per stream id for ``t`` lazy steps.

    Copy ``j`` gives the same final state as
    ``simulate(oracle, t, RandomStream(seed, stream_ids[j]))``.
    """
    if t < 0:
        raise ValueError(f"step count must be nonnegative, got {t}")
    ids = np.asarray(stream_ids, dtype=np.uint64)
    if oracle.step_batch is None:
        out = np.array(
            [simulate(oracle, t, RandomStream(seed, int(sid))) for sid in ids],
            dtype=np.int64,
        )
    else:
        keys = stream_keys(seed, ids)
        out = np.full(ids.shape, oracle.x0, dtype=np.int64)
        for s in range(t):
            hold = uniforms(keys, 2 * s) * oracle.n < 1.0
            moved = oracle.step_batch(out, uniforms(keys, 2 * s + 1))
            out = np.where(hold, out, moved)
    if counter is not None:
        counter.charge(t * ids.size)
    return out


def uniform_oracle(n: int, x0: int = 0) -> ChainOracle:
    """Synthetic chain whose every step lands uniformly, ignoring the state."""

    def step(x, rng):
        return rng.integers(n)

    def step_batch(xs, u):
        return np.minimum((u * n).astype(np.int64), n - 1)

    return ChainOracle(n=n, x0=x0, step=step, step_batch=step_batch)
