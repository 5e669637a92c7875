"""Adaptive horizon-doubling sampler driven by the birthday collision vote.

Stage ``i`` runs ``m`` experiments; each experiment simulates ``l`` lazy
copies from ``x0`` for ``2**i`` steps and counts pairwise collisions among
the endpoints. Few collisions mean the endpoints look uniform. The loop stops
at the first stage where at least half the experiments look uniform (or at
the horizon cap), then a fresh run of the same length produces the sample.
"""

from __future__ import annotations

import logging
import math
import secrets
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .chain import ChainOracle, StepCounter, simulate_batch
from .rng import MASK64, pack_stream_id, pack_stream_ids
from .stats import CollisionReport, collision_count, collision_count_array, success_threshold

log = logging.getLogger(__name__)

CONSTANT_RULES = ("sound", "lean")
MAX_BATCH_COPIES = 1 << 19
MAX_STAGE = 255


@dataclass(frozen=True)
class ParamSet:
    n: int
    epsilon: float
    delta: float
    l: int
    m: int
    a_n: float
    i_max: int
    scale: float = 1.0
    constants: str = "sound"

    @property
    def guarantee(self) -> str:
        return "full_constants" if self.scale == 1.0 else "voided_by_scale"

    @property
    def threshold(self) -> Fraction:
        return success_threshold(self.l, self.n, self.delta)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "l": self.l,
            "m": self.m,
            "a_n": self.a_n,
            "i_max": self.i_max,
            "scale": self.scale,
            "constants": self.constants,
        }


def derive_params(n: int, epsilon: float, scale: float = 1.0, constants: str = "sound") -> ParamSet:
    """Copies per experiment, experiments per stage and the stage cap.

    ``constants="sound"`` (default) sizes ``l`` and the cap so the Chebyshev
    and Hoeffding steps of the correctness argument hold:
    ``l = ceil(1 + 1024 sqrt(n) / delta**2)`` and ``a_n = n**4 ln(2n/delta)``.
    ``constants="lean"`` uses the smaller ``l = ceil(1 + 512 sqrt(n) / eps**2)``
    and ``a_n = n**4 ln(2n/eps)``; that ``l`` misses the variance budget
    ``2 sqrt(n) / l <= delta**2 / 512`` for every n. In both cases
    ``m = ceil(8 ln(2 a_n / eps))``, logs are natural, and ``scale`` shrinks
    ``l`` and ``m`` before rounding up (voiding the guarantee).
    """
    if n < 1:
        raise ValueError(f"need at least one state, got n={n}")
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    if not 0 < scale <= 1:
        raise ValueError(f"scale must lie in (0, 1], got {scale}")
    if constants not in CONSTANT_RULES:
        raise ValueError(f"constants must be one of {CONSTANT_RULES}, got {constants!r}")
    delta = epsilon * epsilon
    if constants == "sound":
        l_raw = 1 + 1024 * math.sqrt(n) / delta**2
        a_n = n**4 * math.log(2 * n / delta)
    else:
        l_raw = 1 + 512 * math.sqrt(n) / epsilon**2
        a_n = n**4 * math.log(2 * n / epsilon)
    m_raw = 8 * math.log(2 * a_n / epsilon)
    l = max(2, math.ceil(scale * l_raw))
    m = max(1, math.ceil(scale * m_raw))
    i_max = max(1, math.ceil(math.log2(a_n)))
    if scale < 1:
        log.warning(
            "scale=%g shrinks l to %d and m to %d: the sampling guarantee is VOID", scale, l, m
        )
    return ParamSet(n, epsilon, delta, l, m, a_n, i_max, scale, constants)


@dataclass
class StageRecord:
    i: int
    horizon: int
    experiments: int
    successes: int
    z_values: list[int]
    steps_charged: int
    threshold: Fraction
    stop: bool

    @property
    def mean_z(self) -> float:
        return float(np.mean(self.z_values))

    def as_dict(self) -> dict:
        return {
            "i": self.i,
            "horizon": self.horizon,
            "experiments": self.experiments,
            "successes": self.successes,
            "z_values": list(self.z_values),
            "mean_z": self.mean_z,
            "threshold": float(self.threshold),
            "steps_charged": self.steps_charged,
            "stop": self.stop,
        }


@dataclass
class EstimatorResult:
    i_final: int
    horizon: int
    samples: list[int]
    stages: list[StageRecord]
    total_steps: int
    capped: bool
    params: ParamSet
    seed: int
    sampling_steps: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def sample(self) -> int:
        return self.samples[0]

    @property
    def guarantee(self) -> str:
        return self.params.guarantee

    def as_dict(self) -> dict:
        out = {
            "i_final": self.i_final,
            "horizon": self.horizon,
            "samples": list(self.samples),
            "stages": [s.as_dict() for s in self.stages],
            "total_steps": self.total_steps,
            "sampling_steps": self.sampling_steps,
            "capped": self.capped,
            "guarantee": self.guarantee,
            "params": self.params.as_dict(),
            "seed": self.seed,
        }
        out.update(self.extra)
        return out


def run_experiment(
    oracle: ChainOracle,
    i: int,
    params: ParamSet,
    seed: int,
    experiment: int = 0,
    counter: Optional[StepCounter] = None,
    stream_ids=None,
) -> CollisionReport:
    """One collision experiment: ``l`` copies for ``2**i`` steps, then judge Z.

    ``stream_ids`` overrides the per-copy streams (a test hook).
    """
    if stream_ids is None:
        stream_ids = [pack_stream_id(i, experiment, c) for c in range(params.l)]
    ends = simulate_batch(oracle, 1 << i, seed, np.asarray(stream_ids, dtype=np.uint64), counter)
    return collision_count(ends.tolist()).judge(params.threshold)


def _experiment_block(oracle, i, params, seed, experiments, counter) -> list[int]:
    ids = pack_stream_ids(i, np.asarray(experiments)[:, None], np.arange(params.l)[None, :])
    ends = simulate_batch(oracle, 1 << i, seed, ids.ravel(), counter)
    return [collision_count_array(row) for row in ends.reshape(len(experiments), params.l)]


def run_stage(
    oracle: ChainOracle,
    i: int,
    params: ParamSet,
    seed: int,
    counter: Optional[StepCounter] = None,
    workers: int = 1,
) -> StageRecord:
    """Run the ``m`` experiments of stage ``i`` and take the majority vote.

    Experiments are simulated in blocks; every copy has its own stream so the
    outcome does not depend on blocking or on ``workers``.
    """
    if not 1 <= i <= MAX_STAGE:
        raise ValueError(f"stage index must lie in [1, {MAX_STAGE}], got {i}")
    local = StepCounter()
    per_block = max(1, MAX_BATCH_COPIES // params.l)
    blocks = [list(range(s, min(s + per_block, params.m))) for s in range(0, params.m, per_block)]
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(lambda b: _experiment_block(oracle, i, params, seed, b, local), blocks)
            )
    else:
        parts = [_experiment_block(oracle, i, params, seed, b, local) for b in blocks]
    z_values = [z for part in parts for z in part]
    threshold = params.threshold
    successes = sum(1 for z in z_values if z <= threshold)
    if counter is not None:
        counter.charge(local.total)
    return StageRecord(
        i=i,
        horizon=1 << i,
        experiments=params.m,
        successes=successes,
        z_values=z_values,
        steps_charged=local.total,
        threshold=threshold,
        stop=2 * successes >= params.m or i == params.i_max,
    )


def sample_many(
    oracle: ChainOracle,
    epsilon: float,
    k: int,
    scale: float = 1.0,
    seed: Optional[int] = None,
    constants: str = "sound",
    workers: int = 1,
) -> EstimatorResult:
    """Fix the horizon with the collision vote, then draw ``k`` fresh samples."""
    if k < 1:
        raise ValueError(f"need at least one sample, got k={k}")
    if seed is None:
        seed = secrets.randbits(64)
    seed &= MASK64
    params = derive_params(oracle.n, epsilon, scale, constants)
    counter = StepCounter()
    stages = []
    i = 0
    while True:
        i += 1
        record = run_stage(oracle, i, params, seed, counter, workers)
        stages.append(record)
        log.debug("stage %d: %d/%d successes", i, record.successes, record.experiments)
        if record.stop:
            break
    capped = 2 * record.successes < params.m
    horizon = 1 << i
    before = counter.total
    ids = pack_stream_ids(i, 0, np.arange(k), phase=1)
    ends = simulate_batch(oracle, horizon, seed, ids, counter)
    return EstimatorResult(
        i_final=i,
        horizon=horizon,
        samples=[int(x) for x in ends],
        stages=stages,
        total_steps=counter.total,
        capped=capped,
        params=params,
        seed=seed,
        sampling_steps=counter.total - before,
    )


def sample_stationary(
    oracle: ChainOracle,
    epsilon: float,
    scale: float = 1.0,
    seed: Optional[int] = None,
    constants: str = "sound",
    workers: int = 1,
) -> EstimatorResult:
    """Near-uniform sample from a random walk on a regular connected graph."""
    return sample_many(oracle, epsilon, 1, scale, seed, constants, workers)
