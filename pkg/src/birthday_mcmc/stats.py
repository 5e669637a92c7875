"""Collision statistic, its threshold, moment formulas and distances."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

NORMALIZATION_TOL = 1e-12


@dataclass
class CollisionReport:
    """Pairwise match count among one experiment's samples."""

    z: int
    multiplicities: dict[int, int] = field(repr=False)
    threshold: Optional[Fraction] = None
    success: Optional[bool] = None

    def judge(self, threshold: Fraction) -> "CollisionReport":
        self.threshold = threshold
        self.success = self.z <= threshold
        return self


def as_distribution(p) -> np.ndarray:
    """Validate and return ``p`` as a float probability vector."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("distribution must be a nonempty 1-d vector")
    if np.any(arr < 0):
        raise ValueError("distribution has negative entries")
    if abs(arr.sum() - 1.0) > NORMALIZATION_TOL * max(1, arr.size):
        raise ValueError(f"distribution sums to {arr.sum()!r}, not 1")
    return arr


def collision_count(samples) -> CollisionReport:
    """Number of unordered pairs j < k with samples[j] == samples[k]."""
    counts = Counter(int(s) for s in samples)
    z = sum(c * (c - 1) // 2 for c in counts.values())
    return CollisionReport(z=z, multiplicities=dict(counts))


def collision_count_array(samples: np.ndarray) -> int:
    """Same count as :func:`collision_count` for an integer array."""
    _, counts = np.unique(np.asarray(samples), return_counts=True)
    counts = counts.astype(np.int64)
    return int((counts * (counts - 1) // 2).sum())


def success_threshold(l: int, n: int, delta: float) -> Fraction:
    """(1 + delta/2) * C(l, 2) / n, exactly."""
    if l < 2:
        raise ValueError(f"need at least two copies, got l={l}")
    if n < 1:
        raise ValueError(f"need at least one state, got n={n}")
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return (1 + Fraction(delta) / 2) * Fraction(l * (l - 1), 2 * n)


def collision_probability(p) -> float:
    p = np.asarray(p, dtype=np.float64)
    return float(np.dot(p, p))


def expected_z(p, l: int) -> float:
    if l < 2:
        raise ValueError(f"need at least two copies, got l={l}")
    return math.comb(l, 2) * collision_probability(p)


def variance_bound(expected: float, n: int, l: int) -> float:
    """Upper bound E(Z) * (1 + (2 sqrt(n) / l) * E(Z)) on var(Z)."""
    return expected * (1 + 2 * math.sqrt(n) / l * expected)


def l2_deviation_sq(p) -> float:
    """Squared weighted L2 norm of n*p - 1, i.e. the chi-square distance to uniform."""
    p = np.asarray(p, dtype=np.float64)
    n = p.size
    return float(np.sum((n * p - 1.0) ** 2) / n)


def l2_deviation(p) -> float:
    return math.sqrt(l2_deviation_sq(p))


chi2_from_uniform = l2_deviation_sq


def l1_deviation(p) -> float:
    """Weighted L1 norm of n*p - 1 (sum of (1/n)|n p_x - 1|)."""
    p = np.asarray(p, dtype=np.float64)
    n = p.size
    return float(np.sum(np.abs(n * p - 1.0)) / n)


def tv_distance(p, q) -> float:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"size mismatch: {p.shape} vs {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


def uniform(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def empirical_distribution(samples, n: int) -> np.ndarray:
    counts = np.bincount(np.asarray(samples, dtype=np.int64), minlength=n)
    return counts / counts.sum()
