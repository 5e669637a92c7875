"""Exact verification engine for small chains (dense double precision)."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .graphs import RegularGraph
from .stats import as_distribution

MAX_VERIFY_STATES = 4096
MAX_ENUMERATION = 10**7
_ENUM_CHUNK = 1 << 18
SYMMETRY_TOL = 1e-12


class SpectralReport(NamedTuple):
    gap: float
    min_eigenvalue: float


def lazy_matrix(g: RegularGraph) -> np.ndarray:
    """(1/n) I + (1 - 1/n) W, with W the uniform-neighbour walk on ``g``."""
    if g.n > MAX_VERIFY_STATES:
        raise ValueError(f"exact oracle is limited to n <= {MAX_VERIFY_STATES}, got {g.n}")
    walk = np.zeros((g.n, g.n))
    rows = np.repeat(np.arange(g.n), g.d)
    np.add.at(walk, (rows, g.neighbors.ravel()), 1.0 / g.d)
    return np.eye(g.n) / g.n + (1.0 - 1.0 / g.n) * walk


def point_mass(n: int, x: int) -> np.ndarray:
    p = np.zeros(n)
    p[x] = 1.0
    return p


def matrix_power(P: np.ndarray, t: int) -> np.ndarray:
    result = np.eye(P.shape[0])
    base = P
    while t:
        if t & 1:
            result = result @ base
        t >>= 1
        if t:
            base = base @ base
    return result


def evolve(p0, P: np.ndarray, t: int, method: str = "step") -> np.ndarray:
    """Distribution after ``t`` steps from ``p0``.

    ``method="step"`` multiplies one step at a time; ``"doubling"`` forms
    P**t by repeated squaring. The two are independent code paths.
    """
    if t < 0:
        raise ValueError(f"step count must be nonnegative, got {t}")
    p = as_distribution(p0)
    if method == "step":
        for _ in range(t):
            p = p @ P
        return p
    if method == "doubling":
        return p @ matrix_power(P, t)
    raise ValueError(f"unknown method {method!r}")


def _row_deviation_sq(M: np.ndarray) -> np.ndarray:
    n = M.shape[-1]
    return np.sum((n * M - 1.0) ** 2, axis=-1) / n


def deviation_sq_at(P: np.ndarray, x0: int, t: int) -> float:
    """Squared L2 deviation from uniform of the walk from ``x0`` after ``t`` steps."""
    p = point_mass(P.shape[0], x0) @ matrix_power(P, t)
    return float(_row_deviation_sq(p))


def deviation_curve(P: np.ndarray, x0: int, t_max: int) -> np.ndarray:
    """Squared deviations for t = 0..t_max from ``x0``."""
    p = point_mass(P.shape[0], x0)
    out = np.empty(t_max + 1)
    for t in range(t_max + 1):
        out[t] = _row_deviation_sq(p)
        p = p @ P
    return out


def exact_tau(P: np.ndarray, x0: int, eps_sq: float, max_steps: int = 10**6) -> int:
    """Smallest t with squared deviation from ``x0`` at most ``eps_sq``.

    Linear scan; valid because the deviation never increases for these chains.
    """
    if eps_sq <= 0:
        raise ValueError(f"threshold must be positive, got {eps_sq}")
    p = point_mass(P.shape[0], x0)
    for t in range(max_steps + 1):
        if _row_deviation_sq(p) <= eps_sq:
            return t
        p = p @ P
    raise RuntimeError(f"deviation still above {eps_sq} after {max_steps} steps")


def exact_tau_mix(P: np.ndarray, max_steps: int = 10**6) -> int:
    """Worst-start time for the squared deviation to reach e^-2."""
    n = P.shape[0]
    threshold = math.exp(-2.0)
    M = np.eye(n)
    pending = np.ones(n, dtype=bool)
    for t in range(max_steps + 1):
        pending &= _row_deviation_sq(M) > threshold
        if not pending.any():
            return t
        M = M @ P
    raise RuntimeError(f"chain not mixed after {max_steps} steps")


def spectral_check(P: np.ndarray) -> SpectralReport:
    """Spectral gap 1 - lambda_2 and smallest eigenvalue of a symmetric chain.

    For n = 1 the gap is defined as 1.
    """
    if not np.allclose(P, P.T, rtol=0.0, atol=SYMMETRY_TOL):
        raise ValueError("spectral_check needs a symmetric transition matrix")
    ev = np.linalg.eigvalsh((P + P.T) / 2)
    if ev.size == 1:
        return SpectralReport(gap=1.0, min_eigenvalue=float(ev[0]))
    return SpectralReport(gap=float(1.0 - ev[-2]), min_eigenvalue=float(ev[0]))


def enumerate_collision_moments(p, l: int) -> tuple[float, float]:
    """Exact mean and variance of the pairwise match count of ``l`` iid draws from ``p``.

    Sums over all n**l outcomes weighted by their probability.
    """
    p = as_distribution(p)
    n = p.size
    total = n**l
    if total > MAX_ENUMERATION:
        raise ValueError(f"n**l = {total} exceeds the enumeration cap {MAX_ENUMERATION}")
    pairs = [(j, k) for j in range(l) for k in range(j + 1, l)]
    powers = n ** np.arange(l, dtype=np.int64)

    def chunks():
        for start in range(0, total, _ENUM_CHUNK):
            idx = np.arange(start, min(start + _ENUM_CHUNK, total), dtype=np.int64)
            digits = (idx[:, None] // powers) % n
            weights = np.prod(p[digits], axis=1)
            z = np.zeros(idx.size)
            for j, k in pairs:
                z += digits[:, j] == digits[:, k]
            yield weights, z

    mean = sum(float(np.dot(w, z)) for w, z in chunks())
    var = sum(float(np.dot(w, (z - mean) ** 2)) for w, z in chunks())
    return mean, var
