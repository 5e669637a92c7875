"""Exit criteria, one test per criterion, each with its runtime budget.

Run ``pytest tests/test_acceptance.py -v`` (a PASS/FAIL line per criterion is
printed in the terminal summary).
"""

import contextlib
import math
import statistics
import time

import numpy as np
import pytest

from birthday_mcmc import graphs, oracle, stats
from birthday_mcmc.chain import simulate_batch
from birthday_mcmc.estimator import derive_params, sample_many, sample_stationary

from conftest import ACCEPTANCE_RESULTS, built_in_graphs


@contextlib.contextmanager
def criterion(label, budget_s=None):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        if budget_s is not None:
            assert elapsed < budget_s, f"took {elapsed:.2f}s, budget {budget_s}s"
    except BaseException:
        ACCEPTANCE_RESULTS.append(f"FAIL  {label}")
        print(f"FAIL  {label}")
        raise
    ACCEPTANCE_RESULTS.append(f"PASS  {label}  ({elapsed:.1f}s)")
    print(f"PASS  {label}  ({elapsed:.1f}s)")


def test_01_moment_exactness():
    with criterion("1 collision moments: exact mean, variance bound", budget_s=5):
        rng = np.random.default_rng(1)
        for n in (2, 3, 4):
            for l in (2, 3, 4):
                for _ in range(100):
                    p = rng.dirichlet(np.ones(n))
                    p /= p.sum()
                    mean, var = oracle.enumerate_collision_moments(p, l)
                    e = math.comb(l, 2) * float(p @ p)
                    assert abs(mean - e) <= 1e-12
                    assert var <= e * (1 + 2 * math.sqrt(n) / l * e)


def test_02_collision_count_equivalence():
    with criterion("2 grouped collision count == naive pair count", budget_s=2):
        rng = np.random.default_rng(2)
        for _ in range(1000):
            l = int(rng.integers(0, 201))
            samples = rng.integers(0, int(rng.integers(1, 300)), size=l)
            naive = int(np.triu(samples[:, None] == samples[None, :], k=1).sum())
            assert stats.collision_count(samples.tolist()).z == naive


def test_03_identities():
    with criterion("3 inflation identity and cube bound", budget_s=2):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            n = int(rng.integers(1, 257))
            p = rng.dirichlet(np.full(n, rng.uniform(0.05, 2)))
            p /= p.sum()
            s2 = float(p @ p)
            assert abs(n * s2 - (1 + stats.l2_deviation_sq(p))) <= 1e-10
            assert float(np.sum(p**3)) <= math.sqrt(n) * s2 * s2 + 1e-10


def test_04_constants():
    with criterion("4 variance-budget constants over (n, eps) grid", budget_s=1):
        ns = np.unique(np.round(np.logspace(np.log10(2), 6, 60)).astype(int))
        for n in ns:
            for eps in (0.05, 0.1, 0.25, 0.5, 1.0):
                p = derive_params(int(n), eps)
                assert 2 * math.sqrt(n) / p.l <= p.delta**2 / 512
                assert (p.l - 1) ** 2 / (2 * n) >= 512 / p.delta**2


def test_05_full_constants_complete16():
    with criterion("5 full constants on lazy K_16: >= 99/100 runs within delta"):
        g = graphs.complete_graph(16)
        o = graphs.as_oracle(g)
        P = oracle.lazy_matrix(g)
        good = 0
        for seed in range(100):
            r = sample_stationary(o, 1.0, seed=seed)
            assert r.params.scale == 1.0 and r.total_steps < 10**8
            if oracle.deviation_sq_at(P, o.x0, r.horizon) <= r.params.delta:
                good += 1
        assert good >= 99


def test_06_slow_chain_audit():
    with criterion("6 glued cliques need a longer horizon than K_32 (scale 0.05)"):
        slow_g, fast_g = graphs.glued_cliques(32), graphs.complete_graph(32)
        slow_P = oracle.lazy_matrix(slow_g)
        slow, fast = [], []
        for seed in range(20):
            r = sample_stationary(graphs.as_oracle(slow_g), 1.0, scale=0.05, seed=seed)
            assert r.guarantee == "voided_by_scale"
            dev = oracle.deviation_sq_at(slow_P, 0, r.horizon)
            print(f"  glued:32 seed {seed:2d}  i'={r.i_final:2d}  deviation^2={dev:.4g}")
            slow.append(r.i_final)
            fast.append(sample_stationary(graphs.as_oracle(fast_g), 1.0, scale=0.05, seed=seed).i_final)
        assert statistics.median(slow) > statistics.median(fast)


def test_07_oracle_invariants():
    with criterion("7 exact oracle invariants on every family, n = 4..64", budget_s=60):
        for n in (4, 8, 16, 32, 64):
            caps = {eps: derive_params(n, eps) for eps in (0.25, 1.0)}
            for g in built_in_graphs(n):
                P = oracle.lazy_matrix(g)
                assert np.abs(P.sum(axis=0) - 1).max() <= 1e-12
                assert np.abs(P.sum(axis=1) - 1).max() <= 1e-12
                assert np.array_equal(P, P.T)
                spec = oracle.spectral_check(P)
                assert spec.min_eigenvalue >= -1 + 2 / n - 1e-12
                assert spec.gap >= 1 / n**4
                horizon = 2 * oracle.exact_tau_mix(P)
                M = np.eye(n)
                prev = np.full(n, np.inf)
                for _ in range(horizon + 1):
                    cur = np.sqrt(np.sum((n * M - 1) ** 2, axis=1) / n)
                    assert np.all(cur <= prev + 1e-12)
                    prev, M = cur, M @ P
                for params in caps.values():
                    assert oracle.exact_tau(P, 0, (params.delta / 2) ** 2) <= params.a_n


def test_08_simulation_vs_exact():
    with criterion("8 simulated hypercube(4) walks match exact laws in TV", budget_s=60):
        g = graphs.hypercube(4)
        o = graphs.as_oracle(g)
        P = oracle.lazy_matrix(g)
        for t in (1, 2, 4, 8):
            ends = simulate_batch(o, t, 800 + t, np.arange(100_000))
            emp = stats.empirical_distribution(ends, g.n)
            exact = oracle.evolve(oracle.point_mass(g.n, 0), P, t)
            assert stats.tv_distance(emp, exact) <= 0.02


def test_09_sqrt_n_samples():
    with criterion("9 sqrt(n) samples add <= 10% to total steps on K_16"):
        o = graphs.as_oracle(graphs.complete_graph(16))
        for seed in range(5):
            one = sample_many(o, 1.0, 1, seed=seed)
            many = sample_many(o, 1.0, math.isqrt(15) + 1, seed=seed)
            assert len(many.samples) == 4
            assert many.total_steps <= 1.1 * one.total_steps


def test_10_runtime_scaling():
    with criterion("10 total steps on K_n track sqrt(n) log n within a factor 3"):
        ratios = []
        for n in (16, 64, 256):
            o = graphs.as_oracle(graphs.complete_graph(n))
            steps = [sample_stationary(o, 1.0, scale=0.01, seed=s).total_steps for s in range(10)]
            ratios.append(statistics.mean(steps) / (math.sqrt(n) * math.log(n)))
        print("  steps / (sqrt(n) ln n):", [f"{r:.2f}" for r in ratios])
        assert max(ratios) / min(ratios) <= 3


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
