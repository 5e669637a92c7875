"""Command-line harness: sample | verify | lemma-check | distinguish.

Exit codes: 0 ok, 2 configuration error, 3 invalid graph, 4 violated invariant.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import secrets
import sys
from pathlib import Path

import numpy as np

from . import graphs, oracle, stats
from .estimator import derive_params, run_stage, sample_many

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GRAPH = 3
EXIT_INVARIANT = 4
SCHEMA = "1"
CSV_COLUMNS = ["stage_i", "horizon", "experiments", "successes", "mean_z", "threshold", "steps_charged"]

log = logging.getLogger("birthday_mcmc")


class ConfigError(Exception):
    pass


def parse_graph_spec(spec: str, seed: int = 0) -> graphs.RegularGraph:
    """Build a graph from ``family:params`` (complete:16, glued:32, cycle:9,
    hypercube:6, regular:100,3[,graph_seed]) or ``edgelist:path``.

    Raises :class:`ConfigError` for a malformed spec and
    :class:`graphs.GraphError` when an edge-list file is not a valid graph.
    """
    family, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise ConfigError(f"graph spec {spec!r} is not of the form family:params")
    if family == "edgelist":
        try:
            text = Path(arg).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read edge list {arg!r}: {exc}") from None
        return graphs.from_edge_list(text)
    try:
        nums = [int(v) for v in arg.split(",")]
    except ValueError:
        raise ConfigError(f"graph parameters must be integers, got {arg!r}") from None
    builders = {
        "complete": (graphs.complete_graph, 1),
        "glued": (graphs.glued_cliques, 1),
        "cycle": (graphs.cycle, 1),
        "hypercube": (graphs.hypercube, 1),
    }
    try:
        if family in builders:
            build, arity = builders[family]
            if len(nums) != arity:
                raise ConfigError(f"{family} takes {arity} parameter(s), got {len(nums)}")
            return build(*nums)
        if family == "regular":
            if len(nums) not in (2, 3):
                raise ConfigError("regular takes n,d or n,d,graph_seed")
            n, d = nums[:2]
            return graphs.random_regular(n, d, nums[2] if len(nums) == 3 else seed)
    except graphs.GraphGenerationError:
        raise
    except graphs.GraphError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown graph family {family!r}")


def _load_config(path):
    if path is None:
        return {}
    import tomli

    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except (OSError, tomli.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot load config {path!r}: {exc}") from None
    return {k.replace("-", "_"): v for k, v in data.items()}


def _resolve(args, defaults: dict) -> argparse.Namespace:
    """Fill unset flags from the config file, then from ``defaults``."""
    config = _load_config(getattr(args, "config", None))
    unknown = set(config) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged = vars(args).copy()
    for key, default in defaults.items():
        if merged.get(key) is None:
            merged[key] = config.get(key, default)
    return argparse.Namespace(**merged)


def _resolve_seed(seed):
    if seed is None:
        seed = secrets.randbits(64)
        print(f"seed: {seed}", file=sys.stderr)
    return int(seed)


def _dump_json(payload, path):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def stage_table(result) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s in result.stages:
        writer.writerow(
            [s.i, s.horizon, s.experiments, s.successes, repr(s.mean_z), repr(float(s.threshold)), s.steps_charged]
        )
    return buf.getvalue()


def _check_domains(epsilon, scale):
    if not 0 < epsilon <= 1:
        raise ConfigError(f"epsilon must lie in (0, 1], got {epsilon}")
    if not 0 < scale <= 1:
        raise ConfigError(f"scale must lie in (0, 1], got {scale}")


SAMPLE_DEFAULTS = {
    "graph": None,
    "x0": 0,
    "epsilon": 1.0,
    "scale": 1.0,
    "seed": None,
    "samples": 1,
    "output": None,
    "csv": None,
    "verify": False,
    "constants": "sound",
    "workers": 1,
}


def cmd_sample(args) -> int:
    cfg = _resolve(args, SAMPLE_DEFAULTS)
    if cfg.graph is None:
        raise ConfigError("--graph is required")
    _check_domains(cfg.epsilon, cfg.scale)
    if cfg.samples < 1:
        raise ConfigError(f"--samples must be positive, got {cfg.samples}")
    seed = _resolve_seed(cfg.seed)
    g = parse_graph_spec(cfg.graph, seed)
    if not 0 <= cfg.x0 < g.n:
        raise ConfigError(f"x0={cfg.x0} outside [0, {g.n})")
    if cfg.verify and g.n > oracle.MAX_VERIFY_STATES:
        raise ConfigError(f"--verify needs n <= {oracle.MAX_VERIFY_STATES}")
    result = sample_many(
        graphs.as_oracle(g, cfg.x0), cfg.epsilon, cfg.samples, cfg.scale, seed, cfg.constants, cfg.workers
    )
    payload = {"schema": SCHEMA, "command": "sample", "graph": cfg.graph, "n": g.n, "d": g.d, "x0": cfg.x0}
    payload.update(result.as_dict())
    if cfg.verify:
        P = oracle.lazy_matrix(g)
        mu = oracle.point_mass(g.n, cfg.x0) @ oracle.matrix_power(P, result.horizon)
        dev_sq = stats.l2_deviation_sq(mu)
        payload["verify"] = {
            "deviation_sq": dev_sq,
            "deviation": math.sqrt(dev_sq),
            "tv_to_uniform": stats.tv_distance(mu, stats.uniform(g.n)),
            "within_delta": dev_sq <= result.params.delta,
        }
    _dump_json(payload, cfg.output)
    csv_path = cfg.csv
    if csv_path is None and cfg.output not in (None, "-"):
        csv_path = Path(cfg.output).with_suffix(".csv")
    if csv_path is not None:
        Path(csv_path).write_text(stage_table(result), encoding="utf-8")
    return EXIT_OK


VERIFY_DEFAULTS = {"graph": None, "x0": 0, "epsilon": 1.0, "seed": 0, "output": None}


def verify_graph(g: graphs.RegularGraph, x0: int = 0, epsilon: float = 1.0) -> list[tuple[str, object, bool]]:
    """Exact invariant checks for the lazy walk on ``g``: (name, value, ok) rows."""
    n = g.n
    P = oracle.lazy_matrix(g)
    rows = []
    row_err = float(np.abs(P.sum(axis=1) - 1).max())
    col_err = float(np.abs(P.sum(axis=0) - 1).max())
    rows.append(("row_sums", row_err, row_err <= 1e-12))
    rows.append(("column_sums", col_err, col_err <= 1e-12))
    asym = float(np.abs(P - P.T).max())
    rows.append(("symmetric", asym, asym <= oracle.SYMMETRY_TOL))
    spec = oracle.spectral_check(P)
    rows.append(("min_eigenvalue", spec.min_eigenvalue, spec.min_eigenvalue >= -1 + 2 / n - 1e-12))
    rows.append(("spectral_gap", spec.gap, spec.gap >= 1 / n**4))
    tau_mix = oracle.exact_tau_mix(P)
    rows.append(("tau_mix", tau_mix, True))
    M = np.eye(n)
    prev = oracle._row_deviation_sq(M)
    worst_rise = 0.0
    for _ in range(2 * tau_mix):
        M = M @ P
        cur = oracle._row_deviation_sq(M)
        worst_rise = max(worst_rise, float((np.sqrt(cur) - np.sqrt(prev)).max()))
        prev = cur
    rows.append(("monotone_decay", worst_rise, worst_rise <= 1e-12))
    params = derive_params(n, epsilon)
    tau_cap = oracle.exact_tau(P, x0, (params.delta / 2) ** 2)
    rows.append(("tau_half_delta_le_a_n", tau_cap, tau_cap <= params.a_n))
    return rows


def cmd_verify(args) -> int:
    cfg = _resolve(args, VERIFY_DEFAULTS)
    if cfg.graph is None:
        raise ConfigError("--graph is required")
    _check_domains(cfg.epsilon, 1.0)
    g = parse_graph_spec(cfg.graph, int(cfg.seed))
    if g.n > oracle.MAX_VERIFY_STATES:
        raise ConfigError(f"verify needs n <= {oracle.MAX_VERIFY_STATES}, got {g.n}")
    if not 0 <= cfg.x0 < g.n:
        raise ConfigError(f"x0={cfg.x0} outside [0, {g.n})")
    rows = verify_graph(g, cfg.x0, cfg.epsilon)
    print(f"{'invariant':<24} {'value':>14}  result")
    for name, value, ok in rows:
        print(f"{name:<24} {value:>14.6g}  {'PASS' if ok else 'FAIL'}")
    if cfg.output is not None:
        _dump_json(
            {
                "schema": SCHEMA,
                "command": "verify",
                "graph": cfg.graph,
                "checks": [{"name": n_, "value": v, "pass": ok} for n_, v, ok in rows],
            },
            cfg.output,
        )
    return EXIT_OK if all(ok for _, _, ok in rows) else EXIT_INVARIANT


LEMMA_DEFAULTS = {"n": 2, "l": 2, "trials": 100, "seed": 0}


def lemma_check(n: int, l: int, trials: int, seed: int) -> dict:
    """Mean/variance identities and bounds on ``trials`` random distributions."""
    if n < 1 or l < 2 or trials < 1:
        raise ConfigError(f"need n >= 1, l >= 2, trials >= 1; got n={n}, l={l}, trials={trials}")
    if n**l > oracle.MAX_ENUMERATION:
        raise ConfigError(f"n**l = {n**l} exceeds the enumeration cap {oracle.MAX_ENUMERATION}")
    rng = np.random.default_rng(seed)
    worst_mean_err = 0.0
    worst_var_slack = math.inf
    worst_cube_slack = math.inf
    for _ in range(trials):
        p = rng.dirichlet(np.ones(n))
        p /= p.sum()
        mean, var = oracle.enumerate_collision_moments(p, l)
        expected = stats.expected_z(p, l)
        worst_mean_err = max(worst_mean_err, abs(mean - expected))
        worst_var_slack = min(worst_var_slack, stats.variance_bound(expected, n, l) - var)
        s2 = float(p @ p)
        cube = float(np.sum(p**3))
        worst_cube_slack = min(worst_cube_slack, math.sqrt(n) * s2 * s2 - p.max() * s2, p.max() * s2 - cube)
    ok = worst_mean_err <= 1e-12 and worst_var_slack >= -1e-12 and worst_cube_slack >= -1e-12
    return {
        "n": n,
        "l": l,
        "trials": trials,
        "worst_mean_error": worst_mean_err,
        "worst_variance_slack": worst_var_slack,
        "worst_cube_slack": worst_cube_slack,
        "pass": ok,
    }


def cmd_lemma_check(args) -> int:
    cfg = _resolve(args, LEMMA_DEFAULTS)
    report = lemma_check(cfg.n, cfg.l, cfg.trials, int(cfg.seed))
    for key in ("worst_mean_error", "worst_variance_slack", "worst_cube_slack"):
        print(f"{key:<22} {report[key]:.3e}")
    print("PASS" if report["pass"] else "FAIL")
    return EXIT_OK if report["pass"] else EXIT_INVARIANT


DISTINGUISH_DEFAULTS = {"n": 32, "seed": 0, "budget": 100, "scale": 0.05, "epsilon": 1.0, "stage": 1, "output": None}


def distinguish(n: int, seed: int, budget: int, scale: float = 0.05, epsilon: float = 1.0, stage: int = 1) -> dict:
    """Stage-``stage`` collision experiments on K_n and on glued cliques with equal budgets."""
    if budget < 1:
        raise ConfigError(f"budget must be positive, got {budget}")
    if stage < 1:
        raise ConfigError(f"stage must be positive, got {stage}")
    try:
        families = {"complete": graphs.complete_graph(n), "glued": graphs.glued_cliques(n)}
    except graphs.GraphError as exc:
        raise ConfigError(str(exc)) from None
    params = dataclasses.replace(derive_params(n, epsilon, scale), m=budget, i_max=max(stage, 1) + 1)
    report = {"schema": SCHEMA, "command": "distinguish", "n": n, "seed": seed, "params": params.as_dict()}
    for name, g in families.items():
        record = run_stage(graphs.as_oracle(g, 0), stage, params, seed)
        z = np.asarray(record.z_values, dtype=float)
        entry = {
            "z_values": record.z_values,
            "mean_z": float(z.mean()),
            "std_z": float(z.std(ddof=1)) if z.size > 1 else 0.0,
            "success_fraction": record.successes / record.experiments,
            "threshold": float(record.threshold),
            "verdict": "mixed" if 2 * record.successes >= record.experiments else "not_mixed",
        }
        if n <= oracle.MAX_VERIFY_STATES:
            P = oracle.lazy_matrix(g)
            mu = oracle.point_mass(n, 0) @ oracle.matrix_power(P, 1 << stage)
            entry["exact_expected_z"] = stats.expected_z(mu, params.l)
            entry["exact_deviation_sq"] = stats.l2_deviation_sq(mu)
        report[name] = entry
    report["separated"] = report["glued"]["mean_z"] > report["complete"]["mean_z"]
    return report


def cmd_distinguish(args) -> int:
    cfg = _resolve(args, DISTINGUISH_DEFAULTS)
    _check_domains(cfg.epsilon, cfg.scale)
    report = distinguish(cfg.n, int(cfg.seed), cfg.budget, cfg.scale, cfg.epsilon, cfg.stage)
    for name in ("complete", "glued"):
        e = report[name]
        print(
            f"{name:<9} mean Z {e['mean_z']:>12.3f}  sd {e['std_z']:>10.3f}  "
            f"success {e['success_fraction']:.2f}  {e['verdict']}",
            file=sys.stderr,
        )
    _dump_json(report, cfg.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="birthday-mcmc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="run the adaptive sampler")
    p.add_argument("--config", help="TOML file with defaults for any flag")
    p.add_argument("--graph", help="family:params or edgelist:path")
    p.add_argument("--x0", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--scale", type=float, help="shrink l and m (voids the guarantee)")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, help="number of final samples k")
    p.add_argument("--output", help="JSON path (default stdout)")
    p.add_argument("--csv", help="stage table path (default: next to --output)")
    p.add_argument("--verify", action="store_const", const=True, help="exact audit of the final horizon")
    p.add_argument("--constants", choices=["sound", "lean"])
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="exact invariant checks for one graph")
    p.add_argument("--config")
    p.add_argument("--graph")
    p.add_argument("--x0", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lemma-check", help="enumerate collision moments on random distributions")
    p.add_argument("--config")
    p.add_argument("--n", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_lemma_check)

    p = sub.add_parser("distinguish", help="collision statistic on K_n vs glued cliques")
    p.add_argument("--config")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int, help="experiments per family")
    p.add_argument("--scale", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--stage", type=int)
    p.add_argument("--output")
    p.set_defaults(func=cmd_distinguish)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except graphs.GraphError as exc:
        print(f"invalid graph: {exc}", file=sys.stderr)
        return EXIT_GRAPH


if __name__ == "__main__":
    sys.exit(main())
