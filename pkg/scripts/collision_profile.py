"""Mean collision count per horizon 2^i on one graph, simulated and exact.

    python scripts/collision_profile.py --graph glued:32 --stages 10
"""

import argparse
import dataclasses

from birthday_mcmc import oracle, stats
from birthday_mcmc.cli import parse_graph_spec
from birthday_mcmc.estimator import derive_params, run_stage
from birthday_mcmc.graphs import as_oracle


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--graph", default="glued:32")
    ap.add_argument("--stages", type=int, default=10)
    ap.add_argument("--experiments", type=int, default=20)
    ap.add_argument("--scale", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = parse_graph_spec(args.graph, args.seed)
    params = dataclasses.replace(derive_params(g.n, 1.0, args.scale), m=args.experiments, i_max=args.stages + 1)
    P = oracle.lazy_matrix(g)
    print(f"# l={params.l}, threshold={float(params.threshold):.2f}")
    print("stage_i,horizon,mean_z,exact_expected_z,deviation_sq,successes")
    for i in range(1, args.stages + 1):
        rec = run_stage(as_oracle(g), i, params, args.seed)
        mu = oracle.point_mass(g.n, 0) @ oracle.matrix_power(P, rec.horizon)
        print(
            f"{i},{rec.horizon},{rec.mean_z:.2f},{stats.expected_z(mu, params.l):.2f},"
            f"{stats.l2_deviation_sq(mu):.5f},{rec.successes}"
        )


if __name__ == "__main__":
    main()
