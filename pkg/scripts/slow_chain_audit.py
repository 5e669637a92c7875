"""Horizon chosen by the sampler on glued cliques vs the complete graph,
audited against the exact distribution at that horizon.

    python scripts/slow_chain_audit.py --n 32 --runs 20 --scale 0.05
"""

import argparse
import statistics

from birthday_mcmc import graphs, oracle
from birthday_mcmc.estimator import sample_stationary


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--scale", type=float, default=0.05)
    ap.add_argument("--epsilon", type=float, default=1.0)
    args = ap.parse_args()

    print("family,seed,i_final,horizon,total_steps,deviation_sq,tau_mix")
    for g in (graphs.glued_cliques(args.n), graphs.complete_graph(args.n)):
        P = oracle.lazy_matrix(g)
        tau_mix = oracle.exact_tau_mix(P)
        finals = []
        for seed in range(args.runs):
            r = sample_stationary(graphs.as_oracle(g), args.epsilon, args.scale, seed)
            dev = oracle.deviation_sq_at(P, 0, r.horizon)
            finals.append(r.i_final)
            print(f"{g.name},{seed},{r.i_final},{r.horizon},{r.total_steps},{dev:.6g},{tau_mix}")
        print(f"# {g.name}: median i' = {statistics.median(finals)}")


if __name__ == "__main__":
    main()
