"""Total simulated steps on complete graphs against sqrt(n) log n.

    python scripts/runtime_scaling.py --sizes 16 64 256 1024 --scale 0.01
"""

import argparse
import math
import statistics

from birthday_mcmc import graphs
from birthday_mcmc.estimator import sample_stationary


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 64, 256, 1024])
    ap.add_argument("--scale", type=float, default=0.01)
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()

    print("n,mean_total_steps,mean_i_final,steps_over_sqrt_n_log_n")
    for n in args.sizes:
        o = graphs.as_oracle(graphs.complete_graph(n))
        runs = [sample_stationary(o, 1.0, args.scale, s) for s in range(args.seeds)]
        steps = statistics.mean(r.total_steps for r in runs)
        stage = statistics.mean(r.i_final for r in runs)
        print(f"{n},{steps:.1f},{stage:.2f},{steps / (math.sqrt(n) * math.log(n)):.3f}")


if __name__ == "__main__":
    main()
