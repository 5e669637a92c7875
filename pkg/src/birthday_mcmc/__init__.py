"""Birthday-collision mixing-time detection for random walks on regular graphs."""

from .chain import ChainOracle, StepCounter, lazy_step, simulate, simulate_batch, uniform_oracle
from .estimator import (
    EstimatorResult,
    ParamSet,
    StageRecord,
    derive_params,
    run_experiment,
    run_stage,
    sample_many,
    sample_stationary,
)
from .graphs import (
    RegularGraph,
    as_oracle,
    complete_graph,
    cycle,
    from_edge_list,
    glued_cliques,
    hypercube,
    random_regular,
)
from .rng import RandomStream

__all__ = [
    "ChainOracle",
    "EstimatorResult",
    "ParamSet",
    "RandomStream",
    "RegularGraph",
    "StageRecord",
    "StepCounter",
    "as_oracle",
    "complete_graph",
    "cycle",
    "derive_params",
    "from_edge_list",
    "glued_cliques",
    "hypercube",
    "lazy_step",
    "random_regular",
    "run_experiment",
    "run_stage",
    "sample_many",
    "sample_stationary",
    "simulate",
    "simulate_batch",
    "uniform_oracle",
]
