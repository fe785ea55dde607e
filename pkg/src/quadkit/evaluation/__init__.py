from .policies import KnnPolicy, OraclePolicy, Policy, RandomPolicy, knn_bc_policy
from .harness import (
    EvalEntry,
    EvalReport,
    EvalSuite,
    build_suite,
    make_unseen_suites,
    run_suite,
    scaling_experiment,
)

__all__ = [
    "Policy",
    "OraclePolicy",
    "RandomPolicy",
    "KnnPolicy",
    "knn_bc_policy",
    "EvalEntry",
    "EvalSuite",
    "EvalReport",
    "build_suite",
    "make_unseen_suites",
    "run_suite",
    "scaling_experiment",
]
