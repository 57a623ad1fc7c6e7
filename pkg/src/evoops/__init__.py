"""Self-adaptive evolutionary optimization with operators evolved as trees.

The package couples a population of candidate solutions with a second
population of genetic operators, each operator a small tree over eight
atomic recombination/mutation primitives. Operator application rates adapt
from per-generation voting, and the operator trees themselves are
recombined and mutated between generations. Fixed-operator baselines
(a classic GA and per-individual rate adaptation over the atomic set),
fifteen real-valued benchmark functions, tree-distance analysis with 2D
embeddings, and Wilcoxon signed-rank comparisons round out the toolkit.
"""

from .analysis import (
    DistanceMatrix,
    Embedding2D,
    RateTrajectories,
    pairwise_distances,
    rate_trajectories,
    smacof_embed,
    tree_edit_distance,
)
from .atomic_ops import ATOMIC_OPS, AtomicOpDescriptor, OpKind, apply_atomic, atomic_by_id
from .benchmarks import (
    BenchmarkSpec,
    KnownOptimum,
    OptimumCheck,
    Variant,
    benchmark_spec,
    evaluate,
    find_benchmark,
    list_benchmarks,
    make_problem,
    verify_known_optima,
)
from .cli import ExperimentConfig, ResultStore, derive_seed, main, report, run_experiment
from .core import (
    Direction,
    Individual,
    Population,
    Problem,
    RandomStream,
    better,
    better_or_equal,
    clamp,
    init_population,
    make_individual,
)
from .engine import (
    Algorithm,
    EngineConfig,
    GenerationRecord,
    OperatorPool,
    OperatorSelection,
    RunTrace,
    run,
)
from .optree import (
    OperatorTree,
    OpNode,
    evaluate_tree,
    mutate_tree,
    parse_tree,
    random_tree,
    recombine_trees,
    serialize_tree,
    tree_depth,
    tree_size,
    validate_tree,
)
from .stats import (
    ComparisonReport,
    PairedSample,
    WilcoxonResult,
    compare_tables,
    wilcoxon_signed_rank,
)

__version__ = "0.1.0"

__all__ = [
    "ATOMIC_OPS",
    "Algorithm",
    "AtomicOpDescriptor",
    "BenchmarkSpec",
    "ComparisonReport",
    "Direction",
    "DistanceMatrix",
    "Embedding2D",
    "EngineConfig",
    "ExperimentConfig",
    "GenerationRecord",
    "Individual",
    "KnownOptimum",
    "OpKind",
    "OpNode",
    "OperatorPool",
    "OperatorSelection",
    "OperatorTree",
    "OptimumCheck",
    "PairedSample",
    "Population",
    "Problem",
    "RandomStream",
    "RateTrajectories",
    "ResultStore",
    "RunTrace",
    "Variant",
    "WilcoxonResult",
    "apply_atomic",
    "atomic_by_id",
    "benchmark_spec",
    "better",
    "better_or_equal",
    "clamp",
    "compare_tables",
    "derive_seed",
    "evaluate",
    "evaluate_tree",
    "find_benchmark",
    "init_population",
    "list_benchmarks",
    "main",
    "make_individual",
    "make_problem",
    "mutate_tree",
    "pairwise_distances",
    "parse_tree",
    "random_tree",
    "rate_trajectories",
    "recombine_trees",
    "report",
    "run",
    "run_experiment",
    "serialize_tree",
    "smacof_embed",
    "tree_depth",
    "tree_edit_distance",
    "tree_size",
    "validate_tree",
    "verify_known_optima",
    "wilcoxon_signed_rank",
]
