"""GA, PSO and PSO-GA hybrid optimizers with a benchmark harness."""
from .benchmarks import BENCHMARK_NAMES, BenchmarkSpec, DomainError, make_benchmark, make_random_rotation
from .core import (BudgetExhausted, ConfigError, ContractError, EvaluationBudget, Individual,
                   InitializationError, ObjectiveFunction, OptimizerState, Phase, Population,
                   SearchSpace, clamp_to_bounds, derive_seed, make_rng, update_global_best)
from .ga import GA, GaConfig
from .harness import (ALGORITHM_NAMES, DEFAULT_PARAMETERS, ExperimentConfig, RunRecord, build_algorithm,
                      load_config, minimize, paper_config, run_algorithm, run_cell, run_experiment, summarize)
from .hybrids import PGCHEA, PGPHEA, PGSHEA, HybridConfig
from .pso import PSO, PsoConfig
from .variation import VariationParams

__version__ = "0.1.0"
