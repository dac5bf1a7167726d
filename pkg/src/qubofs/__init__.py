"""Feature selection by mutual information and QUBO minimization.

Pipeline: quantile-bin a dataset, estimate per-feature importance and
pairwise redundancy (plug-in mutual information), assemble the
alpha-parameterized QUBO, and binary-search alpha until the minimizer
selects exactly the requested number of features.  Exhaustive, simulated
annealing, and tabu-decomposition solvers share the same interface, and
instances export to JSON, coordinate text, or Ising form.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .data import (
    Dataset,
    DiscretizedDataset,
    SynthSpec,
    discretize,
    gen_correlation_matrix,
    gen_synth,
    load_csv,
    write_csv,
)
from .errors import (
    CovarianceError,
    CsvFormatError,
    EnumerationLimitError,
    NonMonotoneTraceError,
    QubofsError,
    UnreachableKError,
)
from .eval import FeatureSubset, distance_graph, edit_distance, recovery_report
from .infotheory import ImportanceVector, RedundancyMatrix, importance, redundancy
from .qfs import SelectionResult, select_k, sweep_alpha, verify_proposition1
from .qubo import (
    IsingInstance,
    QuboInstance,
    apply_epsilon_mu,
    build,
    build_penalty,
    energy,
    ising_energy,
    to_ising,
)
from .solve import (
    SampleSet,
    SolverConfig,
    solve_annealing,
    solve_exhaustive,
    solve_sampling,
    solve_tabu_decomposed,
    summarize,
)

__all__ = [
    "BACKEND",
    "CovarianceError",
    "CsvFormatError",
    "Dataset",
    "DiscretizedDataset",
    "EnumerationLimitError",
    "FeatureSubset",
    "ImportanceVector",
    "IsingInstance",
    "NonMonotoneTraceError",
    "QuboInstance",
    "QubofsError",
    "RedundancyMatrix",
    "SampleSet",
    "SelectionResult",
    "SolverConfig",
    "SynthSpec",
    "UnreachableKError",
    "__version__",
    "apply_epsilon_mu",
    "build",
    "build_penalty",
    "discretize",
    "distance_graph",
    "edit_distance",
    "energy",
    "gen_correlation_matrix",
    "gen_synth",
    "importance",
    "ising_energy",
    "load_csv",
    "recovery_report",
    "redundancy",
    "select_k",
    "solve_annealing",
    "solve_exhaustive",
    "solve_sampling",
    "solve_tabu_decomposed",
    "summarize",
    "sweep_alpha",
    "to_ising",
    "verify_proposition1",
    "write_csv",
]
