"""qubokit: hybrid classical/quantum-style QUBO solver workflows.

Core pieces: a sparse QUBO model, tabu/simulated-annealing engines,
pluggable sampler backends, a decomposition solver, cooperating-branch
portfolio workflows, a branch-and-bound solver with a proven optimality
gap, problem encoders (TSP/VRP/BPP/MCP), and a benchmark harness.
"""

from .qubo import (
    Bits,
    QuboModel,
    SampleRecord,
    SampleSet,
    as_bits,
    delta_energy_flip,
    energy,
    fingerprint,
)
from .heuristics import SaConfig, TabuConfig, sa_sample, tabu_search
from .backends import (
    AnnealBackend,
    ExactBackend,
    RemoteBackend,
    RemoteSamplerConfig,
    SamplerBackend,
    anneal_backend,
    backend_from_spec,
    exact_solve,
    remote_sample,
)
from .decomposer import DecomposerConfig, clamp, qbsolv_solve, variable_impact
from .portfolio import (
    BranchKind,
    BranchSpec,
    Classification,
    PortfolioConfig,
    Role,
    SolverTag,
    hss_solve,
    kerberos_solve,
    registry_lookup,
)
from .bnb import (
    BnbConfig,
    BnbResult,
    branch_and_bound,
    partial_lower_bound,
)
from .harness import (
    RunConfig,
    RunStats,
    emit,
    gen_micro_instances,
    native_optimum,
    run_benchmark,
)

__version__ = "0.1.0"

__all__ = [
    "Bits",
    "QuboModel",
    "SampleRecord",
    "SampleSet",
    "as_bits",
    "delta_energy_flip",
    "energy",
    "fingerprint",
    "SaConfig",
    "TabuConfig",
    "sa_sample",
    "tabu_search",
    "AnnealBackend",
    "ExactBackend",
    "RemoteBackend",
    "RemoteSamplerConfig",
    "SamplerBackend",
    "anneal_backend",
    "backend_from_spec",
    "exact_solve",
    "remote_sample",
    "DecomposerConfig",
    "clamp",
    "qbsolv_solve",
    "variable_impact",
    "BranchKind",
    "BranchSpec",
    "Classification",
    "PortfolioConfig",
    "Role",
    "SolverTag",
    "hss_solve",
    "kerberos_solve",
    "registry_lookup",
    "BnbConfig",
    "BnbResult",
    "branch_and_bound",
    "partial_lower_bound",
    "RunConfig",
    "RunStats",
    "emit",
    "gen_micro_instances",
    "native_optimum",
    "run_benchmark",
    "__version__",
]
