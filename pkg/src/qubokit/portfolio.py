"""Parallel-branch hybrid workflows and the solver taxonomy registry.

Two workflows live here. ``kerberos_solve`` runs a set of branches (tabu,
simulated annealing, and a backend-fed decomposition step) concurrently for
a number of iterations; at each iteration barrier the minimum-energy result
is fed to every branch as the next start state. ``hss_solve`` runs a pool
of threads, each pairing a full-model annealing explorer with a backend
exploiter that repeatedly clamps and re-solves the incumbent's most
energetic variables.
"""

from __future__ import annotations

import enum
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .backends import AnnealBackend, SamplerBackend
from .decomposer import decomposition_round
from .errors import PortfolioError
from .heuristics import SaConfig, TabuConfig, anneal_once, geometric_schedule, tabu_search
from .qubo import QuboModel, SampleRecord, energy
from .rng import derive_rng, make_rng, random_bits, spawn_rngs

log = logging.getLogger(__name__)

# Per-iteration episode budgets keep the branches comparable in wall time.
TABU_EPISODE_SWEEPS = 100
SA_EPISODE_SWEEPS = 200


class BranchKind(enum.Enum):
    TABU = "tabu"
    SA = "sa"
    QUANTUM_DECOMPOSED = "quantum"


@dataclass(frozen=True)
class BranchSpec:
    """One branch of a parallel portfolio."""

    kind: BranchKind
    seed: int = 0
    tabu: TabuConfig | None = None
    sa: SaConfig | None = None
    backend: SamplerBackend | None = None
    fraction: float = 0.10

    def __post_init__(self) -> None:
        if self.kind is BranchKind.QUANTUM_DECOMPOSED and self.backend is None:
            raise ValueError("quantum-decomposed branch needs a backend")
        if not (0.0 < self.fraction <= 1.0):
            raise ValueError(f"fraction must be in (0, 1], got {self.fraction}")

    @classmethod
    def tabu_branch(cls, seed: int = 0, sweeps: int = TABU_EPISODE_SWEEPS) -> "BranchSpec":
        return cls(kind=BranchKind.TABU, seed=seed, tabu=TabuConfig(max_sweeps=sweeps))

    @classmethod
    def sa_branch(cls, seed: int = 0, sa: SaConfig | None = None) -> "BranchSpec":
        return cls(kind=BranchKind.SA, seed=seed, sa=sa)

    @classmethod
    def quantum_branch(
        cls, backend: SamplerBackend, seed: int = 0, fraction: float = 0.10
    ) -> "BranchSpec":
        return cls(
            kind=BranchKind.QUANTUM_DECOMPOSED,
            seed=seed,
            backend=backend,
            fraction=fraction,
        )


def default_branches(backend: SamplerBackend, seed: int = 0) -> tuple[BranchSpec, ...]:
    """The canonical trio: tabu, simulated annealing, quantum-decomposed."""
    return (
        BranchSpec.tabu_branch(seed=seed),
        BranchSpec.sa_branch(seed=seed + 1),
        BranchSpec.quantum_branch(backend, seed=seed + 2),
    )


@dataclass(frozen=True)
class PortfolioConfig:
    """Shared configuration for both portfolio workflows.

    ``branches``/``iterations`` drive the barrier workflow; ``threads``,
    ``explorer``, and the exploiter fields drive the thread-pool workflow.
    """

    branches: tuple[BranchSpec, ...] = ()
    iterations: int = 10
    threads: int = 4
    time_limit_s: float | None = None
    seed: int = 0
    explorer: SaConfig | None = None
    exploiter_backend: SamplerBackend | None = None
    exploiter_fraction: float = 0.10

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError(f"iterations must be positive, got {self.iterations}")
        if self.threads < 1:
            raise ValueError(f"threads must be positive, got {self.threads}")


def run_episode(
    model: QuboModel,
    spec: BranchSpec,
    init: Sequence[int],
    iteration: int,
) -> SampleRecord:
    """One bounded branch episode from a shared start state.

    Stochastic branches draw from a stream keyed by (branch seed,
    iteration), so episodes are reproducible regardless of scheduling.
    """
    if spec.kind is BranchKind.TABU:
        cfg = spec.tabu or TabuConfig(max_sweeps=TABU_EPISODE_SWEEPS)
        return tabu_search(model, init, cfg)
    if spec.kind is BranchKind.SA:
        cfg = spec.sa or SaConfig.for_model(model, sweeps=SA_EPISODE_SWEEPS)
        temps = geometric_schedule(cfg.t_initial, cfg.t_final, cfg.sweeps)
        return anneal_once(model, init, temps, derive_rng(spec.seed, iteration))
    assert spec.backend is not None
    bits, _ = decomposition_round(model, init, spec.fraction, spec.backend)
    return SampleRecord.evaluate(model, bits)


def kerberos_solve(model: QuboModel, cfg: PortfolioConfig) -> SampleRecord:
    """Cooperating branches with solution sharing at iteration barriers.

    Every iteration starts each branch from the shared incumbent and runs
    one bounded episode concurrently; at the barrier the minimum-energy
    candidate (ties bit-lexicographic) becomes the incumbent for all
    branches. A failing branch is logged and skipped for the iteration;
    the solve fails only if every branch fails.
    """
    branches = cfg.branches or default_branches(
        cfg.exploiter_backend or AnnealBackend(seed=cfg.seed), cfg.seed
    )
    if model.n == 0:
        return SampleRecord.evaluate(model, ())
    incumbent = SampleRecord.evaluate(model, random_bits(make_rng(cfg.seed), model.n))
    started = time.perf_counter()
    with ThreadPoolExecutor(max_workers=len(branches)) as pool:
        for iteration in range(cfg.iterations):
            futures = [
                pool.submit(run_episode, model, spec, incumbent.bits, iteration)
                for spec in branches
            ]
            candidates: list[SampleRecord] = []
            for spec, fut in zip(branches, futures):
                try:
                    candidates.append(fut.result())
                except Exception:
                    log.warning(
                        "branch %s failed in iteration %d; skipping",
                        spec.kind.value,
                        iteration,
                        exc_info=True,
                    )
            if not candidates:
                raise PortfolioError(
                    f"all {len(branches)} branches failed in iteration {iteration}"
                )
            best = min(candidates, key=SampleRecord.sort_key)
            if best.sort_key() < incumbent.sort_key():
                incumbent = best
            if cfg.time_limit_s is not None and time.perf_counter() - started > cfg.time_limit_s:
                break
    return incumbent


def _hss_thread(model: QuboModel, cfg: PortfolioConfig, thread_index: int) -> SampleRecord:
    """One explorer/exploiter thread; returns its best record."""
    explorer = cfg.explorer or SaConfig.for_model(
        model, sweeps=cfg.iterations, seed=cfg.seed
    )
    rng = spawn_rngs(explorer.seed, cfg.threads)[thread_index]
    init = random_bits(rng, model.n)
    temps = geometric_schedule(explorer.t_initial, explorer.t_final, explorer.sweeps)

    backend = cfg.exploiter_backend
    if backend is None:
        return anneal_once(model, init, temps, rng)

    incumbent_bits = list(init)
    incumbent_e = energy(model, incumbent_bits)

    def exploit(bits: list[int], e: float) -> None:
        # Backend replies guide the explorer: when clamping the incumbent's
        # top-impact subset yields a strict improvement, the explorer jumps
        # to the improved sample.
        nonlocal incumbent_bits, incumbent_e
        if e < incumbent_e:
            incumbent_bits, incumbent_e = list(bits), e
        merged, improved = decomposition_round(
            model, incumbent_bits, cfg.exploiter_fraction, backend
        )
        if improved:
            incumbent_bits = merged
            incumbent_e = energy(model, merged)
            bits[:] = merged

    best = anneal_once(model, init, temps, rng, on_sweep=exploit)
    if incumbent_e < best.energy:
        return SampleRecord.evaluate(model, incumbent_bits)
    return best


def hss_solve(model: QuboModel, cfg: PortfolioConfig) -> SampleRecord:
    """Thread pool of explorer/exploiter pairs; best of the pool wins.

    Each thread anneals over the full model (exploration) and, after every
    sweep, attempts one backend-assisted improvement of its incumbent
    (exploitation). With the exploiter disabled a thread is exactly one
    annealing read. Thread failures are logged and skipped; the solve
    fails only if every thread fails.
    """
    if model.n == 0:
        return SampleRecord.evaluate(model, ())
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        futures = [
            pool.submit(_hss_thread, model, cfg, t) for t in range(cfg.threads)
        ]
        results: list[SampleRecord] = []
        for t, fut in enumerate(futures):
            try:
                results.append(fut.result())
            except Exception:
                log.warning("thread %d failed; skipping", t, exc_info=True)
    if not results:
        raise PortfolioError(f"all {cfg.threads} threads failed")
    return min(results, key=SampleRecord.sort_key)


# ----------------------------------------------------------------------
# Taxonomy registry
# ----------------------------------------------------------------------


class Classification(enum.Enum):
    COOPERATIVE_PARAMETER_OPTIMIZATION = "cooperative-parameter-optimization"
    COOPERATIVE_IMBRICATION = "cooperative-imbrication"


class Role(enum.Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"
    SHARED = "shared"


@dataclass(frozen=True)
class SolverTag:
    """How a workflow splits exploration/exploitation between paradigms."""

    name: str
    classification: Classification
    exploration: Role
    exploitation: Role


_REGISTRY: dict[str, SolverTag] = {
    "qbsolv": SolverTag(
        "qbsolv",
        Classification.COOPERATIVE_IMBRICATION,
        exploration=Role.CLASSICAL,
        exploitation=Role.QUANTUM,
    ),
    "kerberos": SolverTag(
        "kerberos",
        Classification.COOPERATIVE_IMBRICATION,
        exploration=Role.SHARED,
        exploitation=Role.SHARED,
    ),
    "hss": SolverTag(
        "hss",
        Classification.COOPERATIVE_IMBRICATION,
        exploration=Role.CLASSICAL,
        exploitation=Role.QUANTUM,
    ),
    "qhs": SolverTag(
        "qhs",
        Classification.COOPERATIVE_IMBRICATION,
        exploration=Role.QUANTUM,
        exploitation=Role.CLASSICAL,
    ),
}


def registry_lookup(name: str) -> SolverTag:
    """Taxonomy tag for the four built-in hybrid workflows."""
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown solver {name!r}; known: {sorted(_REGISTRY)}"
        ) from None
