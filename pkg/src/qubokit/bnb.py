"""Primal-portfolio solver with branch-and-bound optimality proofs.

A set of primal heuristics runs concurrently to produce and keep improving
an incumbent while a best-first branch-and-bound search drives up a proven
lower bound. The result carries the relative optimality gap: 0 exactly when
the incumbent is proven optimal, otherwise the certified distance left.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

from .backends import EXACT_CAP, exact_solve
from .decomposer import clamp
from .portfolio import BranchSpec, run_episode
from .qubo import QuboModel, SampleRecord
from .rng import make_rng, random_bits

log = logging.getLogger(__name__)

PRUNE_SLACK = 1e-9


class Termination:
    PROVEN = "proven"
    NODE_LIMIT = "node-limit"
    TIME_LIMIT = "time-limit"


class Branching:
    IMPACT_DESCENDING = "impact-descending"


@dataclass(frozen=True)
class BnbConfig:
    """Search controls; ``leaf_size`` subtrees close via exact enumeration."""

    primals: tuple[BranchSpec, ...] = (
        BranchSpec.tabu_branch(seed=0, sweeps=200),
        BranchSpec.sa_branch(seed=1),
    )
    node_limit: int = 200_000
    time_limit_s: float | None = None
    leaf_size: int = 18
    branching: str = Branching.IMPACT_DESCENDING
    seed: int = 0
    log_every: int = 1000

    def __post_init__(self) -> None:
        if not (1 <= self.leaf_size <= EXACT_CAP):
            raise ValueError(
                f"leaf_size must be in [1, {EXACT_CAP}], got {self.leaf_size}"
            )
        if self.node_limit < 1:
            raise ValueError(f"node_limit must be positive, got {self.node_limit}")
        if self.branching != Branching.IMPACT_DESCENDING:
            raise ValueError(f"unknown branching rule {self.branching!r}")


@dataclass(frozen=True)
class BnbProgress:
    nodes: int
    incumbent_energy: float
    bound: float
    gap: float


@dataclass(frozen=True)
class BnbResult:
    """Incumbent plus the certificate the search earned for it."""

    incumbent: SampleRecord
    lower_bound: float
    gap: float
    proven_optimal: bool
    nodes_explored: int
    termination: str
    progress: tuple[BnbProgress, ...] = field(default=())


def partial_lower_bound(model: QuboModel, fixed: Mapping[int, int]) -> float:
    """Admissible bound on the minimum over all completions of ``fixed``.

    Fixed contributions are exact; every free linear term and every free
    quadratic term is independently granted its minimum (0 or its
    coefficient), each quadratic term counted once. Never exceeds the true
    minimum over completions.
    """
    bound = model.offset
    for i, c in model.linear.items():
        if i in fixed:
            if fixed[i]:
                bound += c
        elif c < 0.0:
            bound += c
    for (i, j), c in model.quadratic.items():
        fi = fixed.get(i)
        fj = fixed.get(j)
        if fi is not None and fj is not None:
            if fi and fj:
                bound += c
        elif fi is not None:
            # Folds into a free linear term of the other endpoint.
            if fi and c < 0.0:
                bound += c
        elif fj is not None:
            if fj and c < 0.0:
                bound += c
        elif c < 0.0:
            bound += c
    return bound


class _Incumbent:
    """Thread-safe best-feasible holder with compare-on-energy updates."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._record: SampleRecord | None = None

    def offer(self, record: SampleRecord) -> bool:
        with self._lock:
            if self._record is None or record.sort_key() < self._record.sort_key():
                self._record = record
                return True
            return False

    def get(self) -> SampleRecord | None:
        with self._lock:
            return self._record


def _primal_loop(
    model: QuboModel,
    spec: BranchSpec,
    incumbent: _Incumbent,
    stop: threading.Event,
    max_episodes: int = 1_000,
) -> None:
    rng = make_rng(spec.seed)
    for episode in range(max_episodes):
        if stop.is_set():
            return
        start = incumbent.get()
        init = start.bits if start is not None else random_bits(rng, model.n)
        try:
            rec = run_episode(model, spec, init, episode)
        except Exception:
            log.warning("primal %s failed; stopping it", spec.kind.value, exc_info=True)
            return
        incumbent.offer(rec)
        # Yield so the search thread is not starved by repeated episodes.
        time.sleep(0.001)


def _branch_variable(model: QuboModel, fixed: dict[int, int]) -> int:
    """Highest-impact free variable: largest total magnitude of its
    effective linear term plus couplings to other free variables."""
    impact = {i: 0.0 for i in range(model.n) if i not in fixed}
    for i, c in model.linear.items():
        if i in impact:
            impact[i] += abs(c)
    for (i, j), c in model.quadratic.items():
        fi_free = i in impact
        fj_free = j in impact
        if fi_free and fj_free:
            impact[i] += abs(c)
            impact[j] += abs(c)
        elif fi_free:
            if fixed[j]:
                impact[i] += abs(c)
        elif fj_free:
            if fixed[i]:
                impact[j] += abs(c)
    return max(impact, key=lambda i: (impact[i], -i))


def _close_leaf(
    model: QuboModel, fixed: dict[int, int], free: list[int]
) -> SampleRecord:
    """Solve the remaining free variables exactly and lift to a full sample."""
    exemplar = [fixed.get(i, 0) for i in range(model.n)]
    if not free:
        return SampleRecord.evaluate(model, exemplar)
    sub, variables = clamp(model, exemplar, free)
    sub_best = exact_solve(sub)
    for k, orig in enumerate(variables):
        exemplar[orig] = sub_best.bits[k]
    return SampleRecord.evaluate(model, exemplar)


def branch_and_bound(model: QuboModel, cfg: BnbConfig) -> BnbResult:
    """Best-first search with concurrent primal heuristics.

    Nodes are ordered by lower bound (ties: deeper first); children fix the
    highest-impact free variable; subtrees at most ``leaf_size`` variables
    deep close through exact enumeration. Primal improvements land in the
    shared incumbent and are folded in at node pops. Full closure proves
    optimality (gap 0); hitting a node or time limit reports the gap to
    the best open bound instead; limits never raise.
    """
    if model.n == 0:
        rec = SampleRecord.evaluate(model, ())
        return BnbResult(rec, rec.energy, 0.0, True, 0, Termination.PROVEN)

    started = time.perf_counter()
    incumbent = _Incumbent()
    stop = threading.Event()
    pool = ThreadPoolExecutor(max_workers=max(1, len(cfg.primals)))
    futures = [
        pool.submit(_primal_loop, model, spec, incumbent, stop)
        for spec in cfg.primals
    ]
    # The search improves the primal portfolio's best solution, so wait for
    # the first episode to land before branching.
    while incumbent.get() is None and any(not f.done() for f in futures):
        time.sleep(0.001)
    if incumbent.get() is None:
        incumbent.offer(SampleRecord.evaluate(model, [0] * model.n))

    counter = itertools.count()
    root_fixed: dict[int, int] = {}
    root_bound = partial_lower_bound(model, root_fixed)
    heap: list[tuple[float, int, int, dict[int, int]]] = []
    heapq.heappush(heap, (root_bound, 0, next(counter), root_fixed))

    nodes = 0
    progress: list[BnbProgress] = []
    termination = Termination.PROVEN

    def current_best() -> SampleRecord:
        rec = incumbent.get()
        assert rec is not None
        return rec

    def log_progress() -> None:
        best = current_best()
        open_bound = heap[0][0] if heap else best.energy
        bound = min(open_bound, best.energy)
        gap = max(0.0, (best.energy - bound) / max(1e-12, abs(best.energy)))
        progress.append(BnbProgress(nodes, best.energy, bound, gap))
        log.info(
            "nodes=%d incumbent=%.9g bound=%.9g gap=%.6g",
            nodes, best.energy, bound, gap,
        )

    try:
        while heap:
            if nodes >= cfg.node_limit:
                termination = Termination.NODE_LIMIT
                break
            if (
                cfg.time_limit_s is not None
                and time.perf_counter() - started > cfg.time_limit_s
            ):
                termination = Termination.TIME_LIMIT
                break
            bound, neg_depth, _, fixed = heapq.heappop(heap)
            nodes += 1
            best = current_best()
            if bound >= best.energy - PRUNE_SLACK:
                # Best-first order: everything still open is at least as
                # bad as the incumbent, so the tree is closed.
                heap.clear()
                break
            free = [i for i in range(model.n) if i not in fixed]
            if len(free) <= cfg.leaf_size:
                incumbent.offer(_close_leaf(model, fixed, free))
            else:
                var = _branch_variable(model, fixed)
                depth = -neg_depth + 1
                for value in (0, 1):
                    child = dict(fixed)
                    child[var] = value
                    child_bound = partial_lower_bound(model, child)
                    if child_bound < best.energy - PRUNE_SLACK:
                        heapq.heappush(
                            heap, (child_bound, -depth, next(counter), child)
                        )
            if nodes % cfg.log_every == 0:
                log_progress()
    finally:
        stop.set()
        pool.shutdown(wait=True)

    best = current_best()
    open_bound = heap[0][0] if heap else None
    if open_bound is None or open_bound >= best.energy - PRUNE_SLACK:
        # Either the tree closed, or every node left open at the limit is
        # already prunable; both are a completed optimality proof.
        termination = Termination.PROVEN
        lower_bound = best.energy
        gap = 0.0
        proven = True
    else:
        lower_bound = open_bound
        gap = max(0.0, (best.energy - lower_bound) / max(1e-12, abs(best.energy)))
        proven = False
    progress.append(BnbProgress(nodes, best.energy, lower_bound, gap))
    log.info(
        "nodes=%d incumbent=%.9g bound=%.9g gap=%.6g [%s]",
        nodes, best.energy, lower_bound, gap, termination,
    )
    return BnbResult(
        incumbent=best,
        lower_bound=lower_bound,
        gap=gap,
        proven_optimal=proven,
        nodes_explored=nodes,
        termination=termination,
        progress=tuple(progress),
    )


def default_qhs_config(seed: int = 0, quantum_backend=None, **overrides) -> BnbConfig:
    """Primal portfolio used by the harness: tabu, annealing, and (when a
    backend is given) a decomposition-based exploration primal."""
    primals = [
        BranchSpec.tabu_branch(seed=seed, sweeps=200),
        BranchSpec.sa_branch(seed=seed + 1),
    ]
    if quantum_backend is not None:
        primals.append(
            BranchSpec.quantum_branch(quantum_backend, seed=seed + 2, fraction=0.15)
        )
    return BnbConfig(primals=tuple(primals), seed=seed, **overrides)
