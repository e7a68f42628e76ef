"""Classical search engines over QUBO bit-flip neighborhoods.

Both engines maintain the local field f_i = linear_i + sum_j c_ij * x_j for
every variable, so a single-flip delta is (1 - 2 x_i) * f_i in O(1) and a
flip updates the fields of its quadratic neighbors in O(degree). This is
numerically identical to calling :func:`qubokit.qubo.delta_energy_flip` for
each candidate move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .qubo import QuboModel, SampleRecord, SampleSet, as_bits, energy
from .rng import make_rng, random_bits, spawn_rngs


@dataclass(frozen=True)
class TabuConfig:
    """Parameters for single-flip tabu search.

    ``tenure`` is clamped to n - 1 at run time so at least one move is
    always admissible. ``aspiration`` allows a tabu move that strictly
    improves the best energy seen so far.
    """

    tenure: int = 20
    max_sweeps: int = 500
    seed: int = 0
    aspiration: bool = True

    def __post_init__(self) -> None:
        if self.tenure < 1:
            raise ValueError(f"tenure must be positive, got {self.tenure}")
        if self.max_sweeps < 1:
            raise ValueError(f"max_sweeps must be positive, got {self.max_sweeps}")


@dataclass(frozen=True)
class SaConfig:
    """Parameters for geometric-schedule simulated annealing.

    The default initial temperature is scale-aware: chosen as the largest
    possible single-flip delta of the model, so early acceptance is near
    uniform. Use :meth:`for_model` to fill it in.
    """

    t_initial: float
    t_final: float = 1e-3
    sweeps: int = 1000
    num_reads: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.t_initial <= 0:
            raise ValueError(f"t_initial must be positive, got {self.t_initial}")
        if not (0 < self.t_final <= self.t_initial):
            raise ValueError(
                f"need 0 < t_final <= t_initial, got {self.t_final}, {self.t_initial}"
            )
        if self.sweeps < 1 or self.num_reads < 1:
            raise ValueError("sweeps and num_reads must be positive")

    @classmethod
    def for_model(cls, model: QuboModel, **overrides) -> "SaConfig":
        t0 = overrides.pop("t_initial", None)
        if t0 is None:
            t0 = max(model.max_abs_field, 1.0)
        return cls(t_initial=t0, **overrides)


# ----------------------------------------------------------------------
# Shared field machinery
# ----------------------------------------------------------------------


def _local_fields(model: QuboModel, bits: list[int]) -> list[float]:
    fields = [model.linear.get(i, 0.0) for i in range(model.n)]
    for (i, j), c in model.quadratic.items():
        if bits[j]:
            fields[i] += c
        if bits[i]:
            fields[j] += c
    return fields


def _flip(
    i: int,
    bits: list[int],
    fields: list[float],
    neighbors: Sequence[Sequence[tuple[int, float]]],
) -> None:
    bits[i] ^= 1
    sign = 1.0 if bits[i] else -1.0
    for j, c in neighbors[i]:
        fields[j] += sign * c


def metropolis_accept(delta: float, temperature: float, u: float) -> bool:
    """Single-flip acceptance rule: always downhill, Boltzmann uphill.

    As temperature -> 0+ the uphill probability vanishes, so only
    non-worsening flips are accepted.
    """
    if delta <= 0.0:
        return True
    return u < math.exp(-delta / temperature)


# ----------------------------------------------------------------------
# Tabu search
# ----------------------------------------------------------------------


def tabu_search(model: QuboModel, init: Sequence[int], cfg: TabuConfig) -> SampleRecord:
    """Best single-flip tabu search from ``init``.

    Each sweep scores all n single-flip moves, applies the best admissible
    one (non-tabu, or tabu but strictly improving the global best when
    aspiration is on), and marks the flipped variable tabu for ``tenure``
    sweeps. Deterministic given (model, init, seed); returns the best
    sample visited.
    """
    n = model.n
    bits = list(as_bits(init, n))
    if n == 0:
        return SampleRecord.evaluate(model, bits)

    tenure = min(cfg.tenure, n - 1) if n > 1 else 0
    neighbors = model.neighbors
    fields = _local_fields(model, bits)
    e = energy(model, bits)
    best_e, best_bits = e, list(bits)
    expires = [0] * n  # sweep index at which the tabu status lapses

    for sweep in range(1, cfg.max_sweeps + 1):
        move = -1
        move_delta = math.inf
        for i in range(n):
            d = fields[i] if bits[i] == 0 else -fields[i]
            if expires[i] > sweep:
                if not (cfg.aspiration and e + d < best_e):
                    continue
            if d < move_delta:
                move, move_delta = i, d
        if move < 0:
            break
        _flip(move, bits, fields, neighbors)
        e += move_delta
        expires[move] = sweep + tenure + 1
        if e < best_e:
            best_e, best_bits = e, list(bits)

    return SampleRecord.evaluate(model, best_bits)


# ----------------------------------------------------------------------
# Simulated annealing
# ----------------------------------------------------------------------


def geometric_schedule(t_initial: float, t_final: float, sweeps: int) -> np.ndarray:
    return np.geomspace(t_initial, t_final, num=sweeps)


def anneal_once(
    model: QuboModel,
    init: Sequence[int],
    temps: Sequence[float],
    rng: np.random.Generator,
    on_sweep: Callable[[list[int], float], None] | None = None,
) -> SampleRecord:
    """One annealing run from a given start state.

    Sweeps visit variables in index order; one uniform draw per variable per
    sweep keeps the random stream aligned regardless of acceptance. Returns
    the best sample visited. ``on_sweep(bits, energy)`` runs after every
    sweep and may mutate ``bits`` in place (used by portfolio exploiters);
    the fields are rebuilt when it does.
    """
    n = model.n
    bits = list(as_bits(init, n))
    if n == 0:
        return SampleRecord.evaluate(model, bits)
    neighbors = model.neighbors
    fields = _local_fields(model, bits)
    e = energy(model, bits)
    best_e, best_bits = e, list(bits)

    for t in temps:
        us = rng.random(n)
        for i in range(n):
            d = fields[i] if bits[i] == 0 else -fields[i]
            if d <= 0.0 or us[i] < math.exp(-d / t):
                _flip(i, bits, fields, neighbors)
                e += d
                if e < best_e:
                    best_e, best_bits = e, list(bits)
        if on_sweep is not None:
            before = list(bits)
            on_sweep(bits, e)
            if bits != before:
                fields = _local_fields(model, bits)
                e = energy(model, bits)
                if e < best_e:
                    best_e, best_bits = e, list(bits)

    return SampleRecord.evaluate(model, best_bits)


def sa_sample(model: QuboModel, cfg: SaConfig) -> SampleSet:
    """num_reads independent annealing runs, collected energy-sorted.

    Read k uses the k-th child stream of ``cfg.seed`` for both its random
    start state and its acceptance draws, so each read is reproducible in
    isolation and the set does not depend on execution order.
    """
    temps = geometric_schedule(cfg.t_initial, cfg.t_final, cfg.sweeps)
    records = []
    for rng in spawn_rngs(cfg.seed, cfg.num_reads):
        init = random_bits(rng, model.n)
        records.append(anneal_once(model, init, temps, rng))
    return SampleSet.from_records(model, records)


def short_tabu(model: QuboModel, init: Sequence[int], base: TabuConfig) -> SampleRecord:
    """Refinement episode: the configured tabu with a 50-sweep budget."""
    return tabu_search(model, init, replace(base, max_sweeps=min(base.max_sweeps, 50)))


def random_restart_tabu(model: QuboModel, cfg: TabuConfig) -> SampleRecord:
    """Tabu from a random initial sample drawn from cfg.seed."""
    init = random_bits(make_rng(cfg.seed), model.n)
    return tabu_search(model, init, cfg)
