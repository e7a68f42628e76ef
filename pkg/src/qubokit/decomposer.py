"""Decomposition solver: tabu initialization, then iterative improvement of
the most energetic variable subset through a sampler backend.

"Most energetic" is measured as the magnitude of each variable's single-flip
energy delta at the incumbent sample; clamping fixes every other variable and
folds its contributions into a smaller sub-QUBO that the backend solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .backends import SamplerBackend
from .errors import ConfigurationError
from .heuristics import TabuConfig, short_tabu, tabu_search
from .qubo import QuboModel, SampleRecord, as_bits, delta_energy_flip, energy
from .rng import make_rng, random_bits


@dataclass(frozen=True)
class DecomposerConfig:
    """Controls for the decomposition loop.

    ``fraction`` of the variables (by impact) form each subproblem; values
    in [0.05, 0.15] are customary and 0.10 is the default.
    """

    backend: SamplerBackend
    fraction: float = 0.10
    max_rounds: int = 50
    stall_rounds: int = 3
    tabu: TabuConfig = field(default_factory=TabuConfig)
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 < self.fraction <= 1.0):
            raise ValueError(f"fraction must be in (0, 1], got {self.fraction}")
        if self.max_rounds < 1 or self.stall_rounds < 1:
            raise ValueError("max_rounds and stall_rounds must be positive")


def variable_impact(model: QuboModel, sample: Sequence[int]) -> list[tuple[int, float]]:
    """Per-variable |single-flip delta| at ``sample``.

    Sorted descending by impact, ties by index ascending.
    """
    bits = as_bits(sample, model.n)
    impacts = [(i, abs(delta_energy_flip(model, bits, i))) for i in range(model.n)]
    impacts.sort(key=lambda t: (-t[1], t[0]))
    return impacts


def clamp(
    model: QuboModel, sample: Sequence[int], subset: Sequence[int]
) -> tuple[QuboModel, tuple[int, ...]]:
    """Fix every variable outside ``subset`` to its sample value.

    Cross quadratic terms fold into sub-linear terms and fixed-fixed terms
    fold into the offset, so for any sub-assignment s:

        sub_energy(s) == full_energy(sample overwritten by s on subset)

    Returns the sub-model and the original indices of its variables, in
    sub-variable order.
    """
    bits = as_bits(sample, model.n)
    keep = sorted(set(int(i) for i in subset))
    if not keep:
        raise ValueError("clamp subset must be non-empty")
    if keep[0] < 0 or keep[-1] >= model.n:
        raise ValueError(f"clamp subset {keep} out of range [0, {model.n})")
    pos = {orig: k for k, orig in enumerate(keep)}

    offset = model.offset
    linear: dict[int, float] = {}
    quadratic: dict[tuple[int, int], float] = {}
    for i, c in model.linear.items():
        if i in pos:
            linear[pos[i]] = linear.get(pos[i], 0.0) + c
        elif bits[i]:
            offset += c
    for (i, j), c in model.quadratic.items():
        fi, fj = i in pos, j in pos
        if fi and fj:
            quadratic[(pos[i], pos[j])] = c
        elif fi:
            if bits[j]:
                linear[pos[i]] = linear.get(pos[i], 0.0) + c
        elif fj:
            if bits[i]:
                linear[pos[j]] = linear.get(pos[j], 0.0) + c
        elif bits[i] and bits[j]:
            offset += c
    linear = {k: c for k, c in linear.items() if c != 0.0}
    sub = QuboModel(n=len(keep), linear=linear, quadratic=quadratic, offset=offset)
    return sub, tuple(keep)


def subproblem_size(model: QuboModel, fraction: float) -> int:
    return max(1, math.ceil(fraction * model.n))


def decomposition_round(
    model: QuboModel,
    sample: Sequence[int],
    fraction: float,
    backend: SamplerBackend,
    num_reads: int = 1,
) -> tuple[list[int], bool]:
    """One improvement attempt: clamp the top-impact subset, sample it, and
    merge the best sub-assignment iff it strictly lowers the full energy.

    Returns (possibly improved bits, whether a merge happened).
    """
    bits = list(as_bits(sample, model.n))
    size = subproblem_size(model, fraction)
    if backend.max_vars is not None:
        size = min(size, backend.max_vars)
    subset = [i for i, _ in variable_impact(model, bits)[:size]]
    sub, variables = clamp(model, bits, subset)
    result = backend.sample(sub, num_reads=num_reads)
    merged = list(bits)
    for k, orig in enumerate(variables):
        merged[orig] = result.best.bits[k]
    merged_energy = energy(model, merged)
    # Clamp identity: the sub-model energy of the chosen sub-assignment is
    # the full-model energy of the merged sample (stripped under -O).
    assert abs(result.best.energy - merged_energy) <= 1e-9 * (1.0 + abs(merged_energy))
    if merged_energy < energy(model, bits):
        return merged, True
    return bits, False


def qbsolv_solve(model: QuboModel, cfg: DecomposerConfig) -> SampleRecord:
    """Decomposition solve: tabu init, then clamp-improve-refine rounds.

    Stops after ``stall_rounds`` consecutive non-improving rounds or
    ``max_rounds`` total. The incumbent's full-model energy never increases
    across rounds; the best sample seen is returned.
    """
    if model.n == 0:
        return SampleRecord.evaluate(model, ())
    size = subproblem_size(model, cfg.fraction)
    if cfg.backend.max_vars is not None and size > cfg.backend.max_vars:
        raise ConfigurationError(
            f"subproblem of {size} variables exceeds backend capacity "
            f"{cfg.backend.max_vars}; lower fraction or switch backend"
        )

    init = random_bits(make_rng(cfg.seed), model.n)
    incumbent = tabu_search(model, init, cfg.tabu)
    stall = 0
    for _ in range(cfg.max_rounds):
        bits, merged = decomposition_round(
            model, incumbent.bits, cfg.fraction, cfg.backend
        )
        if merged:
            # Tabu's best-visited includes its start state, so refinement
            # can only keep or extend the merge's strict improvement.
            incumbent = short_tabu(model, bits, cfg.tabu)
            stall = 0
        else:
            stall += 1
            if stall >= cfg.stall_rounds:
                break
    return incumbent
