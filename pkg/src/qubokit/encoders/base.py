"""Shared encoder machinery: slot maps, penalty expansion, decode results."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass
from typing import Hashable, Sequence

from ..qubo import QuboModel

Slot = tuple  # semantic variable key, e.g. ("x", node, position)


class ProblemKind(enum.Enum):
    TSP = "tsp"
    VRP = "vrp"
    BPP = "bpp"
    MCP = "mcp"


@dataclass(frozen=True)
class Encoding:
    """Ties a QUBO back to its native problem.

    ``var_map`` is a bijection between semantic slots and the model's
    variable indices 0..n-1. For every feasible sample,

        energy(model, sample) == energy_scale * objective + energy_constant
    """

    problem_kind: ProblemKind
    var_map: dict[Slot, int]
    penalties: dict[str, float]
    instance_ref: str
    energy_scale: float = 1.0
    energy_constant: float = 0.0

    def __post_init__(self) -> None:
        indices = sorted(self.var_map.values())
        if indices != list(range(len(indices))):
            raise ValueError("var_map must cover exactly 0..n-1 with no repeats")

    def index(self, *slot: Hashable) -> int:
        return self.var_map[tuple(slot)]

    @property
    def num_variables(self) -> int:
        return len(self.var_map)


@dataclass(frozen=True)
class DecodedSolution:
    """Native solution recovered from a sample; objective in original units.

    ``objective`` is None when infeasible.
    """

    feasible: bool
    native: object = None
    objective: float | None = None


class QuboBuilder:
    """Accumulates linear/quadratic terms and expands penalty squares."""

    def __init__(self) -> None:
        self._vars: dict[Slot, int] = {}
        self.linear: dict[int, float] = {}
        self.quadratic: dict[tuple[int, int], float] = {}
        self.offset = 0.0

    def variable(self, *slot: Hashable) -> int:
        key = tuple(slot)
        if key not in self._vars:
            self._vars[key] = len(self._vars)
        return self._vars[key]

    def add_linear(self, var: int, coeff: float) -> None:
        self.linear[var] = self.linear.get(var, 0.0) + coeff

    def add_quadratic(self, a: int, b: int, coeff: float) -> None:
        if a == b:
            self.add_linear(a, coeff)
            return
        key = (a, b) if a < b else (b, a)
        self.quadratic[key] = self.quadratic.get(key, 0.0) + coeff

    def add_squared(
        self, terms: Sequence[tuple[int, float]], constant: float, weight: float
    ) -> None:
        """Add weight * (sum coeff_k x_k + constant)^2, using x^2 = x."""
        for idx, (v, c) in enumerate(terms):
            self.add_linear(v, weight * (c * c + 2.0 * c * constant))
            for w, d in terms[idx + 1:]:
                self.add_quadratic(v, w, 2.0 * weight * c * d)
        self.offset += weight * constant * constant

    def add_exactly_one(self, variables: Sequence[int], weight: float) -> None:
        """Penalty weight * (sum x - 1)^2: zero iff exactly one is set."""
        self.add_squared([(v, 1.0) for v in variables], -1.0, weight)

    def build(self, var_map: dict[Slot, int] | None = None) -> tuple[QuboModel, dict[Slot, int]]:
        mapping = var_map if var_map is not None else dict(self._vars)
        model = QuboModel.from_terms(
            len(mapping), self.linear, self.quadratic, self.offset
        )
        return model, mapping


def content_hash(payload: dict) -> str:
    """Stable hash of a JSON-serializable instance description."""
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def slack_width(capacity: float) -> int:
    """Bits needed for an integer slack in [0, capacity]."""
    width = 1
    while (1 << width) - 1 < capacity:
        width += 1
    return width
