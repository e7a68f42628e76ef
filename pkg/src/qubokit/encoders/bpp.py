"""Bin packing encoding: bin-use flags, item placements, and binary slack.

Variables: y[b] marks bin b used, x[i, b] places item i in bin b, and
s[b, k] are slack bits. The objective is the count of used bins; per-item
exactly-one penalties plus a per-bin capacity equality

    sum_i w_i x[i, b] + slack_b - capacity * y[b] == 0

link placements to use flags and enforce the capacity inequality (the slack
absorbs unused room). Integer weights/capacity make the equality exactly
satisfiable for every feasible packing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InstanceError
from ..qubo import QuboModel, as_bits
from .base import (
    DecodedSolution,
    Encoding,
    ProblemKind,
    QuboBuilder,
    content_hash,
    slack_width,
)


@dataclass(frozen=True)
class BppInstance:
    name: str
    weights: tuple[float, ...]
    capacity: float
    max_bins: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not self.weights:
            raise InstanceError("need at least one item")
        if self.capacity <= 0:
            raise InstanceError(f"capacity must be positive, got {self.capacity}")
        if any(w <= 0 for w in self.weights):
            raise InstanceError("item weights must be positive")
        if any(w > self.capacity for w in self.weights):
            raise InstanceError("every item must fit a bin on its own")
        need = math.ceil(sum(self.weights) / self.capacity)
        if self.max_bins < need:
            raise InstanceError(
                f"max_bins={self.max_bins} below the volume bound {need}"
            )

    @property
    def n_items(self) -> int:
        return len(self.weights)

    def fingerprint(self) -> str:
        return content_hash(
            {
                "kind": "bpp",
                "weights": list(self.weights),
                "capacity": self.capacity,
                "max_bins": self.max_bins,
            }
        )


def encode_bpp(inst: BppInstance) -> tuple[QuboModel, Encoding]:
    penalty = float(inst.max_bins + 1)
    width = slack_width(inst.capacity)

    b = QuboBuilder()
    y = [b.variable("y", k) for k in range(inst.max_bins)]
    x = [
        [b.variable("x", i, k) for k in range(inst.max_bins)]
        for i in range(inst.n_items)
    ]
    s = [
        [b.variable("s", k, j) for j in range(width)]
        for k in range(inst.max_bins)
    ]

    for k in range(inst.max_bins):
        b.add_linear(y[k], 1.0)

    for i in range(inst.n_items):
        b.add_exactly_one([x[i][k] for k in range(inst.max_bins)], penalty)

    for k in range(inst.max_bins):
        terms = [(x[i][k], inst.weights[i]) for i in range(inst.n_items)]
        terms += [(s[k][j], float(1 << j)) for j in range(width)]
        terms.append((y[k], -float(inst.capacity)))
        b.add_squared(terms, 0.0, penalty)

    model, var_map = b.build()
    enc = Encoding(
        problem_kind=ProblemKind.BPP,
        var_map=var_map,
        penalties={"one_hot": penalty, "capacity": penalty},
        instance_ref=inst.fingerprint(),
    )
    return model, enc


def decode_bpp(enc: Encoding, sample, inst: BppInstance) -> DecodedSolution:
    """Feasible iff items are one-hot and every bin's capacity equality
    holds exactly; the objective is the number of used-bin flags."""
    bits = as_bits(sample, enc.num_variables)
    width = slack_width(inst.capacity)
    assignment: list[int] = []
    for i in range(inst.n_items):
        bins = [k for k in range(inst.max_bins) if bits[enc.index("x", i, k)]]
        if len(bins) != 1:
            return DecodedSolution(feasible=False)
        assignment.append(bins[0])
    used = 0
    for k in range(inst.max_bins):
        load = sum(inst.weights[i] for i in range(inst.n_items) if assignment[i] == k)
        slack = sum(
            (1 << j) for j in range(width) if bits[enc.index("s", k, j)]
        )
        flag = bits[enc.index("y", k)]
        if load + slack != inst.capacity * flag:
            return DecodedSolution(feasible=False)
        used += flag
    return DecodedSolution(feasible=True, native=tuple(assignment), objective=float(used))
