"""Maximum cut encoding: one variable per node, minimization of the
negated cut weight, so every sample is feasible."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InstanceError
from ..qubo import QuboModel, as_bits
from .base import DecodedSolution, Encoding, ProblemKind, QuboBuilder, content_hash


@dataclass(frozen=True)
class McpInstance:
    name: str
    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "edges",
            tuple((int(i), int(j), float(w)) for i, j, w in self.edges),
        )
        if self.n < 1:
            raise InstanceError(f"graph needs at least one node, got {self.n}")
        seen = set()
        for i, j, _ in self.edges:
            if i == j:
                raise InstanceError(f"self-loop at node {i}")
            if not (0 <= i < j < self.n):
                raise InstanceError(f"edge ({i},{j}) must satisfy 0 <= i < j < {self.n}")
            if (i, j) in seen:
                raise InstanceError(f"duplicate edge ({i},{j})")
            seen.add((i, j))

    def fingerprint(self) -> str:
        return content_hash(
            {"kind": "mcp", "n": self.n, "edges": [list(e) for e in self.edges]}
        )


def encode_mcp(inst: McpInstance) -> tuple[QuboModel, Encoding]:
    """Minimize -sum_(i,j,w) w * (x_i + x_j - 2 x_i x_j)."""
    if inst.n < 2:
        raise InstanceError(f"max cut needs at least 2 nodes, got {inst.n}")
    b = QuboBuilder()
    x = [b.variable("x", v) for v in range(inst.n)]
    for i, j, w in inst.edges:
        b.add_linear(x[i], -w)
        b.add_linear(x[j], -w)
        b.add_quadratic(x[i], x[j], 2.0 * w)
    model, var_map = b.build()
    enc = Encoding(
        problem_kind=ProblemKind.MCP,
        var_map=var_map,
        penalties={},
        instance_ref=inst.fingerprint(),
        energy_scale=-1.0,
    )
    return model, enc


def decode_mcp(enc: Encoding, sample, inst: McpInstance) -> DecodedSolution:
    bits = as_bits(sample, enc.num_variables)
    side = tuple(bits[enc.index("x", v)] for v in range(inst.n))
    cut = sum(w for i, j, w in inst.edges if side[i] != side[j])
    return DecodedSolution(feasible=True, native=side, objective=cut)
