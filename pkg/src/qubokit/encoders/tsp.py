"""Position-based permutation encoding for the traveling salesman problem.

Variables x[v, p] mean "node v occupies tour position p". The objective sums
dist(u, v) over consecutive positions (wrapping around); exactly-one
penalties on every row (node) and column (position) make the model optimum a
valid tour whose energy equals its length.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InstanceError
from ..qubo import QuboModel, as_bits
from .base import DecodedSolution, Encoding, ProblemKind, QuboBuilder, content_hash


@dataclass(frozen=True)
class TspInstance:
    name: str
    dist: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "dist", tuple(tuple(float(d) for d in row) for row in self.dist)
        )
        n = len(self.dist)
        for i, row in enumerate(self.dist):
            if len(row) != n:
                raise InstanceError(f"distance matrix row {i} has length {len(row)} != {n}")
            if row[i] != 0.0:
                raise InstanceError(f"distance matrix diagonal [{i}][{i}] must be zero")
            for j, d in enumerate(row):
                if d < 0:
                    raise InstanceError(f"negative distance at [{i}][{j}]")
                if self.dist[j][i] != d:
                    raise InstanceError(f"distance matrix asymmetric at [{i}][{j}]")

    @property
    def n(self) -> int:
        return len(self.dist)

    @property
    def max_dist(self) -> float:
        return max(max(row) for row in self.dist)

    def fingerprint(self) -> str:
        return content_hash({"kind": "tsp", "dist": [list(r) for r in self.dist]})


def encode_tsp(inst: TspInstance) -> tuple[QuboModel, Encoding]:
    n = inst.n
    if n < 3:
        raise InstanceError(f"TSP needs at least 3 nodes, got {n}")
    penalty = n * inst.max_dist + 1.0

    b = QuboBuilder()
    x = [[b.variable("x", v, p) for p in range(n)] for v in range(n)]

    for p in range(n):
        q = (p + 1) % n
        for u in range(n):
            for v in range(n):
                if u == v:
                    continue
                d = inst.dist[u][v]
                if d != 0.0:
                    b.add_quadratic(x[u][p], x[v][q], d)

    for v in range(n):
        b.add_exactly_one([x[v][p] for p in range(n)], penalty)
    for p in range(n):
        b.add_exactly_one([x[v][p] for v in range(n)], penalty)

    model, var_map = b.build()
    enc = Encoding(
        problem_kind=ProblemKind.TSP,
        var_map=var_map,
        penalties={"one_hot": penalty},
        instance_ref=inst.fingerprint(),
    )
    return model, enc


def decode_tsp(enc: Encoding, sample, inst: TspInstance) -> DecodedSolution:
    """Recover the tour; feasible iff rows and columns are all one-hot."""
    n = inst.n
    bits = as_bits(sample, enc.num_variables)
    route: list[int] = []
    for p in range(n):
        nodes = [v for v in range(n) if bits[enc.index("x", v, p)]]
        if len(nodes) != 1:
            return DecodedSolution(feasible=False)
        route.append(nodes[0])
    if len(set(route)) != n:
        return DecodedSolution(feasible=False)
    length = sum(inst.dist[route[p]][route[(p + 1) % n]] for p in range(n))
    return DecodedSolution(feasible=True, native=tuple(route), objective=length)
