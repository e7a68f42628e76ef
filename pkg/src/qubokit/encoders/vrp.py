"""Multi-route position encoding for the vehicle routing problem.

Variables x[c, r, p] place client c (1-based in the distance matrix, depot
is node 0) on route r at slot p; every (route, slot) also has a depot-idle
marker h[r, p] so each slot is exactly-one over clients plus the marker. A
pairwise penalty on "idle then client" adjacencies forces each route's
clients into a contiguous prefix, which makes the depot departure/return
legs exact quadratic expressions:

  - slot 0 pays dist(depot, c);
  - consecutive slots pay dist(c, c');
  - a client followed by the idle marker (or sitting in the last slot)
    pays dist(c, depot);
  - an all-idle route contributes nothing.

With optional demands/capacity, a per-route capacity equality with binary
slack (as in the bin packing encoding) is added.
"""

from __future__ import annotations

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
class VrpInstance:
    """Clients 1..n_clients with depot node 0 in the distance matrix."""

    name: str
    dist: tuple[tuple[float, ...], ...]
    vehicles: int
    demands: tuple[float, ...] | None = None
    capacity: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "dist", tuple(tuple(float(d) for d in row) for row in self.dist)
        )
        if self.demands is not None:
            object.__setattr__(self, "demands", tuple(float(d) for d in self.demands))
        size = len(self.dist)
        if size < 2:
            raise InstanceError("need a depot and at least one client")
        for i, row in enumerate(self.dist):
            if len(row) != size:
                raise InstanceError(f"distance matrix row {i} has length {len(row)} != {size}")
            if row[i] != 0.0:
                raise InstanceError(f"distance matrix diagonal [{i}][{i}] must be zero")
            if any(d < 0 for d in row):
                raise InstanceError(f"negative distance in row {i}")
        if self.vehicles < 1:
            raise InstanceError(f"need at least one vehicle, got {self.vehicles}")
        if self.vehicles > self.n_clients:
            raise InstanceError(
                f"{self.vehicles} vehicles for {self.n_clients} clients is infeasible"
            )
        if (self.demands is None) != (self.capacity is None):
            raise InstanceError("demands and capacity must be given together")
        if self.demands is not None:
            if len(self.demands) != self.n_clients:
                raise InstanceError("need one demand per client")
            assert self.capacity is not None
            if any(d < 0 for d in self.demands):
                raise InstanceError("demands must be non-negative")
            if any(d > self.capacity for d in self.demands):
                raise InstanceError("every demand must fit vehicle capacity")

    @property
    def n_clients(self) -> int:
        return len(self.dist) - 1

    @property
    def max_dist(self) -> float:
        return max(max(row) for row in self.dist)

    def fingerprint(self) -> str:
        return content_hash(
            {
                "kind": "vrp",
                "dist": [list(r) for r in self.dist],
                "vehicles": self.vehicles,
                "demands": list(self.demands) if self.demands else None,
                "capacity": self.capacity,
            }
        )


def encode_vrp(inst: VrpInstance) -> tuple[QuboModel, Encoding]:
    n = inst.n_clients
    k = inst.vehicles
    slots = n  # one route may serve every client
    penalty = (n + k) * inst.max_dist + 1.0

    b = QuboBuilder()
    x = [
        [[b.variable("x", c, r, p) for p in range(slots)] for r in range(k)]
        for c in range(n)
    ]
    idle = [[b.variable("h", r, p) for p in range(slots)] for r in range(k)]

    # Each slot holds exactly one of: some client, or the idle marker.
    for r in range(k):
        for p in range(slots):
            b.add_exactly_one([x[c][r][p] for c in range(n)] + [idle[r][p]], penalty)
    # Each client appears exactly once across all routes and slots.
    for c in range(n):
        b.add_exactly_one(
            [x[c][r][p] for r in range(k) for p in range(slots)], penalty
        )
    # Contiguity: an idle slot is never followed by a client.
    for r in range(k):
        for p in range(slots - 1):
            for c in range(n):
                b.add_quadratic(idle[r][p], x[c][r][p + 1], penalty)

    # Route legs. Client c sits at matrix row c+1.
    for r in range(k):
        for c in range(n):
            d_out = inst.dist[0][c + 1]
            if d_out != 0.0:
                b.add_linear(x[c][r][0], d_out)
            d_back = inst.dist[c + 1][0]
            if d_back != 0.0:
                b.add_linear(x[c][r][slots - 1], d_back)
        for p in range(slots - 1):
            for c in range(n):
                for c2 in range(n):
                    if c == c2:
                        continue
                    d = inst.dist[c + 1][c2 + 1]
                    if d != 0.0:
                        b.add_quadratic(x[c][r][p], x[c2][r][p + 1], d)
                d_back = inst.dist[c + 1][0]
                if d_back != 0.0:
                    b.add_quadratic(x[c][r][p], idle[r][p + 1], d_back)

    penalties = {"one_hot": penalty, "contiguity": penalty}
    if inst.capacity is not None:
        assert inst.demands is not None
        width = slack_width(inst.capacity)
        for r in range(k):
            terms = [
                (x[c][r][p], inst.demands[c])
                for c in range(n)
                for p in range(slots)
                if inst.demands[c] != 0.0
            ]
            terms += [(b.variable("s", r, j), float(1 << j)) for j in range(width)]
            b.add_squared(terms, -float(inst.capacity), penalty)
        penalties["capacity"] = penalty

    model, var_map = b.build()
    enc = Encoding(
        problem_kind=ProblemKind.VRP,
        var_map=var_map,
        penalties=penalties,
        instance_ref=inst.fingerprint(),
    )
    return model, enc


def decode_vrp(enc: Encoding, sample, inst: VrpInstance) -> DecodedSolution:
    """Feasible iff slots are exactly-one, clients appear once, every
    route is a contiguous client prefix, and (when present) the capacity
    equalities hold exactly. Objective: total length of all routes."""
    bits = as_bits(sample, enc.num_variables)
    n = inst.n_clients
    k = inst.vehicles
    slots = n

    routes: list[tuple[int, ...]] = []
    seen: list[int] = []
    for r in range(k):
        clients: list[int] = []
        idle_seen = False
        for p in range(slots):
            here = [c for c in range(n) if bits[enc.index("x", c, r, p)]]
            marker = bits[enc.index("h", r, p)]
            if len(here) + marker != 1:
                return DecodedSolution(feasible=False)
            if marker:
                idle_seen = True
            else:
                if idle_seen:
                    return DecodedSolution(feasible=False)
                clients.append(here[0])
        routes.append(tuple(c + 1 for c in clients))
        seen.extend(clients)
    if len(seen) != n or len(set(seen)) != n:
        return DecodedSolution(feasible=False)

    if inst.capacity is not None:
        assert inst.demands is not None
        width = slack_width(inst.capacity)
        for r, route in enumerate(routes):
            load = sum(inst.demands[c - 1] for c in route)
            slack = sum(
                (1 << j) for j in range(width) if bits[enc.index("s", r, j)]
            )
            if load + slack != inst.capacity:
                return DecodedSolution(feasible=False)

    total = 0.0
    for route in routes:
        if not route:
            continue
        total += inst.dist[0][route[0]]
        for a, bnode in zip(route, route[1:]):
            total += inst.dist[a][bnode]
        total += inst.dist[route[-1]][0]
    return DecodedSolution(feasible=True, native=tuple(routes), objective=total)
