"""Instance file formats: JSON documents and a TSPLIB-subset reader.

JSON documents carry a "kind" discriminator:

    {"kind": "tsp", "dist": [[...]], "name": "..."}
    {"kind": "vrp", "dist": [[...]], "vehicles": k,
     "demands": [...], "capacity": c}          # demands/capacity optional
    {"kind": "bpp", "weights": [...], "capacity": c, "max_bins": m}
    {"kind": "mcp", "n": n, "edges": [[i, j, w], ...]}

The TSPLIB reader handles EDGE_WEIGHT_TYPE EUC_2D (coordinates, distances
rounded to the nearest integer per the TSPLIB convention) and EXPLICIT with
FULL_MATRIX / UPPER_ROW / UPPER_DIAG_ROW / LOWER_DIAG_ROW layouts, plus the
CVRP sections (CAPACITY, DEMAND_SECTION, DEPOT_SECTION).
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from ..errors import InstanceError
from .bpp import BppInstance
from .mcp import McpInstance
from .tsp import TspInstance
from .vrp import VrpInstance

Instance = TspInstance | VrpInstance | BppInstance | McpInstance


def instance_from_dict(doc: dict, name: str | None = None) -> Instance:
    kind = doc.get("kind")
    label = name or doc.get("name") or "unnamed"
    try:
        if kind == "tsp":
            return TspInstance(name=label, dist=doc["dist"])
        if kind == "vrp":
            return VrpInstance(
                name=label,
                dist=doc["dist"],
                vehicles=int(doc["vehicles"]),
                demands=doc.get("demands"),
                capacity=doc.get("capacity"),
            )
        if kind == "bpp":
            return BppInstance(
                name=label,
                weights=doc["weights"],
                capacity=float(doc["capacity"]),
                max_bins=int(doc["max_bins"]),
            )
        if kind == "mcp":
            return McpInstance(name=label, n=int(doc["n"]), edges=doc["edges"])
    except KeyError as exc:
        raise InstanceError(f"instance document missing field {exc}") from exc
    raise InstanceError(f"unknown instance kind {kind!r}")


def instance_to_dict(inst: Instance) -> dict:
    if isinstance(inst, TspInstance):
        return {"kind": "tsp", "name": inst.name, "dist": [list(r) for r in inst.dist]}
    if isinstance(inst, VrpInstance):
        doc = {
            "kind": "vrp",
            "name": inst.name,
            "dist": [list(r) for r in inst.dist],
            "vehicles": inst.vehicles,
        }
        if inst.capacity is not None:
            doc["demands"] = list(inst.demands or ())
            doc["capacity"] = inst.capacity
        return doc
    if isinstance(inst, BppInstance):
        return {
            "kind": "bpp",
            "name": inst.name,
            "weights": list(inst.weights),
            "capacity": inst.capacity,
            "max_bins": inst.max_bins,
        }
    if isinstance(inst, McpInstance):
        return {
            "kind": "mcp",
            "name": inst.name,
            "n": inst.n,
            "edges": [list(e) for e in inst.edges],
        }
    raise TypeError(f"not an instance: {inst!r}")


def load_instance(path: str | Path, vehicles: int | None = None) -> Instance:
    """Load an instance by extension: .json documents or TSPLIB-ish text."""
    path = Path(path)
    if not path.exists():
        raise InstanceError(f"instance file not found: {path}")
    if path.suffix == ".json":
        doc = json.loads(path.read_text())
        return instance_from_dict(doc, name=doc.get("name") or path.stem)
    return read_tsplib(path, vehicles=vehicles)


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=1) + "\n")


# ----------------------------------------------------------------------
# TSPLIB subset
# ----------------------------------------------------------------------


def _parse_tsplib_fields(text: str) -> tuple[dict[str, str], dict[str, list[str]]]:
    headers: dict[str, str] = {}
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line == "EOF":
            continue
        upper = line.split(":")[0].strip().upper()
        if upper.endswith("_SECTION") or upper == "NODE_COORD_SECTION":
            current = sections.setdefault(upper, [])
            rest = line.split(":", 1)[1].strip() if ":" in line else ""
            if rest:
                current.append(rest)
            continue
        if ":" in line and current is None:
            key, value = line.split(":", 1)
            headers[key.strip().upper()] = value.strip()
            continue
        if current is not None:
            current.append(line)
            continue
        headers.setdefault("_TRAILING", "")
    return headers, sections


def _euc2d_matrix(coords: list[tuple[float, float]]) -> list[list[float]]:
    n = len(coords)
    dist = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            dx = coords[i][0] - coords[j][0]
            dy = coords[i][1] - coords[j][1]
            # TSPLIB convention: euclidean distance rounded to nearest int.
            d = float(int(math.sqrt(dx * dx + dy * dy) + 0.5))
            dist[i][j] = dist[j][i] = d
    return dist


def _explicit_matrix(n: int, fmt: str, numbers: list[float]) -> list[list[float]]:
    dist = [[0.0] * n for _ in range(n)]
    it = iter(numbers)
    if fmt == "FULL_MATRIX":
        for i in range(n):
            for j in range(n):
                dist[i][j] = next(it)
    elif fmt == "UPPER_ROW":
        for i in range(n):
            for j in range(i + 1, n):
                dist[i][j] = dist[j][i] = next(it)
    elif fmt == "UPPER_DIAG_ROW":
        for i in range(n):
            for j in range(i, n):
                dist[i][j] = dist[j][i] = next(it)
    elif fmt == "LOWER_DIAG_ROW":
        for i in range(n):
            for j in range(i + 1):
                dist[i][j] = dist[j][i] = next(it)
    else:
        raise InstanceError(f"unsupported EDGE_WEIGHT_FORMAT {fmt!r}")
    for i in range(n):
        dist[i][i] = 0.0
    return dist


def read_tsplib(path: str | Path, vehicles: int | None = None) -> Instance:
    """Read a TSPLIB TSP or CVRP file into a native instance."""
    path = Path(path)
    headers, sections = _parse_tsplib_fields(path.read_text())
    name = headers.get("NAME", path.stem)
    try:
        n = int(headers["DIMENSION"])
    except KeyError:
        raise InstanceError(f"{path}: missing DIMENSION") from None
    weight_type = headers.get("EDGE_WEIGHT_TYPE", "EXPLICIT").upper()

    if weight_type == "EUC_2D":
        rows = sections.get("NODE_COORD_SECTION")
        if not rows:
            raise InstanceError(f"{path}: EUC_2D file lacks NODE_COORD_SECTION")
        coords: list[tuple[float, float]] = [(0.0, 0.0)] * n
        for row in rows:
            parts = row.split()
            coords[int(parts[0]) - 1] = (float(parts[1]), float(parts[2]))
        dist = _euc2d_matrix(coords)
    elif weight_type == "EXPLICIT":
        rows = sections.get("EDGE_WEIGHT_SECTION")
        if not rows:
            raise InstanceError(f"{path}: EXPLICIT file lacks EDGE_WEIGHT_SECTION")
        numbers = [float(tok) for row in rows for tok in row.split()]
        fmt = headers.get("EDGE_WEIGHT_FORMAT", "FULL_MATRIX").upper()
        dist = _explicit_matrix(n, fmt, numbers)
    else:
        raise InstanceError(f"{path}: unsupported EDGE_WEIGHT_TYPE {weight_type!r}")

    problem_type = headers.get("TYPE", "TSP").upper()
    has_demands = "DEMAND_SECTION" in sections
    if problem_type == "CVRP" or has_demands or vehicles is not None:
        demands = [0.0] * n
        for row in sections.get("DEMAND_SECTION", []):
            parts = row.split()
            demands[int(parts[0]) - 1] = float(parts[1])
        capacity = float(headers["CAPACITY"]) if "CAPACITY" in headers else None
        depot = 0
        depot_rows = [
            int(tok)
            for row in sections.get("DEPOT_SECTION", [])
            for tok in row.split()
            if int(tok) > 0
        ]
        if depot_rows:
            depot = depot_rows[0] - 1
        if depot != 0:
            order = [depot] + [i for i in range(n) if i != depot]
            dist = [[dist[a][b] for b in order] for a in order]
            demands = [demands[i] for i in order]
        k = vehicles if vehicles is not None else _vehicles_from_name(name)
        client_demands = demands[1:]
        use_capacity = capacity is not None and any(d > 0 for d in client_demands)
        return VrpInstance(
            name=name,
            dist=dist,
            vehicles=k,
            demands=tuple(client_demands) if use_capacity else None,
            capacity=capacity if use_capacity else None,
        )
    return TspInstance(name=name, dist=dist)


def _vehicles_from_name(name: str) -> int:
    # Augerat-style names carry the truck count as a -k<num> suffix.
    lowered = name.lower()
    if "-k" in lowered:
        tail = lowered.rsplit("-k", 1)[1]
        digits = "".join(ch for ch in tail if ch.isdigit())
        if digits:
            return int(digits)
    return 1


# ----------------------------------------------------------------------
# Plain-text helpers for published BPP / max cut files
# ----------------------------------------------------------------------


def read_bpp_text(path: str | Path, max_bins: int | None = None) -> BppInstance:
    """BPPLIB-style text: item count, capacity, then one weight per line."""
    path = Path(path)
    numbers = [float(tok) for tok in path.read_text().split()]
    if len(numbers) < 3:
        raise InstanceError(f"{path}: too short for a bin packing instance")
    count = int(numbers[0])
    capacity = numbers[1]
    weights = numbers[2:2 + count]
    if len(weights) != count:
        raise InstanceError(f"{path}: expected {count} weights, got {len(weights)}")
    bins = max_bins if max_bins is not None else count
    return BppInstance(
        name=path.stem, weights=tuple(weights), capacity=capacity, max_bins=bins
    )


def read_mcp_text(path: str | Path) -> McpInstance:
    """Rudy-style text: "n m" then one "i j w" edge per line (1-based)."""
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    head = lines[0].split()
    n = int(head[0])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) < 2:
            continue
        i, j = int(parts[0]) - 1, int(parts[1]) - 1
        w = float(parts[2]) if len(parts) > 2 else 1.0
        if i > j:
            i, j = j, i
        edges.append((i, j, w))
    return McpInstance(name=path.stem, n=n, edges=tuple(edges))
