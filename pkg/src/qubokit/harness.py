"""Benchmark harness: load instances, run a solver repeatedly, decode to
original objectives, and emit avg/std/median tables.

Per-run statistics are computed over feasible runs only (infeasible final
samples are counted in ``feasible_count`` and excluded, never silently
penalty-inflated). The standard deviation is the population form. Identical
configurations produce byte-identical CSV/JSON payloads apart from wall
times, which are reported only in the JSON form's ``wall_times`` field.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

from .backends import backend_from_spec
from .bnb import BnbConfig, branch_and_bound, default_qhs_config
from .decomposer import DecomposerConfig, qbsolv_solve
from .encoders import (
    BppInstance,
    Instance,
    McpInstance,
    TspInstance,
    VrpInstance,
    decode_sample,
    encode_instance,
    instance_to_dict,
    load_instance,
    save_instance,
)
from .heuristics import SaConfig, TabuConfig, random_restart_tabu, sa_sample
from .portfolio import PortfolioConfig, default_branches, hss_solve, kerberos_solve
from .qubo import QuboModel
from .rng import make_rng

log = logging.getLogger(__name__)

JSON_SCHEMA_VERSION = 1


# ----------------------------------------------------------------------
# Native brute-force evaluation (independent of all QUBO machinery)
# ----------------------------------------------------------------------


def native_optimum(inst: Instance) -> float:
    """Exact native optimum by direct enumeration of native solutions."""
    if isinstance(inst, TspInstance):
        return _tsp_optimum(inst)
    if isinstance(inst, VrpInstance):
        return _vrp_optimum(inst)
    if isinstance(inst, BppInstance):
        return _bpp_optimum(inst)
    if isinstance(inst, McpInstance):
        return _mcp_optimum(inst)
    raise TypeError(f"not an instance: {inst!r}")


def _tsp_optimum(inst: TspInstance) -> float:
    nodes = range(1, inst.n)
    best = float("inf")
    for perm in itertools.permutations(nodes):
        tour = (0,) + perm
        length = sum(
            inst.dist[tour[i]][tour[(i + 1) % inst.n]] for i in range(inst.n)
        )
        best = min(best, length)
    return best


def _route_cost(inst: VrpInstance, route: tuple[int, ...]) -> float:
    if not route:
        return 0.0
    cost = inst.dist[0][route[0]]
    for a, b in zip(route, route[1:]):
        cost += inst.dist[a][b]
    return cost + inst.dist[route[-1]][0]


def _vrp_optimum(inst: VrpInstance) -> float:
    clients = list(range(1, inst.n_clients + 1))
    k = inst.vehicles
    best = float("inf")
    for assignment in itertools.product(range(k), repeat=len(clients)):
        groups: list[list[int]] = [[] for _ in range(k)]
        for c, r in zip(clients, assignment):
            groups[r].append(c)
        if inst.capacity is not None:
            assert inst.demands is not None
            if any(
                sum(inst.demands[c - 1] for c in g) > inst.capacity for g in groups
            ):
                continue
        total = 0.0
        for g in groups:
            if not g:
                continue
            total += min(
                _route_cost(inst, perm) for perm in itertools.permutations(g)
            )
        best = min(best, total)
    return best


def _bpp_optimum(inst: BppInstance) -> float:
    best: int | None = None
    n = inst.n_items
    for assignment in itertools.product(range(inst.max_bins), repeat=n):
        loads = [0.0] * inst.max_bins
        for i, b in enumerate(assignment):
            loads[b] += inst.weights[i]
        if any(load > inst.capacity for load in loads):
            continue
        used = sum(1 for load in loads if load > 0)
        best = used if best is None else min(best, used)
    if best is None:
        from .errors import InstanceError

        raise InstanceError(
            f"{inst.name}: no packing fits within {inst.max_bins} bins"
        )
    return float(best)


def _mcp_optimum(inst: McpInstance) -> float:
    best = 0.0
    for mask in range(1 << (inst.n - 1)):  # node 0 fixed by symmetry
        side = [0] + [(mask >> (v - 1)) & 1 for v in range(1, inst.n)]
        cut = sum(w for i, j, w in inst.edges if side[i] != side[j])
        best = max(best, cut)
    return best


# ----------------------------------------------------------------------
# Solver dispatch
# ----------------------------------------------------------------------


def _solve_tabu(model: QuboModel, seed: int, opts: dict, backend_spec: str):
    cfg = TabuConfig(max_sweeps=int(opts.get("sweeps", 500)), seed=seed)
    return random_restart_tabu(model, cfg), {}


def _solve_sa(model: QuboModel, seed: int, opts: dict, backend_spec: str):
    cfg = SaConfig.for_model(
        model,
        sweeps=int(opts.get("sweeps", 1000)),
        num_reads=int(opts.get("num_reads", 10)),
        seed=seed,
    )
    return sa_sample(model, cfg).best, {}


def _solve_qbsolv(model: QuboModel, seed: int, opts: dict, backend_spec: str):
    cfg = DecomposerConfig(
        backend=backend_from_spec(backend_spec, seed=seed),
        fraction=float(opts.get("fraction", 0.10)),
        max_rounds=int(opts.get("rounds", 50)),
        stall_rounds=int(opts.get("stall_rounds", 3)),
        seed=seed,
    )
    return qbsolv_solve(model, cfg), {}


def _solve_kerberos(model: QuboModel, seed: int, opts: dict, backend_spec: str):
    backend = backend_from_spec(backend_spec, seed=seed)
    cfg = PortfolioConfig(
        branches=default_branches(backend, seed=seed),
        iterations=int(opts.get("iterations", 10)),
        seed=seed,
        time_limit_s=opts.get("time_limit_s"),
    )
    return kerberos_solve(model, cfg), {}


def _solve_hss(model: QuboModel, seed: int, opts: dict, backend_spec: str):
    backend = backend_from_spec(backend_spec, seed=seed)
    explorer = SaConfig.for_model(
        model, sweeps=int(opts.get("iterations", 300)), seed=seed
    )
    cfg = PortfolioConfig(
        threads=int(opts.get("threads", 4)),
        explorer=explorer,
        exploiter_backend=backend,
        exploiter_fraction=float(opts.get("fraction", 0.10)),
        seed=seed,
    )
    return hss_solve(model, cfg), {}


def _solve_qhs(model: QuboModel, seed: int, opts: dict, backend_spec: str):
    cfg = default_qhs_config(
        seed=seed,
        quantum_backend=backend_from_spec(backend_spec, seed=seed),
        node_limit=int(opts.get("node_limit", 200_000)),
        time_limit_s=opts.get("time_limit_s"),
        leaf_size=int(opts.get("leaf_size", BnbConfig().leaf_size)),
    )
    res = branch_and_bound(model, cfg)
    meta = {"gap": res.gap, "proven_optimal": res.proven_optimal}
    return res.incumbent, meta


SOLVERS = {
    "tabu": _solve_tabu,
    "sa": _solve_sa,
    "qbsolv": _solve_qbsolv,
    "kerberos": _solve_kerberos,
    "hss": _solve_hss,
    "qhs": _solve_qhs,
}


# ----------------------------------------------------------------------
# Run configuration and statistics
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    instances: tuple[str, ...]
    solver: str
    solver_options: dict = field(default_factory=dict)
    repetitions: int = 10
    base_seed: int = 0
    output_format: str = "table"
    backend: str = "exact"
    strict: bool = False

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be positive, got {self.repetitions}")
        if self.output_format not in ("table", "csv", "json"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        return cls(
            instances=tuple(doc["instances"]),
            solver=doc["solver"],
            solver_options=dict(doc.get("solver_options", {})),
            repetitions=int(doc.get("repetitions", 10)),
            base_seed=int(doc.get("base_seed", 0)),
            output_format=doc.get("output_format", "table"),
            backend=doc.get("backend", "exact"),
            strict=bool(doc.get("strict", False)),
        )


@dataclass(frozen=True)
class RunStats:
    """Per-instance summary over the repetition runs."""

    instance: str
    objectives: tuple[float | None, ...] = ()
    feasible_count: int = 0
    avg: float | None = None
    std: float | None = None
    median: float | None = None
    best: float | None = None
    wall_times: tuple[float, ...] = ()
    gaps: tuple[float, ...] | None = None
    error: str | None = None

    @classmethod
    def from_objectives(
        cls,
        instance: str,
        objectives: list[float | None],
        wall_times: list[float],
        gaps: list[float] | None = None,
    ) -> "RunStats":
        feasible = [o for o in objectives if o is not None]
        if feasible:
            stats_fields = dict(
                avg=statistics.fmean(feasible),
                std=statistics.pstdev(feasible),
                median=statistics.median(feasible),
                best=min(feasible),
            )
        else:
            stats_fields = dict(avg=None, std=None, median=None, best=None)
        return cls(
            instance=instance,
            objectives=tuple(objectives),
            feasible_count=len(feasible),
            wall_times=tuple(wall_times),
            gaps=tuple(gaps) if gaps is not None else None,
            **stats_fields,
        )


def run_benchmark(cfg: RunConfig) -> list[RunStats]:
    """Encode each instance, solve it ``repetitions`` times with seeds
    base_seed + r, and decode each best sample to its native objective.

    Unparseable instances produce an error entry and the run continues;
    an unknown solver fails immediately.
    """
    if cfg.solver not in SOLVERS:
        raise ValueError(f"unknown solver {cfg.solver!r}; known: {sorted(SOLVERS)}")
    solve = SOLVERS[cfg.solver]

    results: list[RunStats] = []
    for path in cfg.instances:
        try:
            inst = load_instance(path)
            model, enc = encode_instance(inst)
        except Exception as exc:
            log.warning("skipping instance %s: %s", path, exc)
            results.append(RunStats(instance=Path(path).stem, error=str(exc)))
            continue
        objectives: list[float | None] = []
        walls: list[float] = []
        gaps: list[float] = []
        for r in range(cfg.repetitions):
            seed = cfg.base_seed + r
            t0 = time.perf_counter()
            record, meta = solve(model, seed, cfg.solver_options, cfg.backend)
            walls.append(time.perf_counter() - t0)
            decoded = decode_sample(enc, record.bits, inst)
            objectives.append(decoded.objective if decoded.feasible else None)
            if "gap" in meta:
                gaps.append(meta["gap"])
        results.append(
            RunStats.from_objectives(
                inst.name, objectives, walls, gaps if gaps else None
            )
        )
    return results


# ----------------------------------------------------------------------
# Emission
# ----------------------------------------------------------------------

_COLUMNS = ("instance", "avg", "std", "median", "best", "feasible_count")


def _row(stats: RunStats) -> list[str]:
    def one_dec(value: float | None) -> str:
        return "" if value is None else f"{value:.1f}"

    return [
        stats.instance,
        one_dec(stats.avg),
        "" if stats.std is None else f"{stats.std:.2f}",
        one_dec(stats.median),
        one_dec(stats.best),
        str(stats.feasible_count),
    ]


def emit_table(stats: list[RunStats]) -> str:
    rows = [list(_COLUMNS)] + [_row(s) for s in stats]
    widths = [max(len(r[c]) for r in rows) for c in range(len(_COLUMNS))]
    lines = [
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in rows
    ]
    return "\n".join(lines) + "\n"


def emit_csv(stats: list[RunStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_COLUMNS)
    for s in stats:
        writer.writerow(_row(s))
    return buf.getvalue()


def emit_json(stats: list[RunStats]) -> str:
    doc = {
        "schema_version": JSON_SCHEMA_VERSION,
        "stats": [
            {
                "instance": s.instance,
                "objectives": list(s.objectives),
                "feasible_count": s.feasible_count,
                "avg": s.avg,
                "std": s.std,
                "median": s.median,
                "best": s.best,
                "wall_times": list(s.wall_times),
                "gaps": list(s.gaps) if s.gaps is not None else None,
                "error": s.error,
            }
            for s in stats
        ],
    }
    return json.dumps(doc, indent=1) + "\n"


def stats_from_json(text: str) -> list[RunStats]:
    doc = json.loads(text)
    if doc.get("schema_version") != JSON_SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {doc.get('schema_version')!r}")
    out = []
    for entry in doc["stats"]:
        out.append(
            RunStats(
                instance=entry["instance"],
                objectives=tuple(entry["objectives"]),
                feasible_count=entry["feasible_count"],
                avg=entry["avg"],
                std=entry["std"],
                median=entry["median"],
                best=entry["best"],
                wall_times=tuple(entry["wall_times"]),
                gaps=tuple(entry["gaps"]) if entry["gaps"] is not None else None,
                error=entry["error"],
            )
        )
    return out


def emit(stats: list[RunStats], output_format: str) -> str:
    if output_format == "table":
        return emit_table(stats)
    if output_format == "csv":
        return emit_csv(stats)
    if output_format == "json":
        return emit_json(stats)
    raise ValueError(f"unknown output format {output_format!r}")


# ----------------------------------------------------------------------
# Micro-instance corpus
# ----------------------------------------------------------------------


def _symmetric_int_matrix(rng, size: int, low: int = 1, high: int = 99) -> list[list[float]]:
    dist = [[0.0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            d = float(rng.integers(low, high + 1))
            dist[i][j] = dist[j][i] = d
    return dist


def gen_micro_instances(seed: int, out_dir: str | Path) -> Path:
    """Write a desk-scale corpus with brute-force-verifiable optima.

    Sizes keep every QUBO encoding at or below 25 variables so optimality
    proofs complete in seconds. The manifest records each native optimum
    computed by :func:`native_optimum`; it is regenerated on every call,
    never edited.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = make_rng(seed)

    instances: list[Instance] = [
        TspInstance(name="micro_tsp_4", dist=_symmetric_int_matrix(rng, 4)),
        TspInstance(name="micro_tsp_5", dist=_symmetric_int_matrix(rng, 5)),
        VrpInstance(
            name="micro_vrp_3_k1", dist=_symmetric_int_matrix(rng, 4), vehicles=1
        ),
        VrpInstance(
            name="micro_vrp_3_k2", dist=_symmetric_int_matrix(rng, 4), vehicles=2
        ),
        _micro_bpp(rng, name="micro_bpp_3", items=3, capacity=10.0, max_bins=2,
                   low=3, high=8),
        _micro_bpp(rng, name="micro_bpp_4", items=4, capacity=7.0, max_bins=3,
                   low=2, high=5),
        McpInstance(
            name="micro_mcp_3", n=3, edges=((0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0))
        ),
        _micro_mcp(rng, name="micro_mcp_8", n=8, density=0.5),
        _micro_mcp(rng, name="micro_mcp_12", n=12, density=0.35),
    ]

    manifest = {"seed": int(seed), "instances": []}
    for inst in instances:
        file_name = f"{inst.name}.json"
        save_instance(inst, out / file_name)
        manifest["instances"].append(
            {
                "file": file_name,
                "kind": instance_to_dict(inst)["kind"],
                "name": inst.name,
                "optimum": native_optimum(inst),
            }
        )
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=1) + "\n")
    return manifest_path


def _micro_bpp(
    rng, name: str, items: int, capacity: float, max_bins: int, low: int, high: int
) -> BppInstance:
    # Resample until a packing actually fits max_bins (the volume bound
    # alone does not guarantee one); keeps encodings at <= 24 variables.
    while True:
        weights = tuple(float(rng.integers(low, high + 1)) for _ in range(items))
        if sum(weights) > capacity * max_bins:
            continue
        inst = BppInstance(
            name=name, weights=weights, capacity=capacity, max_bins=max_bins
        )
        try:
            _bpp_optimum(inst)
        except Exception:
            continue
        return inst


def _micro_mcp(rng, name: str, n: int, density: float) -> McpInstance:
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                edges.append((i, j, float(rng.integers(1, 10))))
    # Guarantee connectivity-ish structure: add a spanning path.
    present = {(i, j) for i, j, _ in edges}
    for i in range(n - 1):
        if (i, i + 1) not in present:
            edges.append((i, i + 1, float(rng.integers(1, 10))))
    edges.sort()
    return McpInstance(name=name, n=n, edges=tuple(edges))
