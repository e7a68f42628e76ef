"""Pluggable sampler backends through which hybrid workflows dispatch QUBOs.

A backend is anything with a ``sample`` method returning a locally-verified
:class:`~qubokit.qubo.SampleSet`. Local stand-ins (exact enumeration,
simulated annealing) and a remote HTTP client are provided; the framework
never trusts energies reported by a remote service.
"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
import numpy as np
from numba import njit

from .errors import CapacityError, ProtocolError, TransportError
from .heuristics import SaConfig, sa_sample
from .qubo import QuboModel, SampleRecord, SampleSet, energy

EXACT_CAP = 24  # 2^24 incremental evaluations stay sub-second


class SamplerBackend(ABC):
    """Interface every sampler backend implements.

    ``max_vars`` is the capacity bound (None = unbounded); ``exact`` marks
    backends whose best record is a certified global optimum for any model
    within capacity. Backends must be safely callable from multiple workers
    over the shared immutable model.
    """

    name: str = "backend"
    max_vars: int | None = None
    exact: bool = False

    @abstractmethod
    def sample(self, model: QuboModel, num_reads: int = 1) -> SampleSet:
        raise NotImplementedError


# ----------------------------------------------------------------------
# Exact enumeration
# ----------------------------------------------------------------------


@njit(cache=True)
def _gray_minimum(n, lin, nbr_ptr, nbr_idx, nbr_coef, offset):  # pragma: no cover
    """Minimum of the incremental Gray-code energy stream."""
    x = np.zeros(n, dtype=np.uint8)
    e = offset
    best_e = e
    for k in range(1, 1 << n):
        # Gray code: flip the index of the lowest set bit of k.
        i = 0
        kk = k
        while kk & 1 == 0:
            kk >>= 1
            i += 1
        f = lin[i]
        for p in range(nbr_ptr[i], nbr_ptr[i + 1]):
            if x[nbr_idx[p]]:
                f += nbr_coef[p]
        if x[i]:
            e -= f
            x[i] = 0
        else:
            e += f
            x[i] = 1
        if e < best_e:
            best_e = e
    return best_e


@njit(cache=True)
def _gray_collect(n, lin, nbr_ptr, nbr_idx, nbr_coef, offset, threshold, buf):  # pragma: no cover
    """Replay the stream, collecting sample keys with energy <= threshold.

    Keys pack bit i at position n-1-i so that smaller keys are
    bit-lexicographically smaller samples. Returns the number of matches,
    which may exceed the buffer size (caller re-runs with a larger one).
    """
    x = np.zeros(n, dtype=np.uint8)
    e = offset
    cur_key = np.int64(0)
    count = 0
    if e <= threshold:
        buf[0] = cur_key
        count = 1
    for k in range(1, 1 << n):
        i = 0
        kk = k
        while kk & 1 == 0:
            kk >>= 1
            i += 1
        f = lin[i]
        for p in range(nbr_ptr[i], nbr_ptr[i + 1]):
            if x[nbr_idx[p]]:
                f += nbr_coef[p]
        bit = np.int64(1) << (n - 1 - i)
        if x[i]:
            e -= f
            x[i] = 0
            cur_key &= ~bit
        else:
            e += f
            x[i] = 1
            cur_key |= bit
        if e <= threshold:
            if count < buf.shape[0]:
                buf[count] = cur_key
            count += 1
    return count


def _csr_arrays(model: QuboModel):
    n = model.n
    lin = np.zeros(n, dtype=np.float64)
    for i, c in model.linear.items():
        lin[i] = c
    counts = [len(model.neighbors[i]) for i in range(n)]
    ptr = np.zeros(n + 1, dtype=np.int64)
    ptr[1:] = np.cumsum(counts)
    idx = np.zeros(ptr[-1], dtype=np.int64)
    coef = np.zeros(ptr[-1], dtype=np.float64)
    pos = 0
    for i in range(n):
        for j, c in model.neighbors[i]:
            idx[pos] = j
            coef[pos] = c
            pos += 1
    return lin, ptr, idx, coef


def exact_solve(model: QuboModel) -> SampleRecord:
    """Certified global minimum by exhaustive Gray-code enumeration.

    The incremental stream locates the minimum; every sample within a
    drift-sized tolerance of it is then re-evaluated directly, and the
    winner is the exact-energy minimum with ties broken
    bit-lexicographically. This keeps tie-breaking deterministic even
    though 2^n incremental additions accumulate rounding.
    """
    n = model.n
    if n > EXACT_CAP:
        raise CapacityError(f"model has {n} variables; exact cap is {EXACT_CAP}")
    if n == 0:
        return SampleRecord.evaluate(model, ())
    lin, ptr, idx, coef = _csr_arrays(model)
    offset = float(model.offset)
    stream_min = _gray_minimum(n, lin, ptr, idx, coef, offset)
    threshold = stream_min + 1e-7 * (1.0 + abs(stream_min))
    buf = np.zeros(4096, dtype=np.int64)
    count = _gray_collect(n, lin, ptr, idx, coef, offset, threshold, buf)
    if count > buf.shape[0]:
        buf = np.zeros(count, dtype=np.int64)
        count = _gray_collect(n, lin, ptr, idx, coef, offset, threshold, buf)
    best: SampleRecord | None = None
    for key in buf[:count]:
        bits = tuple((int(key) >> (n - 1 - i)) & 1 for i in range(n))
        rec = SampleRecord.evaluate(model, bits)
        if best is None or rec.sort_key() < best.sort_key():
            best = rec
    assert best is not None
    return best


class ExactBackend(SamplerBackend):
    """Exhaustive enumeration behind the backend interface."""

    name = "exact"
    max_vars = EXACT_CAP
    exact = True

    def sample(self, model: QuboModel, num_reads: int = 1) -> SampleSet:
        rec = exact_solve(model)
        rec = SampleRecord(rec.bits, rec.energy, occurrences=max(1, num_reads))
        return SampleSet.from_records(model, [rec])


# ----------------------------------------------------------------------
# Annealing stand-in for a quantum sampler
# ----------------------------------------------------------------------


class AnnealBackend(SamplerBackend):
    """Simulated-annealing sampler standing in for quantum hardware.

    With no explicit config, a scale-aware schedule is derived per model
    from the given seed, so the backend works unchanged across subproblem
    sizes (as the decomposition workflows require).
    """

    name = "anneal"
    max_vars = None
    exact = False

    def __init__(self, cfg: SaConfig | None = None, seed: int = 0,
                 sweeps: int = 500, num_reads: int = 8):
        self.cfg = cfg
        self.seed = seed
        self.sweeps = sweeps
        self.num_reads = num_reads

    def sample(self, model: QuboModel, num_reads: int = 1) -> SampleSet:
        if self.cfg is not None:
            cfg = self.cfg
            if num_reads > 1 and num_reads != cfg.num_reads:
                cfg = SaConfig(cfg.t_initial, cfg.t_final, cfg.sweeps,
                               num_reads, cfg.seed)
        else:
            cfg = SaConfig.for_model(
                model,
                sweeps=self.sweeps,
                num_reads=max(num_reads, self.num_reads),
                seed=self.seed,
            )
        if model.n == 0:
            return SampleSet.from_records(model, [SampleRecord.evaluate(model, ())])
        return sa_sample(model, cfg)


def anneal_backend(cfg: SaConfig) -> AnnealBackend:
    """Wrap an explicit annealing config as a sampler backend."""
    return AnnealBackend(cfg=cfg)


# ----------------------------------------------------------------------
# Remote sampler client
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class RemoteSamplerConfig:
    """Connection settings for an HTTP sampler service."""

    endpoint: str
    timeout_ms: int = 10_000
    num_reads: int = 10
    auth_token: str | None = None
    pool_size: int = 4

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ValueError(f"timeout must be positive, got {self.timeout_ms}")


ENERGY_MISMATCH_TOL = 1e-6


def _parse_remote_payload(
    model: QuboModel, payload: dict
) -> tuple[list[SampleRecord], int]:
    if not isinstance(payload, dict) or "samples" not in payload:
        raise ProtocolError("remote reply missing 'samples' field")
    records: list[SampleRecord] = []
    mismatches = 0
    for entry in payload["samples"]:
        try:
            bits = entry["bits"]
            reported = float(entry["energy"])
            occurrences = int(entry.get("occurrences", 1))
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed sample entry: {entry!r}") from exc
        try:
            local = energy(model, bits)
        except (ValueError, TypeError) as exc:
            raise ProtocolError(f"invalid bits in sample entry: {entry!r}") from exc
        if abs(local - reported) > ENERGY_MISMATCH_TOL:
            mismatches += 1
        # Local evaluation is authoritative regardless of the reported value.
        records.append(SampleRecord(tuple(int(b) for b in bits), local, occurrences))
    return records, mismatches


def remote_sample(
    cfg: RemoteSamplerConfig,
    model: QuboModel,
    num_reads: int,
    session=None,
) -> SampleSet:
    """POST the model to ``{endpoint}/sample`` and verify the reply locally.

    Every returned energy is recomputed from the model; values off by more
    than ``ENERGY_MISMATCH_TOL`` are counted in the sample set's
    ``info["energy_mismatches"]`` and replaced by the local value.
    """
    import requests

    url = cfg.endpoint.rstrip("/") + "/sample"
    headers = {"Content-Type": "application/json"}
    if cfg.auth_token:
        headers["Authorization"] = f"Bearer {cfg.auth_token}"
    body = {"model": model.to_json_dict(), "num_reads": int(num_reads)}
    http = session or requests
    try:
        resp = http.post(url, json=body, headers=headers, timeout=cfg.timeout_ms / 1000.0)
    except requests.exceptions.RequestException as exc:
        raise TransportError(f"sampler at {url} unreachable: {exc}") from exc
    if resp.status_code >= 500:
        raise TransportError(f"sampler at {url} failed with HTTP {resp.status_code}")
    if resp.status_code != 200:
        raise ProtocolError(f"sampler at {url} rejected request: HTTP {resp.status_code}")
    try:
        payload = resp.json()
    except (ValueError, json.JSONDecodeError) as exc:
        raise ProtocolError(f"sampler reply is not JSON: {exc}") from exc
    records, mismatches = _parse_remote_payload(model, payload)
    if not records:
        raise ProtocolError("sampler reply contained no samples")
    return SampleSet.from_records(model, records, info={"energy_mismatches": mismatches})


class RemoteBackend(SamplerBackend):
    """HTTP sampler client with a pooled connection session."""

    exact = False
    max_vars = None

    def __init__(self, cfg: RemoteSamplerConfig):
        import requests

        self.cfg = cfg
        self.name = f"remote:{cfg.endpoint}"
        self._session = requests.Session()
        adapter = requests.adapters.HTTPAdapter(
            pool_connections=cfg.pool_size, pool_maxsize=cfg.pool_size
        )
        self._session.mount("http://", adapter)
        self._session.mount("https://", adapter)

    def sample(self, model: QuboModel, num_reads: int = 1) -> SampleSet:
        reads = num_reads if num_reads > 1 else self.cfg.num_reads
        return remote_sample(self.cfg, model, reads, session=self._session)


def backend_from_spec(spec: str, seed: int = 0) -> SamplerBackend:
    """Build a backend from a CLI-style spec: exact | anneal | remote:<url>."""
    if spec == "exact":
        return ExactBackend()
    if spec == "anneal":
        return AnnealBackend(seed=seed)
    if spec.startswith("remote:"):
        return RemoteBackend(RemoteSamplerConfig(endpoint=spec[len("remote:"):]))
    raise ValueError(f"unknown backend spec {spec!r}")
