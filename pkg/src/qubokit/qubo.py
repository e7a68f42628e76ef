"""Sparse QUBO data model and energy arithmetic.

A model represents

    E(x) = offset + sum_i linear[i] * x_i + sum_{i<j} quadratic[i, j] * x_i * x_j

over binary variables x in {0, 1}^n. Everything in qubokit minimizes E;
maximization problems are negated at encoding time.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import DimensionError

# A sample is a plain sequence of 0/1 ints; records store it as a tuple.
Bits = tuple[int, ...]


def as_bits(sample: Sequence[int], n: int | None = None) -> Bits:
    """Coerce a 0/1 sequence into a canonical bits tuple, validating values."""
    bits = tuple(int(b) for b in sample)
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"sample entries must be 0 or 1, got {sample!r}")
    if n is not None and len(bits) != n:
        raise DimensionError(f"sample length {len(bits)} != model size {n}")
    return bits


@dataclass(frozen=True)
class QuboModel:
    """Immutable sparse QUBO over variables 0..n-1.

    Invariants enforced at construction:
      - all term indices lie in [0, n);
      - quadratic keys satisfy i < j strictly (diagonals belong in ``linear``
        because x^2 = x for binaries);
      - no stored coefficient is exactly zero.

    Use :meth:`from_terms` to build from unnormalized dictionaries.
    """

    n: int
    linear: dict[int, float] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"variable count must be non-negative, got {self.n}")
        for i, c in self.linear.items():
            if not (0 <= i < self.n):
                raise ValueError(f"linear index {i} out of range [0, {self.n})")
            if c == 0.0:
                raise ValueError(f"zero linear coefficient stored at {i}")
        for (i, j), c in self.quadratic.items():
            if not (0 <= i < j < self.n):
                raise ValueError(
                    f"quadratic key ({i},{j}) must satisfy 0 <= i < j < {self.n}"
                )
            if c == 0.0:
                raise ValueError(f"zero quadratic coefficient stored at ({i},{j})")

    @classmethod
    def from_terms(
        cls,
        n: int,
        linear: Mapping[int, float] | None = None,
        quadratic: Mapping[tuple[int, int], float] | None = None,
        offset: float = 0.0,
    ) -> "QuboModel":
        """Build a model from unnormalized term maps.

        Keys (j, i) are folded onto (i, j), diagonal keys (i, i) fold into
        the linear term, repeated keys accumulate, and exact zeros are
        dropped.
        """
        lin: dict[int, float] = {}
        for i, c in (linear or {}).items():
            lin[int(i)] = lin.get(int(i), 0.0) + float(c)
        quad: dict[tuple[int, int], float] = {}
        for (i, j), c in (quadratic or {}).items():
            i, j = int(i), int(j)
            if i == j:
                lin[i] = lin.get(i, 0.0) + float(c)
                continue
            key = (i, j) if i < j else (j, i)
            quad[key] = quad.get(key, 0.0) + float(c)
        lin = {i: c for i, c in lin.items() if c != 0.0}
        quad = {k: c for k, c in quad.items() if c != 0.0}
        return cls(n=n, linear=lin, quadratic=quad, offset=float(offset))

    # ------------------------------------------------------------------
    # Derived structure
    # ------------------------------------------------------------------

    @cached_property
    def neighbors(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        """Per-variable quadratic adjacency: neighbors[i] = ((j, c), ...)."""
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for (i, j), c in self.quadratic.items():
            adj[i].append((j, c))
            adj[j].append((i, c))
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def max_abs_field(self) -> float:
        """Largest possible |single-flip delta| over any sample.

        max_i ( |linear_i| + sum_j |quadratic_ij| ); used for scale-aware
        annealing schedules.
        """
        best = 0.0
        for i in range(self.n):
            tot = abs(self.linear.get(i, 0.0))
            tot += sum(abs(c) for _, c in self.neighbors[i])
            best = max(best, tot)
        return best

    @cached_property
    def fingerprint(self) -> str:
        """Deterministic content hash; equal models hash equal.

        Terms are serialized in sorted key order with exact float reprs, so
        the hash is independent of dict insertion order and stable across
        runs and platforms.
        """
        h = hashlib.sha256()
        h.update(f"n={self.n};offset={self.offset!r};".encode())
        for i in sorted(self.linear):
            h.update(f"l{i}={self.linear[i]!r};".encode())
        for i, j in sorted(self.quadratic):
            h.update(f"q{i},{j}={self.quadratic[(i, j)]!r};".encode())
        return h.hexdigest()

    def __repr__(self) -> str:
        return (
            f"QuboModel(n={self.n}, linear_terms={len(self.linear)}, "
            f"quadratic_terms={len(self.quadratic)}, offset={self.offset})"
        )

    # ------------------------------------------------------------------
    # Serialization (see README: QUBO JSON document)
    # ------------------------------------------------------------------

    def to_json_dict(self) -> dict:
        """Plain-JSON form; round-trips 64-bit float coefficients exactly."""
        return {
            "n": self.n,
            "linear": [[i, self.linear[i]] for i in sorted(self.linear)],
            "quadratic": [[i, j, self.quadratic[(i, j)]] for i, j in sorted(self.quadratic)],
            "offset": self.offset,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "QuboModel":
        try:
            n = int(doc["n"])
            linear = {int(i): float(c) for i, c in doc.get("linear", [])}
            quadratic = {}
            for i, j, c in doc.get("quadratic", []):
                i, j = int(i), int(j)
                if i >= j:
                    raise ValueError(f"quadratic entry ({i},{j}) must have i < j")
                quadratic[(i, j)] = float(c)
            offset = float(doc.get("offset", 0.0))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed QUBO document: {exc}") from exc
        return cls(n=n, linear=linear, quadratic=quadratic, offset=offset)

    @classmethod
    def from_json(cls, text: str) -> "QuboModel":
        return cls.from_json_dict(json.loads(text))


def fingerprint(model: QuboModel) -> str:
    """Content hash of a model (see :attr:`QuboModel.fingerprint`)."""
    return model.fingerprint


def energy(model: QuboModel, sample: Sequence[int]) -> float:
    """Evaluate the model energy for a binary assignment."""
    bits = as_bits(sample, model.n)
    e = model.offset
    for i, c in model.linear.items():
        if bits[i]:
            e += c
    for (i, j), c in model.quadratic.items():
        if bits[i] and bits[j]:
            e += c
    return e


def delta_energy_flip(model: QuboModel, sample: Sequence[int], i: int) -> float:
    """Energy change from flipping variable ``i``, in O(degree(i)).

    Equals energy(flip(sample, i)) - energy(sample): the local field of
    variable i (linear term plus active quadratic couplings) enters with
    sign +1 when the flip sets the bit and -1 when it clears it.
    """
    bits = as_bits(sample, model.n)
    if not (0 <= i < model.n):
        raise IndexError(f"variable index {i} out of range [0, {model.n})")
    f = model.linear.get(i, 0.0)
    for j, c in model.neighbors[i]:
        if bits[j]:
            f += c
    return f if bits[i] == 0 else -f


@dataclass(frozen=True)
class SampleRecord:
    """A binary assignment with its energy and an occurrence count.

    Build through :meth:`evaluate` so the stored energy always matches the
    producing model.
    """

    bits: Bits
    energy: float
    occurrences: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", as_bits(self.bits))
        if self.occurrences < 1:
            raise ValueError(f"occurrences must be positive, got {self.occurrences}")

    @classmethod
    def evaluate(
        cls, model: QuboModel, sample: Sequence[int], occurrences: int = 1
    ) -> "SampleRecord":
        bits = as_bits(sample, model.n)
        return cls(bits=bits, energy=energy(model, bits), occurrences=occurrences)

    def sort_key(self) -> tuple[float, Bits]:
        return (self.energy, self.bits)


@dataclass(frozen=True)
class SampleSet:
    """Energy-sorted collection of records from a single model.

    Records are sorted ascending by energy with ties broken by
    bit-lexicographic order, making the order total and deterministic.
    ``info`` carries backend metadata (e.g. remote energy-mismatch flags).
    """

    records: tuple[SampleRecord, ...]
    model_fingerprint: str
    info: dict = field(default_factory=dict)

    @classmethod
    def from_records(
        cls,
        model: QuboModel,
        records: Iterable[SampleRecord],
        info: dict | None = None,
    ) -> "SampleSet":
        """Sort, aggregate duplicate assignments, and stamp the fingerprint."""
        by_bits: dict[Bits, SampleRecord] = {}
        for rec in records:
            if len(rec.bits) != model.n:
                raise DimensionError(
                    f"record has {len(rec.bits)} bits, model has {model.n} variables"
                )
            prev = by_bits.get(rec.bits)
            if prev is None:
                by_bits[rec.bits] = rec
            else:
                by_bits[rec.bits] = SampleRecord(
                    bits=rec.bits,
                    energy=prev.energy,
                    occurrences=prev.occurrences + rec.occurrences,
                )
        ordered = tuple(sorted(by_bits.values(), key=SampleRecord.sort_key))
        return cls(
            records=ordered,
            model_fingerprint=model.fingerprint,
            info=dict(info or {}),
        )

    @property
    def best(self) -> SampleRecord:
        if not self.records:
            raise ValueError("empty sample set has no best record")
        return self.records[0]

    def merge(self, other: "SampleSet") -> "SampleSet":
        """Combine two sets produced from the same model."""
        if self.model_fingerprint != other.model_fingerprint:
            raise ValueError("cannot merge sample sets from different models")
        by_bits: dict[Bits, SampleRecord] = {}
        for rec in self.records + other.records:
            prev = by_bits.get(rec.bits)
            if prev is None:
                by_bits[rec.bits] = rec
            else:
                by_bits[rec.bits] = SampleRecord(
                    rec.bits, prev.energy, prev.occurrences + rec.occurrences
                )
        ordered = tuple(sorted(by_bits.values(), key=SampleRecord.sort_key))
        info = {**self.info, **other.info}
        return SampleSet(ordered, self.model_fingerprint, info)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)
