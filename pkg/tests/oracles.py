"""Independent brute-force oracles used only by the test suite.

These deliberately avoid the package's incremental/Gray-code machinery:
energies come from direct vectorized evaluation of explicit bit tables, so
they form the second route of every dual-route check.
"""

from __future__ import annotations

import numpy as np

from qubokit.qubo import QuboModel

CHUNK_BITS = 16


def bit_table(n: int, start: int, count: int) -> np.ndarray:
    """Rows start..start+count-1 of the truth table; column i is bit i."""
    idx = np.arange(start, start + count, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.float64)


def energies_of(model: QuboModel, table: np.ndarray) -> np.ndarray:
    """Direct evaluation of every row of a 0/1 table."""
    e = np.full(table.shape[0], float(model.offset))
    for i, c in model.linear.items():
        e += c * table[:, i]
    for (i, j), c in model.quadratic.items():
        e += c * table[:, i] * table[:, j]
    return e


def brute_force_minimum(model: QuboModel) -> tuple[float, tuple[int, ...]]:
    """Truth-table minimum with bit-lexicographic tie-breaking."""
    n = model.n
    if n == 0:
        return float(model.offset), ()
    best_e = np.inf
    best_bits: tuple[int, ...] | None = None
    total = 1 << n
    step = 1 << min(n, CHUNK_BITS)
    for start in range(0, total, step):
        table = bit_table(n, start, min(step, total - start))
        e = energies_of(model, table)
        lo = e.min()
        if lo > best_e:
            continue
        for row in np.flatnonzero(e == lo):
            bits = tuple(int(b) for b in table[row])
            if lo < best_e or (lo == best_e and bits < best_bits):
                best_e, best_bits = float(lo), bits
    assert best_bits is not None
    return best_e, best_bits


def brute_force_all(model: QuboModel) -> np.ndarray:
    """All 2^n energies, indexed by sample integer (bit i = (s >> i) & 1)."""
    n = model.n
    total = 1 << n
    out = np.empty(total)
    step = 1 << min(n, CHUNK_BITS)
    for start in range(0, total, step):
        table = bit_table(n, start, min(step, total - start))
        out[start:start + table.shape[0]] = energies_of(model, table)
    return out


def random_model(
    rng: np.random.Generator,
    n: int | None = None,
    max_n: int = 12,
    density: float | None = None,
) -> QuboModel:
    """Random sparse QUBO with continuous coefficients in [-2, 2]."""
    if n is None:
        n = int(rng.integers(1, max_n + 1))
    if density is None:
        density = float(rng.uniform(0.2, 1.0))
    linear = {}
    for i in range(n):
        if rng.random() < 0.8:
            c = float(rng.uniform(-2.0, 2.0))
            if c != 0.0:
                linear[i] = c
    quadratic = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                c = float(rng.uniform(-2.0, 2.0))
                if c != 0.0:
                    quadratic[(i, j)] = c
    offset = float(rng.uniform(-1.0, 1.0))
    return QuboModel(n=n, linear=linear, quadratic=quadratic, offset=offset)
