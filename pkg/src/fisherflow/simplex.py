"""Probability simplex primitives: states, tangent vectors, maps, generators.

Conventions used throughout the package:

* Transition matrices are column stochastic: ``T[i, j]`` is the
  probability of moving to ``i`` given ``j``, columns sum to one, and
  states evolve by left multiplication ``T @ p``.
* Generators have vanishing column sums; the off-diagonal entry
  ``R[i, j]`` is the instantaneous rate from ``j`` into ``i``.
* Composite spaces are flattened row-major with the system index
  outermost, exactly as produced by ``numpy.kron``.
* All indices are 0-based.

Constructors validate and return read-only arrays; operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, NamedTuple

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidGeneratorError,
    InvalidStateError,
    InvalidStochasticMatrixError,
    InvalidTangentError,
    ResourceLimitError,
)

#: Entries below this are treated as touching the simplex boundary.
INTERIOR_FLOOR = 1e-12

#: Negative entries no deeper than this are clamped to zero on validation.
NEGATIVE_CLAMP = 1e-12

#: Column sums of stochastic matrices / generators must match to this.
COLUMN_TOL = 1e-9

#: Hard cap on the dimension produced by tensor constructions.
MAX_TENSOR_DIM = 4096


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _as_vector(entries, name: str) -> np.ndarray:
    v = np.array(entries, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise DimensionMismatchError(f"{name} must be a 1-d vector of length >= 2, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidStateError(f"{name} contains non-finite entries")
    return v


def _as_square(entries, name: str) -> np.ndarray:
    m = np.array(entries, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
        raise DimensionMismatchError(f"{name} must be square with size >= 2, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidStateError(f"{name} contains non-finite entries")
    return m


def prob_vec(entries, clamp: float = NEGATIVE_CLAMP) -> np.ndarray:
    """Validate and renormalize a probability vector.

    Entries more negative than ``-clamp`` are rejected; tiny negatives are
    clamped to zero before renormalization.
    """
    p = _as_vector(entries, "state")
    if np.min(p) < -clamp:
        raise InvalidStateError(f"state has a negative entry {np.min(p):.3e}")
    p = np.where(p < 0.0, 0.0, p)
    total = p.sum()
    if total <= 0.0:
        raise InvalidStateError("state has zero total mass")
    return _freeze(p / total)


def is_interior(p: np.ndarray, floor: float = INTERIOR_FLOOR) -> bool:
    """True when every entry stays clear of the simplex boundary."""
    return bool(np.min(p) >= floor)


def tangent_vec(entries, sum_tol: float = 1e-12) -> np.ndarray:
    """Validate a zero-sum displacement on the simplex."""
    d = _as_vector(entries, "tangent vector")
    if abs(d.sum()) > sum_tol:
        raise InvalidTangentError(f"entries sum to {d.sum():.3e}, expected 0 within {sum_tol:.0e}")
    return _freeze(d)


def stochastic_matrix(entries, col_tol: float = COLUMN_TOL, clamp: float = NEGATIVE_CLAMP) -> np.ndarray:
    """Validate a column-stochastic matrix, clamping float-noise negatives."""
    t = _as_square(entries, "stochastic matrix")
    if np.min(t) < -clamp:
        raise InvalidStochasticMatrixError(f"entry {np.min(t):.3e} below the clamp window")
    t = np.where(t < 0.0, 0.0, t)
    dev = np.max(np.abs(t.sum(axis=0) - 1.0))
    if dev > col_tol:
        raise InvalidStochasticMatrixError(f"column sums off by {dev:.3e} (tolerance {col_tol:.0e})")
    return _freeze(t)


def rate_matrix(entries, col_tol: float = COLUMN_TOL) -> np.ndarray:
    """Validate a generator: column sums must vanish. Signs are not restricted."""
    r = _as_square(entries, "rate matrix")
    dev = np.max(np.abs(r.sum(axis=0)))
    if dev > col_tol:
        raise InvalidGeneratorError(f"column sums off by {dev:.3e} (tolerance {col_tol:.0e})")
    return _freeze(r)


def rate_matrix_from_rates(rates: Mapping[tuple[int, int], float], dim: int) -> np.ndarray:
    """Assemble a generator from off-diagonal rates; diagonal balances each column."""
    r = np.zeros((dim, dim))
    for (i, j), a in rates.items():
        if not (0 <= i < dim and 0 <= j < dim) or i == j:
            raise InvalidGeneratorError(f"rate index ({i}, {j}) invalid for dimension {dim}")
        r[i, j] = float(a)
    np.fill_diagonal(r, 0.0)
    np.fill_diagonal(r, -r.sum(axis=0))
    return _freeze(r)


@dataclass(frozen=True)
class StochasticityReport:
    """Outcome of a non-mutating column-stochasticity check."""

    column_sum_deviations: tuple[float, ...]
    max_column_deviation: float
    most_negative_entry: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_column_deviation <= self.tol and self.most_negative_entry >= -self.tol


def validate_stochastic(t, tol: float = COLUMN_TOL) -> StochasticityReport:
    """Report column-sum deviations and the most negative entry of ``t``.

    Nothing is repaired or renormalized; callers decide what to do with a
    failing report.
    """
    m = _as_square(t, "matrix")
    devs = m.sum(axis=0) - 1.0
    return StochasticityReport(
        column_sum_deviations=tuple(float(x) for x in devs),
        max_column_deviation=float(np.max(np.abs(devs))),
        most_negative_entry=float(np.min(m)),
        tol=float(tol),
    )


def rates_of(r, col_tol: float = COLUMN_TOL) -> dict[tuple[int, int], float]:
    """Return the complete off-diagonal rate map {(i, j): rate from j into i}."""
    m = rate_matrix(r, col_tol)
    n = m.shape[0]
    return {(i, j): float(m[i, j]) for i in range(n) for j in range(n) if i != j}


class GeneratorCheck(NamedTuple):
    markovian: bool
    negative_rates: dict[tuple[int, int], float]


def is_markovian_generator(r, rate_tol: float = 1e-9) -> GeneratorCheck:
    """Decide whether all off-diagonal rates are non-negative within tolerance.

    Returns the verdict together with the offending entries, so callers can
    report which transitions carry negative rates.
    """
    m = rate_matrix(r)
    off = {k: v for k, v in rates_of(m).items() if v < -rate_tol}
    return GeneratorCheck(markovian=not off, negative_rates=off)


def _check_tensor_dim(total: int, max_dim: int) -> None:
    if total > max_dim:
        raise ResourceLimitError(f"tensor dimension {total} exceeds the limit {max_dim}")


def tensor_state(p, q, max_dim: int = MAX_TENSOR_DIM) -> np.ndarray:
    """Product state on the composite space, first factor outermost."""
    a = prob_vec(p)
    b = prob_vec(q)
    _check_tensor_dim(a.size * b.size, max_dim)
    return _freeze(np.kron(a, b))


def tensor_map(t, s, max_dim: int = MAX_TENSOR_DIM) -> np.ndarray:
    """Product of two column-stochastic maps acting factor-wise."""
    a = stochastic_matrix(t)
    b = stochastic_matrix(s)
    _check_tensor_dim(a.shape[0] * b.shape[0], max_dim)
    return _freeze(np.kron(a, b))


def embed_extra_state(t) -> np.ndarray:
    """Extend a map by one isolated state that neither feeds nor drains the rest."""
    a = stochastic_matrix(t)
    n = a.shape[0]
    out = np.zeros((n + 1, n + 1))
    out[:n, :n] = a
    out[n, n] = 1.0
    return _freeze(out)


def extend_generator(r, copies: int = 1, ancilla_dim: int = 0, max_dim: int = MAX_TENSOR_DIM) -> np.ndarray:
    """Generator of ``copies`` independent replicas plus an idle ancilla.

    Each replica evolves under ``r``; the ancilla (dimension ``ancilla_dim``,
    0 meaning absent) is untouched. The result acts on the row-major
    composite space.
    """
    m = rate_matrix(r)
    n = m.shape[0]
    if copies < 1:
        raise DimensionMismatchError("copies must be >= 1")
    if ancilla_dim < 0:
        raise DimensionMismatchError("ancilla_dim must be >= 0")
    total = n**copies * max(ancilla_dim, 1)
    _check_tensor_dim(total, max_dim)
    dim_sys = n**copies
    out = np.zeros((dim_sys, dim_sys))
    for l in range(copies):
        left = np.eye(n**l)
        right = np.eye(n ** (copies - l - 1))
        out += np.kron(np.kron(left, m), right)
    if ancilla_dim >= 1:
        out = np.kron(out, np.eye(ancilla_dim))
    return _freeze(out)


@dataclass(frozen=True)
class ExtendedSpace:
    """Bookkeeping for a system with replicas and an idle ancilla."""

    base_dim: int
    copies: int = 1
    ancilla_dim: int = 0
    max_dim: int = MAX_TENSOR_DIM

    def __post_init__(self) -> None:
        if self.base_dim < 2 or self.copies < 1 or self.ancilla_dim < 0:
            raise DimensionMismatchError(
                f"invalid extended space ({self.base_dim}, {self.copies}, {self.ancilla_dim})"
            )
        _check_tensor_dim(self.total_dim, self.max_dim)

    @property
    def total_dim(self) -> int:
        return self.base_dim**self.copies * max(self.ancilla_dim, 1)


@lru_cache(maxsize=64)
def zero_sum_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the zero-sum subspace, as columns of an (n, n-1) array.

    Column k is proportional to (1, ..., 1, -(k+1), 0, ..., 0) with k+1 leading
    ones; the construction is deterministic and exact up to rounding.
    """
    if n < 2:
        raise DimensionMismatchError("zero-sum subspace needs n >= 2")
    b = np.zeros((n, n - 1))
    for k in range(1, n):
        b[:k, k - 1] = 1.0
        b[k, k - 1] = -float(k)
        b[:, k - 1] /= np.sqrt(k * (k + 1.0))
    return _freeze(b)
