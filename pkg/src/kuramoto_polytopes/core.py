"""Mean-zero frequency vectors, phase configurations and coordinates on R^N_0."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FrequencyVector",
    "PhaseConfiguration",
    "MeanZeroBasis",
    "as_array",
    "project_mean_zero",
    "mean_zero_basis",
    "ambient_to_coords",
    "coords_to_ambient",
    "vector_to_json",
    "vector_from_json",
    "vector_to_csv_row",
    "vector_from_csv_row",
]


def mean_zero_tolerance(n: int) -> float:
    return 1e-9 * n


def _readonly(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FrequencyVector:
    """A natural-frequency vector living in the mean-zero subspace.

    Use :meth:`from_values` to assert the mean-zero property or
    :meth:`projected` to project arbitrary input first.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = _readonly(self.entries)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("a frequency vector needs at least two entries")
        if not np.all(np.isfinite(arr)):
            raise ValueError("frequency vector entries must be finite")
        if abs(arr.sum()) > mean_zero_tolerance(arr.size):
            raise ValueError(
                f"entries sum to {arr.sum():.3e}; not mean-zero within "
                f"{mean_zero_tolerance(arr.size):.1e}"
            )
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_values(cls, values) -> "FrequencyVector":
        return cls(values)

    @classmethod
    def projected(cls, values) -> "FrequencyVector":
        return project_mean_zero(values)

    @property
    def n(self) -> int:
        return self.entries.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.entries.tolist())

    def __eq__(self, other):
        if not isinstance(other, FrequencyVector):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __repr__(self):
        return f"FrequencyVector({self.entries.tolist()})"


@dataclass(frozen=True, eq=False)
class PhaseConfiguration:
    """Oscillator angles in radians. No wrapping is applied."""

    angles: np.ndarray

    def __post_init__(self):
        arr = _readonly(self.angles)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("a configuration needs at least two oscillators")
        if not np.all(np.isfinite(arr)):
            raise ValueError("angles must be finite")
        object.__setattr__(self, "angles", arr)

    @property
    def n(self) -> int:
        return self.angles.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.angles, dtype=dtype)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"PhaseConfiguration({self.angles.tolist()})"


@dataclass(frozen=True, eq=False)
class MeanZeroBasis:
    """Orthonormal basis of R^N_0 stored as the rows of ``vectors``."""

    n: int
    vectors: np.ndarray

    @property
    def basis_vectors(self) -> list[np.ndarray]:
        return list(self.vectors)


def as_array(y, n: int | None = None) -> np.ndarray:
    """Float view of a vector, a FrequencyVector, or a batch of row vectors."""
    if isinstance(y, FrequencyVector):
        arr = y.entries
    elif isinstance(y, PhaseConfiguration):
        arr = y.angles
    else:
        arr = np.asarray(y, dtype=float)
    if n is not None and arr.shape[-1] != n:
        raise ValueError(f"dimension mismatch: expected {n}, got {arr.shape[-1]}")
    return arr


def project_mean_zero(x) -> FrequencyVector:
    """Orthogonal projection x - mean(x) onto the mean-zero subspace."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("need a vector with at least two entries")
    if not np.all(np.isfinite(arr)):
        raise ValueError("entries must be finite")
    return FrequencyVector(arr - arr.mean())


def project_rows(x: np.ndarray) -> np.ndarray:
    """Batch version of :func:`project_mean_zero` on the last axis."""
    x = np.asarray(x, dtype=float)
    return x - x.mean(axis=-1, keepdims=True)


def mean_zero_basis(n: int) -> MeanZeroBasis:
    """Normalized vectors (1,...,1,-k,0,...,0) with k leading ones, k = 1..n-1."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rows = np.zeros((n - 1, n))
    for k in range(1, n):
        rows[k - 1, :k] = 1.0
        rows[k - 1, k] = -float(k)
        rows[k - 1] /= math.sqrt(k * (k + 1))
    rows.setflags(write=False)
    return MeanZeroBasis(n=n, vectors=rows)


def ambient_to_coords(y, basis: MeanZeroBasis) -> np.ndarray:
    arr = as_array(y)
    if arr.shape[-1] != basis.n:
        raise ValueError(f"dimension mismatch: basis is for n={basis.n}, got {arr.shape[-1]}")
    return arr @ basis.vectors.T


def coords_to_ambient(c, basis: MeanZeroBasis) -> np.ndarray:
    arr = np.asarray(c, dtype=float)
    if arr.shape[-1] != basis.n - 1:
        raise ValueError(
            f"dimension mismatch: expected {basis.n - 1} coordinates, got {arr.shape[-1]}"
        )
    return arr @ basis.vectors


# Serialization. 17 significant digits round-trips every double.

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def vector_to_json(y) -> str:
    return json.dumps([float(v) for v in as_array(y)])


def vector_from_json(text: str, project: bool = False) -> FrequencyVector:
    values = json.loads(text)
    return project_mean_zero(values) if project else FrequencyVector(values)


def vector_to_csv_row(y) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="").writerow([_fmt(v) for v in as_array(y)])
    return buf.getvalue()


def vector_from_csv_row(text: str, project: bool = False) -> FrequencyVector:
    row = next(csv.reader([text.strip()]))
    values = [float(v) for v in row if v.strip()]
    return project_mean_zero(values) if project else FrequencyVector(values)
