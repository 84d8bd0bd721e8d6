"""Boundary frequency families and the Chopra-Spong style coupling constants."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import FrequencyVector, PhaseConfiguration, as_array

__all__ = [
    "CouplingConstant",
    "VertexFamily",
    "tau",
    "tau_general",
    "phase_objective",
    "optimal_phase",
    "critical_phase",
    "db_points",
    "cs_points",
    "frequency_from_configuration",
    "db_configuration",
    "cs_configuration",
    "MAX_MATERIALIZE",
]

# Largest vertex count we are willing to hold as a dense array.
MAX_MATERIALIZE = 2**16


@dataclass(frozen=True)
class CouplingConstant:
    value: float
    n: int
    j: int = 1

    def __float__(self):
        return self.value


def tau(n: int) -> CouplingConstant:
    """max over phi of (n-2) sin(phi) + sin(2 phi), via the closed-form radical."""
    if n < 3:
        raise ValueError("tau_N is defined for n >= 3")
    m = n - 2
    root = math.sqrt(32 + m * m)
    value = (root + 3 * m) * math.sqrt(16 + m * root - m * m) / (16 * math.sqrt(2))
    return CouplingConstant(value, n, 1)


def tau_general(n: int, j: int) -> CouplingConstant:
    """max over phi of (n-2j) sin(phi) + j sin(2 phi), closed form."""
    if j < 1 or 2 * j > n:
        raise ValueError(f"need 1 <= j and 2j <= n, got n={n}, j={j}")
    root = math.sqrt(36 * j * j - 4 * j * n + n * n)
    inner = -2 * root + n * (root - n) / j + 12 * j + 4 * n
    value = (root - 6 * j + 3 * n) * math.sqrt(inner) / (16 * math.sqrt(2 * j))
    return CouplingConstant(value, n, j)


def phase_objective(phi, n: int, j: int = 1):
    return (n - 2 * j) * np.sin(phi) + j * np.sin(2 * phi)


def critical_phase(n: int, j: int = 1) -> float:
    """Closed-form maximizer of :func:`phase_objective`.

    Stationarity gives 4j c^2 + (n-2j) c - 2j = 0 for c = cos(phi).
    """
    if j < 1 or 2 * j > n:
        raise ValueError(f"need 1 <= j and 2j <= n, got n={n}, j={j}")
    m = n - 2 * j
    c = (math.sqrt(m * m + 32 * j * j) - m) / (8 * j)
    return math.acos(c)


def optimal_phase(n: int, j: int = 1, grid: int = 10_000, tol: float = 1e-12) -> float:
    """Maximizer of :func:`phase_objective` on [0, pi/2].

    Dense grid scan, then golden-section refinement around the best node.
    Independent of the closed forms above, which it is used to check.
    """
    if j < 1 or 2 * j > n:
        raise ValueError(f"need 1 <= j and 2j <= n, got n={n}, j={j}")
    xs = np.linspace(0.0, math.pi / 2, grid + 1)
    i = int(np.argmax(phase_objective(xs, n, j)))
    h = xs[1] - xs[0]
    a, b = max(xs[i] - h, 0.0), min(xs[i] + h, math.pi / 2)
    invphi = (math.sqrt(5) - 1) / 2
    f = lambda t: float(phase_objective(t, n, j))  # noqa: E731
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class VertexFamily:
    """Lazily generated boundary point family.

    ``family`` is ``"DB"`` or ``"CS"``; the CS family carries its ``j``
    (``j == 1`` is the plain Chopra-Spong set). Vertices come out in a
    fixed lexicographic order so LP column order is reproducible.
    """

    family: str
    n: int
    j: int = 1

    @property
    def scale(self) -> float:
        return 1.0 if self.family == "DB" else tau_general(self.n, self.j).value

    def __len__(self) -> int:
        if self.family == "DB":
            return 2**self.n - 2
        return math.comb(self.n, self.j) * math.comb(self.n - self.j, self.j)

    def integer_vertices(self) -> Iterator[tuple[int, ...]]:
        """Vertices before scaling by tau; entries are exact integers."""
        n = self.n
        if self.family == "DB":
            for k in range(1, n):
                for pos in itertools.combinations(range(n), k):
                    v = [-k] * n
                    for i in pos:
                        v[i] = n - k
                    yield tuple(v)
        else:
            for pos in itertools.combinations(range(n), self.j):
                rest = [i for i in range(n) if i not in pos]
                for neg in itertools.combinations(rest, self.j):
                    v = [0] * n
                    for i in pos:
                        v[i] = 1
                    for i in neg:
                        v[i] = -1
                    yield tuple(v)

    def __iter__(self) -> Iterator[np.ndarray]:
        s = self.scale
        for v in self.integer_vertices():
            yield s * np.array(v, dtype=float)

    def vectors(self) -> Iterator[FrequencyVector]:
        for v in self:
            yield FrequencyVector(v)

    def array(self) -> np.ndarray:
        if len(self) > MAX_MATERIALIZE:
            raise ValueError(
                f"{len(self)} vertices is too many to materialize; iterate instead"
            )
        out = np.array(list(self.integer_vertices()), dtype=float).reshape(-1, self.n)
        return self.scale * out

    @property
    def label(self) -> str:
        if self.family == "DB":
            return f"DB({self.n})"
        return f"CS({self.n},{self.j})"


def db_points(n: int) -> VertexFamily:
    if n < 2:
        raise ValueError("n must be at least 2")
    return VertexFamily("DB", n)


def cs_points(n: int, j: int = 1) -> VertexFamily:
    if j < 1 or 2 * j > n:
        raise ValueError(f"need 1 <= j and 2j <= n, got n={n}, j={j}")
    if j == 1 and n < 3:
        raise ValueError("the Chopra-Spong family needs n >= 3")
    return VertexFamily("CS", n, j)


def frequency_from_configuration(theta) -> FrequencyVector:
    """Frequencies for which theta is a fixed point: w_i = -sum_j sin(theta_j - theta_i)."""
    th = as_array(theta)
    if th.ndim != 1 or th.size < 2 or not np.all(np.isfinite(th)):
        raise ValueError("need a finite configuration with at least two angles")
    w = -np.sin(th[None, :] - th[:, None]).sum(axis=1)
    # antisymmetry makes the sum vanish analytically; strip rounding residue
    return FrequencyVector(w - w.mean())


def db_configuration(n: int, positive: tuple[int, ...]) -> PhaseConfiguration:
    """Angles pi/2 on ``positive``, 0 elsewhere; maps to a DB vertex."""
    th = np.zeros(n)
    th[list(positive)] = math.pi / 2
    return PhaseConfiguration(th)


def cs_configuration(n: int, positive, negative, j: int | None = None) -> PhaseConfiguration:
    """Angles +phi* on ``positive``, -phi* on ``negative``, 0 elsewhere."""
    j = len(positive) if j is None else j
    phi = critical_phase(n, j)
    th = np.zeros(n)
    th[list(positive)] = phi
    th[list(negative)] = -phi
    return PhaseConfiguration(th)
