"""Exact (N-1)-volumes of the four named polytopes and of permutahedra."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from functools import lru_cache
from typing import Iterator

import numpy as np

from .norms import PolytopeSpec
from .points import tau

__all__ = [
    "exact_volume",
    "log_exact_volume",
    "descent_set",
    "descent_count",
    "compositions",
    "epsilon_sequence",
    "composition_descent_set",
    "postnikov_volume",
    "unit_cs_volume_closed_form",
]

_EXACT_KINDS = ("I_DB", "C_DB", "I_CS", "C_CS")


def log_exact_volume(spec: PolytopeSpec) -> float:
    """Natural log of :func:`exact_volume`; safe for any n."""
    n = spec.n
    if spec.kind not in _EXACT_KINDS:
        raise ValueError(f"no closed-form volume for {spec}")
    if n < 3:
        raise ValueError("n must be at least 3")
    t = tau(n).value
    if spec.kind == "I_DB":
        return (n - 0.5) * math.log(n)
    if spec.kind == "C_DB":
        return (n - 1) * math.log(2) + (n - 1.5) * math.log(n)
    if spec.kind == "C_CS":
        return (n - 0.5) * math.log(n) + (n - 1) * math.log(2 * t / n)
    # I_CS: sqrt(n) (2(n-1))! / ((n-1)!)^3 * tau^(n-1)
    return (
        0.5 * math.log(n)
        + math.lgamma(2 * n - 1)
        - 3 * math.lgamma(n)
        + (n - 1) * math.log(t)
    )


def exact_volume(spec: PolytopeSpec) -> float:
    """Closed-form volume of I_DB, C_DB, I_CS or C_CS."""
    n = spec.n
    if spec.kind not in _EXACT_KINDS:
        raise ValueError(f"no closed-form volume for {spec}")
    if n < 3:
        raise ValueError("n must be at least 3")
    if n > 20:
        return math.exp(log_exact_volume(spec))
    t = tau(n).value
    if spec.kind == "I_DB":
        return n ** (n - 0.5)
    if spec.kind == "C_DB":
        return 2 ** (n - 1) * n ** (n - 1.5)
    if spec.kind == "C_CS":
        return n ** (n - 0.5) * (2 * t / n) ** (n - 1)
    ratio = math.factorial(2 * (n - 1)) / math.factorial(n - 1) ** 3
    return math.sqrt(n) * ratio * t ** (n - 1)


def descent_set(perm) -> frozenset[int]:
    """Positions i (1-based) with perm[i] > perm[i+1]."""
    return frozenset(i + 1 for i in range(len(perm) - 1) if perm[i] > perm[i + 1])


@lru_cache(maxsize=None)
def _descent_table(n: int) -> Counter:
    return Counter(descent_set(p) for p in itertools.permutations(range(n)))


def descent_count(n: int, descents) -> int:
    """Number of permutations of {1..n} whose descent set is exactly ``descents``."""
    if n > 9:
        raise ValueError("descent counts are enumerated; n must be at most 9")
    if n < 1:
        raise ValueError("n must be positive")
    key = frozenset(int(i) for i in descents)
    if any(i < 1 or i > n - 1 for i in key):
        raise ValueError(f"descent positions must lie in 1..{n - 1}")
    return _descent_table(n)[key]


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of ``total`` into ``parts`` parts, lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def epsilon_sequence(c) -> list[int]:
    """c_i ones then a -1 for each part; the final -1 is dropped."""
    eps = []
    for ci in c:
        eps.extend([1] * ci)
        eps.append(-1)
    return eps[:-1]


def composition_descent_set(c) -> frozenset[int]:
    """{i in 1..n-1 : eps_1 + ... + eps_{2i-1} < 0}."""
    n = len(c)
    prefix = np.cumsum(epsilon_sequence(c))
    return frozenset(i for i in range(1, n) if prefix[2 * i - 2] < 0)


def postnikov_volume(x, euclidean: bool = False) -> float:
    """Volume of the permutahedron with vertices all permutations of ``x``.

    Uses the descent-set expansion
    vol = sum_c (-1)^|I_c| D_n(I_c) prod x_i^c_i / c_i!
    over weak compositions c of n - 1, with x sorted in decreasing order.
    The result is normalized to unit lattice cell; ``euclidean`` multiplies
    by sqrt(n) to give the Euclidean (n-1)-volume.
    """
    xs = sorted((float(v) for v in x), reverse=True)
    n = len(xs)
    if n > 8:
        raise ValueError("postnikov_volume supports n <= 8")
    if n < 2:
        raise ValueError("need at least two coordinates")
    total = 0.0
    for c in compositions(n - 1, n):
        term = 1.0
        for xi, ci in zip(xs, c):
            if ci:
                term *= xi**ci / math.factorial(ci)
        if term == 0.0:
            continue
        descents = composition_descent_set(c)
        total += (-1) ** len(descents) * descent_count(n, descents) * term
    return total * math.sqrt(n) if euclidean else total


def unit_cs_volume_closed_form(n: int) -> float:
    """Euclidean volume of the hull of all permutations of (1, 0, ..., 0, -1)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return math.sqrt(n) * math.comb(2 * (n - 1), n - 1) / math.factorial(n - 1)
