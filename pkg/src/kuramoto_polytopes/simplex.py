"""Dense two-phase simplex for small standard-form LPs.

Solves ``min c @ x  s.t.  A @ x == b, x >= 0`` on a full tableau with
Bland's smallest-index rule, so it never cycles and gives the same
answer every time for the same column order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LPError", "LPInfeasible", "LPIterationLimit", "LPResult", "solve_standard_form"]


class LPError(RuntimeError):
    pass


class LPInfeasible(LPError):
    pass


class LPIterationLimit(LPError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    iterations: int


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    T -= np.outer(factor, T[row])
    basis[row] = col


def _run(T, basis, allowed, eps, max_iter, it):
    """Iterate on tableau ``T`` whose last row holds reduced costs."""
    m = T.shape[0] - 1
    while True:
        red = T[-1, :-1]
        candidates = np.flatnonzero((red < -eps) & allowed)
        if candidates.size == 0:
            return it
        col = candidates[0]
        column = T[:m, col]
        pos = column > eps
        if not pos.any():
            raise LPError("LP is unbounded")
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / column[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + eps * max(1.0, abs(best)))
        row = ties[np.argmin(basis[ties])]
        _pivot(T, basis, row, col)
        it += 1
        if it >= max_iter:
            raise LPIterationLimit(f"simplex exceeded {max_iter} iterations")


def solve_standard_form(
    c, A, b, eps: float = 1e-10, max_iter: int = 1_000_000
) -> LPResult:
    """Minimize ``c @ x`` subject to ``A @ x == b`` and ``x >= 0``.

    ``A`` must have full row rank. Raises :class:`LPInfeasible` when no
    feasible point exists and :class:`LPIterationLimit` past ``max_iter``.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, k = A.shape
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1

    # phase 1: artificial columns k..k+m-1, minimize their sum
    T = np.zeros((m + 1, k + m + 1))
    T[:m, :k] = A
    T[:m, k:k + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :k] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = np.arange(k, k + m)
    allowed = np.ones(k + m, dtype=bool)
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    it = _run(T, basis, allowed, eps, max_iter, 0)
    if -T[-1, -1] > 1e-9 * scale:
        raise LPInfeasible("no nonnegative solution of A x = b")

    # drive zero-level artificials out of the basis where possible
    for row in range(m):
        if basis[row] >= k:
            nz = np.flatnonzero(np.abs(T[row, :k]) > eps)
            if nz.size:
                _pivot(T, basis, row, nz[0])

    # phase 2 on the original costs
    allowed[k:] = False
    T[-1, :] = 0.0
    T[-1, :k] = c
    for row in range(m):
        if basis[row] < k:
            T[-1] -= c[basis[row]] * T[row]
    it = _run(T, basis, allowed, eps, max_iter, it)

    x = np.zeros(k)
    real = basis < k
    x[basis[real]] = T[:m, -1][real]
    return LPResult(x=x, objective=float(c @ x), iterations=it)
