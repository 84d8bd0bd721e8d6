"""Membership tests: polytopes, convex hulls via LP, the phase-locked region,
and stability of stationary configurations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_array, mean_zero_basis
from .norms import PolytopeSpec, norm_for
from .points import VertexFamily, frequency_from_configuration
from .simplex import LPInfeasible, solve_standard_form

__all__ = [
    "HullCertificate",
    "HullDefectError",
    "StabilityReport",
    "in_polytope",
    "rado_membership",
    "hull_membership",
    "vertex_matrix",
    "order_param_locking_test",
    "stability_check",
    "jacobian",
    "eig_stability_oracle",
    "numeric_jacobian",
    "ORDER_PARAM_GRID",
    "MARGINAL_TOL",
]

ORDER_PARAM_GRID = 20
MARGINAL_TOL = 1e-9


class HullDefectError(RuntimeError):
    """The target lies outside the cone of the vertices, which cannot happen
    for a spanning, negation-closed vertex set."""


@dataclass(frozen=True)
class HullCertificate:
    inside: bool
    coefficients: np.ndarray
    objective: float


def vertex_matrix(vertices) -> np.ndarray:
    """Stack one or more vertex families (or explicit arrays) row-wise."""
    if isinstance(vertices, VertexFamily):
        return vertices.array()
    if isinstance(vertices, np.ndarray):
        return np.asarray(vertices, dtype=float)
    parts = []
    for v in vertices:
        if isinstance(v, VertexFamily):
            parts.append(v.array())
        else:
            parts.append(np.atleast_2d(np.asarray(v, dtype=float)))
    return np.vstack(parts)


def hull_membership(vertices, y, *, max_iter: int = 1_000_000) -> HullCertificate:
    """Decide whether y lies in the convex hull of ``vertices``.

    Solves ``min sum(a)`` subject to ``sum_i a_i v_i = y``, ``a >= 0``.
    Since every vertex set here is negation-closed the origin is interior
    and y is in the hull exactly when the optimum is at most 1.
    """
    V = vertex_matrix(vertices)
    arr = as_array(y, V.shape[1])
    # rows of V sum to zero, so the last equality is implied by the others
    A = V.T[:-1]
    try:
        res = solve_standard_form(np.ones(V.shape[0]), A, arr[:-1], max_iter=max_iter)
    except LPInfeasible as exc:
        raise HullDefectError(
            "target is outside the cone of the vertices; the vertex set does not span"
        ) from exc
    alpha = res.x
    return HullCertificate(
        inside=bool(res.objective <= 1.0 + 1e-9),
        coefficients=alpha,
        objective=res.objective,
    )


def _hull_prefilter(spec: PolytopeSpec, arr: np.ndarray):
    """Exact shortcuts for the hull of a union.

    Inside any member's closed-form ball means inside the hull. Every
    vertex of the union is checked to satisfy all the members'
    circumscribed inequalities; when it does, failing those inequalities
    means outside. Returns (known_inside, known_outside) masks.
    """
    inside = np.zeros(arr.shape[0], dtype=bool)
    for m in spec.members:
        inside |= norm_for(m, arr) <= 1.0
    circ_kinds = {"I_DB": "C_DB", "I_CS": "C_CS", "I_CS_gen": "C_CS_gen"}
    circ = PolytopeSpec.intersection(*[PolytopeSpec(circ_kinds[m.kind], m.n, m.j) for m in spec.members])
    V = vertex_matrix(spec.vertex_families())
    if np.all(norm_for(circ, V) <= 1.0 + 1e-12):
        outside = norm_for(circ, arr) > 1.0 + 1e-9
    else:
        outside = np.zeros(arr.shape[0], dtype=bool)
    return inside, outside & ~inside


def in_polytope(spec: PolytopeSpec, y, *, prefilter: bool = False):
    """True when y lies in the closed polytope named by ``spec``.

    Accepts one vector or a batch of rows. Hulls of unions go through the
    LP; with ``prefilter`` the LP only runs on points the closed-form
    inscribed and circumscribed bounds cannot settle.
    """
    arr = as_array(y)
    if arr.shape[-1] != spec.n:
        raise ValueError(f"dimension mismatch: spec has n={spec.n}, vector has {arr.shape[-1]}")
    if spec.kind != "HullOfUnion":
        return norm_for(spec, arr) <= 1.0
    single = arr.ndim == 1
    batch = np.atleast_2d(arr)
    V = vertex_matrix(spec.vertex_families())
    out = np.zeros(batch.shape[0], dtype=bool)
    todo = np.ones(batch.shape[0], dtype=bool)
    if prefilter:
        known_in, known_out = _hull_prefilter(spec, batch)
        out[known_in] = True
        todo = ~(known_in | known_out)
    for i in np.flatnonzero(todo):
        out[i] = hull_membership(V, batch[i]).inside
    return bool(out[0]) if single else out


def rado_membership(y, v, tol: float = 1e-8) -> bool:
    """Is y in the permutahedron spanned by the permutations of v?"""
    ya = as_array(y)
    va = np.asarray(v, dtype=float)
    if ya.shape != va.shape:
        raise ValueError("y and v must have the same length")
    if abs(ya.sum() - va.sum()) > tol:
        raise ValueError(f"sum mismatch: {ya.sum()} vs {va.sum()}")
    ys = np.cumsum(np.sort(ya)[::-1])[:-1]
    vs = np.cumsum(np.sort(va)[::-1])[:-1]
    return bool(np.all(ys <= vs + tol))


def order_param_locking_test(omega, gamma: float, grid: int = ORDER_PARAM_GRID):
    """Phase-locking test through the mean-field self-consistency equation.

    Frequencies are rescaled by the coupling, w = omega / gamma, and
    g(r) = r - mean(sqrt(1 - (w_i / r)^2)) is sampled at ``grid`` equally
    spaced r in [max|w_i|, 1]. The vector locks iff some sample is <= 0.
    ``gamma = N`` matches unit pairwise coupling. Accepts a batch of rows.
    """
    if not gamma > 0:
        raise ValueError("coupling gamma must be positive")
    w = as_array(omega) / gamma
    single = w.ndim == 1
    w = np.atleast_2d(w)
    wmax = np.abs(w).max(axis=1)
    ok = wmax < 1.0
    result = np.zeros(w.shape[0], dtype=bool)
    if ok.any():
        ws = w[ok]
        lo = wmax[ok]
        t = np.linspace(0.0, 1.0, grid)
        r = lo[:, None] + (1.0 - lo[:, None]) * t[None, :]
        # r == 0 only for omega == 0, where g(1) = 0 already decides it
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = ws[:, None, :] / r[:, :, None]
        ratio = np.nan_to_num(ratio, nan=0.0)
        radicand = np.clip(1.0 - ratio * ratio, 0.0, None)
        g = r - np.sqrt(radicand).mean(axis=2)
        result[ok] = g.min(axis=1) <= 0.0
    return bool(result[0]) if single else result


@dataclass(frozen=True)
class StabilityReport:
    kappas: np.ndarray
    tau_sum: float
    verdict: str


def stability_check(theta, tol: float = MARGINAL_TOL) -> StabilityReport:
    """Stability of a stationary configuration from the row sums
    kappa_j = sum_i cos(theta_j - theta_i) and tau = sum_j 1/kappa_j.

    Stable iff every kappa_j > 0 and tau < 2; values within ``tol`` of
    either threshold are reported as marginal.
    """
    th = as_array(theta)
    kappas = np.cos(th[:, None] - th[None, :]).sum(axis=1)
    with np.errstate(divide="ignore"):
        tau_sum = float(np.sum(1.0 / kappas))
    if np.any(np.abs(kappas) <= tol):
        verdict = "marginal"
    elif np.any(kappas < 0):
        verdict = "unstable"
    elif abs(tau_sum - 2.0) <= tol:
        verdict = "marginal"
    elif tau_sum < 2.0:
        verdict = "stable"
    else:
        verdict = "unstable"
    kappas.setflags(write=False)
    return StabilityReport(kappas=kappas, tau_sum=tau_sum, verdict=verdict)


def jacobian(theta) -> np.ndarray:
    """J_ij = cos(theta_j - theta_i) off the diagonal, rows summing to zero."""
    th = as_array(theta)
    J = np.cos(th[None, :] - th[:, None])
    np.fill_diagonal(J, 0.0)
    J[np.diag_indices_from(J)] = -J.sum(axis=1)
    return J


def eig_stability_oracle(J, tol: float | None = None) -> str:
    """Classify by the spectrum of J restricted to the mean-zero subspace.

    Constants are always in the kernel (rotation invariance), so they are
    projected out before looking at the largest eigenvalue.
    """
    J = np.asarray(J, dtype=float)
    n = J.shape[0]
    tol = 1e-8 * n if tol is None else tol
    B = mean_zero_basis(n).vectors
    top = np.linalg.eigvalsh(B @ (0.5 * (J + J.T)) @ B.T)[-1]
    if top < -tol:
        return "stable"
    if top > tol:
        return "unstable"
    return "marginal"


def numeric_jacobian(theta, h: float = 1e-5) -> np.ndarray:
    """Central-difference estimate of -d omega / d theta."""
    th = np.array(as_array(theta), dtype=float)
    n = th.size
    out = np.empty((n, n))
    for k in range(n):
        tp, tm = th.copy(), th.copy()
        tp[k] += h
        tm[k] -= h
        wp = frequency_from_configuration(tp).entries
        wm = frequency_from_configuration(tm).entries
        out[:, k] = -(wp - wm) / (2 * h)
    return out
