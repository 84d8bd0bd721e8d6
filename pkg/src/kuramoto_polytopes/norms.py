"""Closed-form polytope norms on the mean-zero subspace.

Every function here accepts a single vector of shape ``(n,)`` or a batch of
shape ``(m, n)`` and reduces over the last axis.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .core import as_array
from .points import VertexFamily, cs_points, db_points, tau, tau_general

__all__ = [
    "PolytopeSpec",
    "parse_spec",
    "spread",
    "norm_for",
    "circ_norm_generic",
    "greedy_l1_decompose",
    "INSCRIBED",
    "CIRCUMSCRIBED",
]

INSCRIBED = ("I_DB", "I_CS", "I_CS_gen")
CIRCUMSCRIBED = ("C_DB", "C_CS", "C_CS_gen", "C_CS_all")
_COMPOSITE = ("Intersection", "HullOfUnion")


@dataclass(frozen=True)
class PolytopeSpec:
    """Symbolic name for one of the polytopes, an intersection of
    circumscribed ones, or the hull of a union of inscribed ones."""

    kind: str
    n: int
    j: int | None = None
    members: tuple["PolytopeSpec", ...] = field(default=())

    def __post_init__(self):
        if self.kind not in INSCRIBED + CIRCUMSCRIBED + _COMPOSITE:
            raise ValueError(f"unknown polytope kind {self.kind!r}")
        if self.n < 3:
            raise ValueError("polytopes are defined for n >= 3")
        if self.kind.endswith("_gen"):
            if self.j is None or self.j < 1 or 2 * self.j > self.n:
                raise ValueError(f"{self.kind} needs 1 <= j <= n/2, got j={self.j}")
        if self.kind in _COMPOSITE:
            if not self.members:
                raise ValueError(f"{self.kind} needs at least one member")
            if any(m.n != self.n for m in self.members):
                raise ValueError("all members of a composite spec must share n")
            allowed = CIRCUMSCRIBED if self.kind == "Intersection" else INSCRIBED
            if any(m.kind not in allowed for m in self.members):
                raise ValueError(
                    f"{self.kind} only combines {', '.join(allowed)} polytopes"
                )

    @classmethod
    def intersection(cls, *members: "PolytopeSpec") -> "PolytopeSpec":
        return cls("Intersection", members[0].n, members=tuple(members))

    @classmethod
    def hull_of_union(cls, *members: "PolytopeSpec") -> "PolytopeSpec":
        return cls("HullOfUnion", members[0].n, members=tuple(members))

    @property
    def is_inscribed(self) -> bool:
        return self.kind in INSCRIBED or self.kind == "HullOfUnion"

    def vertex_families(self) -> list[VertexFamily]:
        """Vertex families whose convex hull is this (inscribed) polytope."""
        if self.kind == "I_DB":
            return [db_points(self.n)]
        if self.kind == "I_CS":
            return [cs_points(self.n, 1)]
        if self.kind == "I_CS_gen":
            return [cs_points(self.n, self.j)]
        if self.kind == "HullOfUnion":
            return [f for m in self.members for f in m.vertex_families()]
        raise ValueError(f"{self.kind} is not given by a vertex list")

    def __str__(self):
        if self.kind == "Intersection":
            return "Intersect(" + ",".join(map(str, self.members)) + ")"
        if self.kind == "HullOfUnion":
            return "Hull(" + ",".join(map(str, self.members)) + ")"
        if self.j is not None:
            return f"{self.kind}({self.n},{self.j})"
        return f"{self.kind}({self.n})"


_TOKEN = re.compile(r"\s*([A-Za-z_]+|\d+|[(),])")
_ALIASES = {
    "Intersect": "Intersection",
    "Intersection": "Intersection",
    "Hull": "HullOfUnion",
    "HullOfUnion": "HullOfUnion",
}


def parse_spec(text: str) -> PolytopeSpec:
    """Parse strings such as ``I_DB(4)``, ``C_CS_gen(10,3)`` or
    ``Intersect(C_DB(4),C_CS(4))``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse spec at {text[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()

    def peek(i):
        return tokens[i] if i < len(tokens) else None

    def expect(tok, i):
        if i >= len(tokens) or tokens[i] != tok:
            raise ValueError(f"expected {tok!r} in spec {text!r}")
        return i + 1

    def parse(i):
        if i >= len(tokens):
            raise ValueError(f"truncated spec {text!r}")
        name = tokens[i]
        i = expect("(", i + 1)
        if name in _ALIASES:
            members = []
            while True:
                sub, i = parse(i)
                members.append(sub)
                if peek(i) == ",":
                    i += 1
                    continue
                break
            i = expect(")", i)
            kind = _ALIASES[name]
            return PolytopeSpec(kind, members[0].n, members=tuple(members)), i
        args = []
        while True:
            if i >= len(tokens) or not tokens[i].isdigit():
                raise ValueError(f"expected an integer argument in {text!r}")
            args.append(int(tokens[i]))
            i += 1
            if peek(i) == ",":
                i += 1
                continue
            break
        i = expect(")", i)
        if len(args) == 1:
            return PolytopeSpec(name, args[0]), i
        if len(args) == 2:
            return PolytopeSpec(name, args[0], args[1]), i
        raise ValueError(f"too many arguments for {name} in {text!r}")

    spec, end = parse(0)
    if end != len(tokens):
        raise ValueError(f"trailing input in spec {text!r}")
    return spec


def spread(y):
    """max entry minus min entry."""
    arr = as_array(y)
    return arr.max(axis=-1) - arr.min(axis=-1)


def _top_minus_bottom(y_sorted: np.ndarray, j: int):
    return y_sorted[..., -j:].sum(axis=-1) - y_sorted[..., :j].sum(axis=-1)


def _c_db(y: np.ndarray):
    n = y.shape[-1]
    desc = -np.sort(-y, axis=-1, kind="stable")
    partial = np.cumsum(desc, axis=-1)[..., : n - 1]
    k = np.arange(1, n)
    return (partial / (k * (n - k))).max(axis=-1)


def _c_cs_all(y: np.ndarray):
    n = y.shape[-1]
    ys = np.sort(y, axis=-1, kind="stable")
    vals = [
        _top_minus_bottom(ys, j) / (2 * j * tau_general(n, j).value)
        for j in range(1, n // 2 + 1)
    ]
    return np.max(np.stack(vals, axis=-1), axis=-1)


def norm_for(spec: PolytopeSpec, y):
    """Norm whose closed unit ball is the polytope named by ``spec``.

    The hull of a union has no closed form; use the LP route in
    :mod:`kuramoto_polytopes.membership` instead.
    """
    arr = as_array(y)
    n = spec.n
    if arr.shape[-1] != n:
        raise ValueError(f"dimension mismatch: spec has n={n}, vector has {arr.shape[-1]}")
    kind = spec.kind
    if kind == "HullOfUnion":
        raise ValueError("no closed-form norm for a hull of a union; use hull_membership")
    if kind == "Intersection":
        return np.max(np.stack([norm_for(m, arr) for m in spec.members], axis=-1), axis=-1)
    if kind == "I_DB":
        return spread(arr) / n
    if kind == "I_CS":
        return np.abs(arr).sum(axis=-1) / (2 * tau(n).value)
    if kind == "I_CS_gen":
        t = tau_general(n, spec.j).value
        return np.maximum(
            np.abs(arr).sum(axis=-1) / (2 * spec.j * t), np.abs(arr).max(axis=-1) / t
        )
    if kind == "C_CS":
        return spread(arr) / (2 * tau(n).value)
    if kind == "C_CS_gen":
        t = tau_general(n, spec.j).value
        ys = np.sort(arr, axis=-1, kind="stable")
        return _top_minus_bottom(ys, spec.j) / (2 * spec.j * t)
    if kind == "C_CS_all":
        return _c_cs_all(arr)
    if kind == "C_DB":
        return _c_db(arr)
    raise AssertionError(kind)


def circ_norm_generic(R, y):
    """max over x in R of <y, x>/<x, x>, by brute force over the vertices."""
    X = R.array() if isinstance(R, VertexFamily) else np.asarray(R, dtype=float)
    if X.size == 0:
        raise ValueError("empty vertex family")
    arr = as_array(y)
    if arr.shape[-1] != X.shape[1]:
        raise ValueError("dimension mismatch")
    return (arr @ X.T / np.einsum("ij,ij->i", X, X)).max(axis=-1)


def greedy_l1_decompose(y, tol: float = 1e-12) -> list[tuple[float, tuple[int, int]]]:
    """Write a mean-zero y as sum of c * (e_i - e_j) with c > 0.

    Repeatedly cancels the smallest nonzero magnitude against an entry of
    opposite sign. Returns ``[(c, (i, j)), ...]`` with at most n - 1 terms
    and ``sum(c) == ||y||_1 / 2``.
    """
    v = np.array(as_array(y), dtype=float)
    scale = max(1.0, float(np.abs(v).max(initial=0.0)))
    terms = []
    for _ in range(v.size):
        nz = np.flatnonzero(np.abs(v) > tol * scale)
        if nz.size < 2:
            break
        i = nz[np.argmin(np.abs(v[nz]))]
        opposite = nz[np.sign(v[nz]) == -np.sign(v[i])]
        k = opposite[0]
        c = abs(v[i])
        if v[i] > 0:
            terms.append((c, (int(i), int(k))))
        else:
            terms.append((c, (int(k), int(i))))
        v[k] += v[i]
        v[i] = 0.0
    return terms
