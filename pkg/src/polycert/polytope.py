"""Lattice polytopes given by their vertices.

Facets are found by exhaustive candidate hyperplanes through ``n``-point
subsets, which is exact and perfectly adequate for polytopes with a few dozen
vertices in dimension at most four.  Every volume and the barycenter come
from one deterministic triangulation: a fan over the lexicographically
smallest vertex, recursing into the facets that avoid it.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import linalg
from .linalg import IntVector


class PolytopeError(ValueError):
    """Invalid polytope input or an operation outside its preconditions."""


@dataclass(frozen=True)
class Facet:
    normal: IntVector
    offset: int
    vertex_indices: frozenset[int]
    lattice_volume: int


@dataclass(frozen=True)
class Edge:
    endpoints: tuple[int, int]
    lattice_length: int


@dataclass(frozen=True)
class Verdict:
    """A yes/no answer together with the reason and, if any, a witness."""

    ok: bool
    reason: str
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------- point-set helpers


def _hyperplanes(points: Sequence[IntVector]) -> list[tuple[IntVector, int, frozenset[int]]]:
    """Facet hyperplanes ``<x, v> >= -c`` of a full-dimensional point set.

    Returns ``(v, c, incident)`` triples with ``v`` primitive and ``incident``
    the indices of the points on the facet, sorted by normal.
    """
    n = len(points[0])
    found: dict[IntVector, tuple[int, frozenset[int]]] = {}
    for combo in itertools.combinations(range(len(points)), n):
        if any(set(combo) <= inc for _, inc in found.values()):
            continue
        p0 = points[combo[0]]
        diffs = [linalg.sub(points[i], p0) for i in combo[1:]]
        if linalg.rank(diffs) != n - 1:
            continue
        (v,) = linalg.kernel_lattice_basis(diffs, n)
        v = linalg.primitive(v)
        h0 = linalg.dot(p0, v)
        vals = [linalg.dot(p, v) - h0 for p in points]
        if all(x >= 0 for x in vals):
            pass
        elif all(x <= 0 for x in vals):
            v = tuple(-x for x in v)
            h0 = -h0
        else:
            continue
        incident = frozenset(i for i, x in enumerate(vals) if x == 0)
        found[v] = (-h0, incident)
    return [(v, c, inc) for v, (c, inc) in sorted(found.items())]


def _lattice_coordinates(points: Sequence[IntVector], basis: Sequence[IntVector]) -> list[IntVector]:
    """Integer coordinates of ``p - points[0]`` in a lattice basis of their span."""
    origin = points[0]
    cols = linalg.transpose(basis) if basis else [[] for _ in origin]
    out = []
    for p in points:
        x = linalg.solve(cols, linalg.sub(p, origin)) if basis else ()
        if x is None or any(c.denominator != 1 for c in x):
            raise PolytopeError("point not in the lattice spanned by the basis")
        out.append(tuple(int(c) for c in x))
    return out


def _triangulate(points: Sequence[IntVector], apex: int | None = None) -> list[tuple[int, ...]]:
    """Fan triangulation of a full-dimensional point set in convex position."""
    d = len(points[0])
    if d == 0:
        return [(0,)]
    if apex is None:
        apex = min(range(len(points)), key=lambda i: points[i])
    simplices = []
    for v, _, incident in _hyperplanes(points):
        if apex in incident:
            continue
        idx = sorted(incident)
        basis = linalg.kernel_lattice_basis([list(v)])
        sub_points = _lattice_coordinates([points[i] for i in idx], basis)
        sub_apex = min(range(len(idx)), key=lambda j: points[idx[j]])
        for s in _triangulate(sub_points, sub_apex):
            simplices.append((apex,) + tuple(idx[j] for j in s))
    return simplices


def _simplex_volume(points: Sequence[IntVector], simplex: Sequence[int]) -> int:
    p0 = points[simplex[0]]
    return abs(linalg.det([linalg.sub(points[i], p0) for i in simplex[1:]]))


def _normalized_volume(points: Sequence[IntVector]) -> int:
    if len(points[0]) == 0:
        return 1
    return sum(_simplex_volume(points, s) for s in _triangulate(points))


def convex_hull_vertices(points: Iterable[Sequence[int]]) -> list[IntVector]:
    """Vertices of the convex hull of a full-dimensional integer point set."""
    pts = sorted(set(tuple(p) for p in points))
    n = len(pts[0])
    if linalg.affine_hull(pts)[0] != n:
        raise PolytopeError("point set is not full-dimensional")
    planes = _hyperplanes(pts)
    keep = []
    for i, p in enumerate(pts):
        normals = [v for v, _, inc in planes if i in inc]
        if linalg.rank(normals) == n:
            keep.append(p)
    return keep


# ---------------------------------------------------------------- the polytope


@dataclass(frozen=True)
class LatticePolytope:
    """Full-dimensional lattice polytope in ``M = Z^n`` given by its vertices.

    Construction validates the vertex list: points must be distinct, span
    ``R^n`` affinely and each one must be a genuine vertex.  Invalid input is
    rejected, never repaired.
    """

    vertices: tuple[IntVector, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        verts = tuple(tuple(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if not verts:
            raise PolytopeError("polytope needs at least one vertex")
        n = len(verts[0])
        if n == 0 or any(len(v) != n for v in verts):
            raise PolytopeError("vertices must share a positive dimension")
        if any(not isinstance(x, int) or isinstance(x, bool) for v in verts for x in v):
            raise PolytopeError("vertex coordinates must be integers")
        if len(set(verts)) != len(verts):
            raise PolytopeError("duplicate vertices")
        if len(verts) < n + 1:
            raise PolytopeError(f"need at least {n + 1} vertices in dimension {n}")
        if linalg.affine_hull(verts)[0] != n:
            raise PolytopeError("polytope is not full-dimensional")
        for i in range(len(verts)):
            normals = [v for v, _, inc in self._planes if i in inc]
            if linalg.rank(normals) != n:
                raise PolytopeError(f"{verts[i]} is not a vertex")

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    @cached_property
    def _planes(self):
        return _hyperplanes(self.vertices)

    @cached_property
    def _facets(self) -> tuple[Facet, ...]:
        return tuple(
            Facet(v, c, inc, _facet_volume(self.vertices, v, inc)) for v, c, inc in self._planes
        )

    def transform(self, U: Sequence[Sequence[int]]) -> LatticePolytope:
        """Image under ``u -> U u``."""
        return LatticePolytope(tuple(linalg.matvec(U, u) for u in self.vertices), self.name)

    def translate(self, t: Sequence[int]) -> LatticePolytope:
        return LatticePolytope(tuple(linalg.add(u, t) for u in self.vertices), self.name)


def _facet_volume(vertices, normal, incident, basis=None) -> int:
    idx = sorted(incident)
    if basis is None:
        basis = linalg.kernel_lattice_basis([list(normal)])
    coords = _lattice_coordinates([vertices[i] for i in idx], basis)
    if len(normal) > 1 and linalg.affine_hull(coords)[0] != len(normal) - 1:
        raise PolytopeError("degenerate facet")
    return _normalized_volume(coords)


def facets(P: LatticePolytope) -> list[Facet]:
    """Facets with primitive inner normals: ``<u, v> >= -c`` on ``P``."""
    return list(P._facets)


def facet_lattice_volume(P: LatticePolytope, F: Facet, basis: Sequence[IntVector] | None = None) -> int:
    """Normalized volume of a facet w.r.t. the lattice in its affine span.

    ``basis`` may be any lattice basis of ``{x : <x, v> = 0}``; the answer
    does not depend on it.
    """
    return _facet_volume(P.vertices, F.normal, F.vertex_indices, basis)


def normalized_volume(P: LatticePolytope) -> int:
    """``n!`` times the Euclidean volume."""
    return _normalized_volume(P.vertices)


def triangulation(P: LatticePolytope, apex: int | None = None) -> list[tuple[int, ...]]:
    return _triangulate(P.vertices, apex)


def barycenter(P: LatticePolytope, apex: int | None = None) -> tuple[Fraction, ...]:
    """Exact centroid of the solid polytope."""
    n = P.dim
    total = 0
    acc = [Fraction(0)] * n
    for s in _triangulate(P.vertices, apex):
        w = _simplex_volume(P.vertices, s)
        total += w
        for j in range(n):
            acc[j] += Fraction(w * sum(P.vertices[i][j] for i in s), n + 1)
    return tuple(a / total for a in acc)


def is_centered(P: LatticePolytope) -> bool:
    return not any(barycenter(P))


def is_reflexive(P: LatticePolytope) -> Verdict:
    for F in P._facets:
        if F.offset != 1:
            return Verdict(False, f"facet with normal {F.normal} has offset {F.offset}", F)
    return Verdict(True, "all facet offsets equal 1")


def edges(P: LatticePolytope) -> list[Edge]:
    n = P.dim
    on = [set() for _ in P.vertices]
    for k, F in enumerate(P._facets):
        for i in F.vertex_indices:
            on[i].add(k)
    out = []
    allv = frozenset(range(len(P.vertices)))
    for i, j in itertools.combinations(range(len(P.vertices)), 2):
        common = on[i] & on[j]
        if len(common) < n - 1:
            continue
        face = allv
        for k in common:
            face = face & P._facets[k].vertex_indices
        if face == {i, j}:
            d = linalg.sub(P.vertices[j], P.vertices[i])
            out.append(Edge((i, j), reduce(gcd, d, 0)))
    return out


def is_smooth(P: LatticePolytope) -> Verdict:
    """Primitive edge directions form a Z-basis at every vertex."""
    n = P.dim
    at: list[list[IntVector]] = [[] for _ in P.vertices]
    for e in edges(P):
        i, j = e.endpoints
        d = linalg.primitive(linalg.sub(P.vertices[j], P.vertices[i]))
        at[i].append(d)
        at[j].append(tuple(-x for x in d))
    for i, dirs in enumerate(at):
        u = P.vertices[i]
        if len(dirs) != n:
            return Verdict(False, f"vertex {u} lies on {len(dirs)} edges, not {n}", (u, None))
        dt = linalg.det(dirs)
        if abs(dt) != 1:
            return Verdict(False, f"edge directions at {u} have determinant {dt}", (u, dt))
    return Verdict(True, "every vertex cone is unimodular")


def dual_polytope(P: LatticePolytope) -> list[tuple[Fraction, ...]]:
    """Vertices of ``{y : <u, y> >= -1 for all vertices u}``.

    Computed by vertex enumeration of that inequality system, independently
    of the facet list.
    """
    if any(F.offset <= 0 for F in P._facets):
        raise PolytopeError("origin is not in the interior")
    n = P.dim
    out = set()
    for combo in itertools.combinations(P.vertices, n):
        if linalg.rank(combo) < n:
            continue
        y = linalg.solve(combo, [-1] * n)
        if all(linalg.dot(u, y) >= -1 for u in P.vertices):
            out.add(y)
    return sorted(out)


# ---------------------------------------------------------------- file format


def parse_polytope(doc: Any) -> LatticePolytope:
    """Build a polytope from ``{"dim": n, "vertices": [[...]], "name": ...}``."""
    if not isinstance(doc, dict):
        raise PolytopeError("polytope document must be an object")
    dim = doc.get("dim")
    verts = doc.get("vertices")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise PolytopeError("'dim' must be a positive integer")
    if not isinstance(verts, list) or not all(isinstance(v, list) for v in verts):
        raise PolytopeError("'vertices' must be a list of integer lists")
    for v in verts:
        if len(v) != dim:
            raise PolytopeError(f"vertex {v} does not have {dim} coordinates")
        for x in v:
            if not isinstance(x, int) or isinstance(x, bool):
                raise PolytopeError(f"non-integer coordinate {x!r}")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise PolytopeError("'name' must be a string")
    return LatticePolytope(tuple(tuple(v) for v in verts), name)


def polytope_document(P: LatticePolytope) -> dict:
    doc: dict = {"dim": P.dim, "vertices": [list(v) for v in P.vertices]}
    if P.name is not None:
        doc["name"] = P.name
    return doc


def load_polytope(path: str | Path) -> LatticePolytope:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise PolytopeError(f"cannot read {path}: {exc}") from exc
    return parse_polytope(doc)
