"""Curated polytopes and the reflexive polygon enumerator.

The stock corpus lives as polytope JSON documents under ``data/`` next to this
module, each carrying expected flags and a provenance tag per flag.  Flags are
recomputed whenever an entry is loaded, so a mislabeled file is caught before
any theorem check looks at it.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path
from typing import Iterable, Sequence

from . import linalg
from .bundle import Stability, polytope_bundle, stability_verdict
from .concentration import Overall, check_affine
from .linalg import IntVector, Matrix
from .polytope import (
    LatticePolytope,
    PolytopeError,
    edges,
    is_centered,
    is_reflexive,
    is_smooth,
    normalized_volume,
    parse_polytope,
    polytope_document,
)

FLAGS = ("reflexive", "smooth", "centered")
DATA_DIR = Path(__file__).with_name("data")
ENV_VAR = "POLYCERT_CORPUS_DIR"


class CorpusError(ValueError):
    """A corpus entry whose stored flags disagree with the computed ones."""


def compute_flags(P: LatticePolytope) -> dict[str, bool]:
    return {
        "reflexive": bool(is_reflexive(P)),
        "smooth": bool(is_smooth(P)),
        "centered": is_centered(P),
    }


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    polytope: LatticePolytope
    expected: dict[str, bool]
    provenance: dict[str, str] = field(default_factory=dict)

    def mismatches(self) -> list[str]:
        got = compute_flags(self.polytope)
        return [
            f"{self.name}: {k} labeled {self.expected[k]} but computed {got[k]}"
            for k in FLAGS
            if k in self.expected and self.expected[k] != got[k]
        ]

    def verify(self) -> CorpusEntry:
        bad = self.mismatches()
        if bad:
            raise CorpusError("; ".join(bad))
        return self

    def to_dict(self) -> dict:
        doc = polytope_document(self.polytope)
        doc["name"] = self.name
        doc["expected"] = {k: self.expected[k] for k in FLAGS if k in self.expected}
        doc["provenance"] = dict(self.provenance)
        return doc


def entry_from_dict(doc: dict, verify: bool = True) -> CorpusEntry:
    P = parse_polytope(doc)
    name = doc.get("name") or "unnamed"
    expected = doc.get("expected", {})
    if not isinstance(expected, dict) or any(not isinstance(v, bool) for v in expected.values()):
        raise PolytopeError(f"{name}: 'expected' must map flags to booleans")
    entry = CorpusEntry(name, P, dict(expected), dict(doc.get("provenance", {})))
    return entry.verify() if verify else entry


def _entry(name: str, verts, flags: tuple[bool, bool, bool], source: str = "derived", **sources) -> CorpusEntry:
    expected = dict(zip(FLAGS, flags))
    provenance = {k: sources.get(k, source) for k in FLAGS}
    return CorpusEntry(name, LatticePolytope(tuple(map(tuple, verts)), name), expected, provenance)


def builtin_corpus() -> list[CorpusEntry]:
    """Hand-curated entries: the three triangles, the smooth reflexive polygons and a few 3-folds."""
    entries = [
        _entry("fig1a", [(-1, 2), (2, -1), (-1, -1)], (True, True, True), "published", centered="derived"),
        _entry("fig1b", [(0, 1), (1, -1), (-1, -1)], (True, False, False), "published"),
        _entry("fig1c", [(0, 1), (1, 0), (-1, -1)], (True, False, True), "published", centered="derived"),
        # smooth reflexive polygons besides fig1a (which is the projective plane)
        _entry("p1xp1", [(-1, -1), (1, -1), (1, 1), (-1, 1)], (True, True, True)),
        _entry("bl1p2", [(-1, 0), (0, -1), (2, -1), (-1, 2)], (True, True, False)),
        _entry("bl2p2", [(-1, -1), (1, -1), (1, 0), (0, 1), (-1, 1)], (True, True, False)),
        _entry("bl3p2", [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)], (True, True, True)),
        _entry("cube3", list(itertools.product((-1, 1), repeat=3)), (True, True, True)),
        _entry("p3", [(-1, -1, -1), (3, -1, -1), (-1, 3, -1), (-1, -1, 3)], (True, True, True)),
        _entry(
            "p2xp1",
            [(a, b, c) for (a, b) in [(-1, 2), (2, -1), (-1, -1)] for c in (-1, 1)],
            (True, True, True),
        ),
        _entry(
            "bl1p2xp1",
            [(a, b, c) for (a, b) in [(-1, 0), (0, -1), (2, -1), (-1, 2)] for c in (-1, 1)],
            (True, True, False),
        ),
        # smooth but not reflexive: the origin is a vertex
        _entry("box012", list(itertools.product((0, 2), repeat=2)), (False, True, False)),
    ]
    return [e.verify() for e in entries]


# ---------------------------------------------------------------- loading


def corpus_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else DATA_DIR


def load_corpus(directory: str | Path | None = None, verify: bool = True) -> list[CorpusEntry]:
    """All ``*.json`` entries of a directory, sorted by file name."""
    directory = Path(directory) if directory is not None else corpus_dir()
    entries = []
    for path in sorted(directory.glob("*.json")):
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise PolytopeError(f"{path.name}: {exc}") from exc
        entries.append(entry_from_dict(doc, verify=verify))
    return entries


def write_corpus(entries: Iterable[CorpusEntry], directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for e in entries:
        path = directory / f"{e.name}.json"
        doc = e.to_dict()
        body = ",\n".join(f" {json.dumps(k)}: {json.dumps(v)}" for k, v in doc.items())
        path.write_text("{\n" + body + "\n}\n")
        paths.append(path)
    return paths


def verify_entry(entry: CorpusEntry) -> list[str]:
    """Flag re-verification, the stability bridge and the theorem check for one entry."""
    problems = entry.mismatches()
    if problems:
        return problems
    P = entry.polytope
    flags = compute_flags(P)
    if not flags["smooth"]:
        return []
    report = check_affine(P)
    _, data, volumes = polytope_bundle(P)
    kind = stability_verdict(data, volumes).kind
    bridge = {
        Stability.UNSTABLE: Overall.VIOLATED,
        Stability.STRICTLY_SEMISTABLE: Overall.HOLDS_WITH_EQUALITY,
        Stability.STABLE: Overall.HOLDS_STRICTLY,
    }
    if bridge[kind] != report.overall:
        problems.append(f"{entry.name}: bundle is {kind.value} but affine check is {report.overall.value}")
    if flags["reflexive"] and flags["centered"]:
        if report.overall == Overall.VIOLATED:
            w = report.witnesses[0]
            problems.append(f"{entry.name}: affine condition violated at {w.to_dict()}")
        if report.unpaired or report.contradicts_theorem:
            problems.append(f"{entry.name}: equality records without complement {report.unpaired}")
        if kind == Stability.UNSTABLE:
            problems.append(f"{entry.name}: canonical extension is unstable")
    return problems


# ---------------------------------------------------------------- unimodular equivalence


def unimodular_equivalent(P: LatticePolytope, Q: LatticePolytope) -> Matrix | None:
    """A unimodular ``U`` with ``U P = Q`` as vertex sets, or None.

    ``U`` is pinned down by the images of ``n`` linearly independent vertices
    of ``P``; since ``U`` maps vertices to vertices, trying every ordered
    ``n``-tuple of vertices of ``Q`` as images is exhaustive.
    """
    n = P.dim
    if (
        Q.dim != n
        or len(P.vertices) != len(Q.vertices)
        or normalized_volume(P) != normalized_volume(Q)
        or sorted(e.lattice_length for e in edges(P)) != sorted(e.lattice_length for e in edges(Q))
    ):
        return None
    idx = linalg.independent_subset(P.vertices)[:n]
    B = linalg.transpose([P.vertices[i] for i in idx])
    Binv = linalg.inverse(B)
    target = set(Q.vertices)
    for images in itertools.permutations(Q.vertices, n):
        T = linalg.transpose(images)
        U = linalg.matmul(T, Binv)
        if any(x.denominator != 1 for row in U for x in row):
            continue
        U = [[int(x) for x in row] for row in U]
        if abs(linalg.det(U)) != 1:
            continue
        if {linalg.matvec(U, u) for u in P.vertices} == target:
            return U
    return None


# ---------------------------------------------------------------- enumeration


def _det2(u: Sequence[int], w: Sequence[int]) -> int:
    return u[0] * w[1] - u[1] * w[0]


def _half(s: IntVector, w: IntVector) -> int:
    """0 if ``w`` is at angle in [0, pi) counterclockwise from ``s``, else 1."""
    a = s[0] * w[0] + s[1] * w[1]
    b = _det2(s, w)
    return 0 if b > 0 or (b == 0 and a > 0) else 1


def _angle_before(s: IntVector, w1: IntVector, w2: IntVector) -> bool:
    h1, h2 = _half(s, w1), _half(s, w2)
    if h1 != h2:
        return h1 < h2
    return _det2(w1, w2) > 0


def _reflexive_cycles(bound: int) -> list[tuple[IntVector, ...]]:
    """Counterclockwise vertex cycles whose every edge lies at lattice distance one from 0.

    An edge ``u -> w`` sits on the line ``<x, v> = -1`` with ``v`` primitive
    exactly when ``det(u, w) = gcd(w - u)``; the cycle is started at its
    lexicographically smallest vertex, so every polygon is found once.
    """
    pts = [p for p in itertools.product(range(-bound, bound + 1), repeat=2) if p != (0, 0)]

    def edge_ok(u, w) -> bool:
        d = _det2(u, w)
        return d > 0 and d == gcd(w[0] - u[0], w[1] - u[1])

    succ = {u: [w for w in pts if edge_ok(u, w)] for u in pts}

    def convex(a, b, c) -> bool:
        return _det2(linalg.sub(b, a), linalg.sub(c, b)) > 0

    found = []

    def extend(path: list[IntVector]) -> None:
        s, last = path[0], path[-1]
        if len(path) >= 3 and s in succ[last] and convex(path[-2], last, s) and convex(last, s, path[1]):
            found.append(tuple(path))
        for w in succ[last]:
            if w <= s or (len(path) >= 2 and not convex(path[-2], last, w)):
                continue
            if len(path) >= 2 and not _angle_before(s, last, w):
                continue
            path.append(w)
            extend(path)
            path.pop()

    for s in pts:
        extend([s])
    return found


def _class_key(P: LatticePolytope) -> tuple:
    return (len(P.vertices), normalized_volume(P), tuple(sorted(P.vertices)))


def _compact_key(P: LatticePolytope) -> tuple:
    coords = [abs(x) for v in P.vertices for x in v]
    return (max(coords), sum(coords), tuple(sorted(P.vertices)))


def enumerate_reflexive_polygons(bound: int) -> list[LatticePolytope]:
    """Reflexive polygons with vertices in ``[-bound, bound]^2`` up to unimodular equivalence.

    Each class is represented by its most compact member found in the box
    (smallest max-norm, then smallest coordinate sum, then smallest sorted
    vertex list), so representatives do not drift as the box grows.  Output is sorted by vertex count,
    normalized volume and that vertex list.
    """
    if not isinstance(bound, int) or bound < 2:
        raise ValueError("bound must be an integer >= 2")
    classes: dict[tuple[int, int], list[list[LatticePolytope]]] = {}
    for cyc in _reflexive_cycles(bound):
        P = LatticePolytope(cyc)
        bucket = classes.setdefault((len(cyc), normalized_volume(P)), [])
        for members in bucket:
            if unimodular_equivalent(members[0], P) is not None:
                members.append(P)
                break
        else:
            bucket.append([P])
    reps = [
        min((LatticePolytope(tuple(sorted(M.vertices))) for M in members), key=_compact_key)
        for bucket in classes.values()
        for members in bucket
    ]
    reps.sort(key=_class_key)
    return [LatticePolytope(R.vertices, f"reflexive2d_{i:02d}") for i, R in enumerate(reps, 1)]


def enumerated_entries(bound: int = 3) -> list[CorpusEntry]:
    out = []
    for P in enumerate_reflexive_polygons(bound):
        flags = compute_flags(P)
        out.append(CorpusEntry(P.name, P, flags, {k: "derived" for k in FLAGS}))
    return out


__all__ = [
    "CorpusEntry",
    "CorpusError",
    "DATA_DIR",
    "ENV_VAR",
    "builtin_corpus",
    "compute_flags",
    "corpus_dir",
    "entry_from_dict",
    "enumerate_reflexive_polygons",
    "enumerated_entries",
    "load_corpus",
    "unimodular_equivalent",
    "verify_entry",
    "write_corpus",
]
