"""Subspace concentration inequalities for facet normals weighted by volume.

Three families of inequalities are checked, all over exact rationals:

``affine``
    ``sum_{v_k in A} vol_k / (dim A + 1) <= sum_k vol_k / (n + 1)`` for every
    proper affine subspace ``A`` of ``N_R = R^n``.
``linear``
    ``sum_{v_k in F} vol_k / dim F <= sum_k vol_k / n`` for every proper
    linear subspace ``F`` of ``R^n``.
``lifted``
    ``sum_{(v_k,-1) in W} vol_k / dim W <= sum_k vol_k / (n + 1)`` for every
    proper linear subspace ``W`` of ``V = R^n + R``.

Replacing a subspace by the span of the normals it contains keeps the left
numerator and can only shrink the dimension, so the finite family of spans
of normal subsets attains the maximum.  ``brute_force_oracle`` walks every
subset with an independent rank computation and must agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence, Union

from . import linalg
from .linalg import IntVector, fmt_q
from .polytope import LatticePolytope, facets, is_centered, is_reflexive, is_smooth


class Mode(str, Enum):
    AFFINE = "affine"
    LINEAR = "linear"
    LIFTED = "lifted"


class Status(str, Enum):
    STRICT = "strict"
    EQUALITY = "equality"
    VIOLATED = "violated"


class Overall(str, Enum):
    HOLDS_STRICTLY = "holds-strictly"
    HOLDS_WITH_EQUALITY = "holds-with-equality"
    VIOLATED = "violated"


# ---------------------------------------------------------------- subspaces


@dataclass(frozen=True)
class LinearSubspace:
    """Rational linear subspace stored by its reduced row echelon basis."""

    dirs: tuple[tuple[Fraction, ...], ...]
    ambient: int

    @classmethod
    def spanned_by(cls, vectors: Sequence[Sequence], ambient: int) -> LinearSubspace:
        return cls(linalg.rref(vectors), ambient)

    @property
    def dim(self) -> int:
        return len(self.dirs)

    def contains(self, v: Sequence) -> bool:
        return linalg.in_rowspace(self.dirs, v)

    def inside_horizontal(self) -> bool:
        """True if contained in ``{x_last = 0}``."""
        return all(row[-1] == 0 for row in self.dirs)

    def slice_at_minus_one(self) -> AffineSubspace:
        """``W ∩ {x_last = -1}`` as an affine subspace of ``R^(ambient-1)``."""
        point = next((tuple(x * (-1 / row[-1]) for x in row) for row in self.dirs if row[-1] != 0), None)
        if point is None:
            raise ValueError("subspace does not meet the hyperplane x_last = -1")
        horiz = linalg.kernel_lattice_basis([_unit(self.ambient, 1)])
        dirs = linalg.intersect_rowspaces(self.dirs, horiz)
        return AffineSubspace.from_point_and_dirs(point[:-1], [d[:-1] for d in dirs])

    def key(self) -> tuple:
        return ("linear", self.ambient, self.dirs)

    def basis_ints(self) -> list[list[int]]:
        return [list(linalg.clear_denominators(row)) for row in self.dirs]


def _unit(n: int, value) -> list:
    return [0] * (n - 1) + [value]


@dataclass(frozen=True)
class AffineSubspace:
    """Rational affine subspace ``base + span(dirs)``.

    ``dirs`` is in reduced row echelon form and ``base`` has zeros in its
    pivot columns, which makes the pair a canonical representation.
    """

    base: tuple[Fraction, ...]
    dirs: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_point_and_dirs(cls, point: Sequence, dirs: Sequence[Sequence]) -> AffineSubspace:
        echelon = linalg.rref(dirs) if dirs else ()
        return cls(linalg.reduce_mod_rowspace(echelon, point), echelon)

    @classmethod
    def spanned_by(cls, points: Sequence[Sequence]) -> AffineSubspace:
        p0 = points[0]
        return cls.from_point_and_dirs(p0, [linalg.sub(p, p0) for p in points[1:]])

    @property
    def dim(self) -> int:
        return len(self.dirs)

    @property
    def ambient(self) -> int:
        return len(self.base)

    def contains(self, p: Sequence) -> bool:
        return linalg.in_rowspace(self.dirs, linalg.sub(p, self.base))

    def lift(self) -> LinearSubspace:
        """The linear span of ``{(x, -1) : x in A}`` in ``R^(n+1)``."""
        gens = [tuple(self.base) + (Fraction(-1),)] + [tuple(d) + (Fraction(0),) for d in self.dirs]
        return LinearSubspace.spanned_by(gens, self.ambient + 1)

    def key(self) -> tuple:
        return ("affine", self.base, self.dirs)

    def base_strings(self) -> list[str]:
        return [fmt_q(x) for x in self.base]

    def basis_ints(self) -> list[list[int]]:
        return [list(linalg.clear_denominators(row)) for row in self.dirs]


Subspace = Union[AffineSubspace, LinearSubspace]


# ---------------------------------------------------------------- records and reports


@dataclass(frozen=True)
class ConcentrationRecord:
    subspace: Subspace
    incident: frozenset[int]
    lhs: Fraction
    rhs: Fraction

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def status(self) -> Status:
        if self.lhs > self.rhs:
            return Status.VIOLATED
        if self.lhs == self.rhs:
            return Status.EQUALITY
        return Status.STRICT

    def to_dict(self) -> dict:
        d: dict = {"dim": self.dim}
        if isinstance(self.subspace, AffineSubspace):
            d["base"] = self.subspace.base_strings()
        d["basis"] = self.subspace.basis_ints()
        d["incident"] = sorted(self.incident)
        d["lhs"] = fmt_q(self.lhs)
        d["status"] = self.status.value
        return d


@dataclass
class ConcentrationReport:
    mode: Mode
    n: int
    normals: tuple[IntVector, ...]
    volumes: tuple[int, ...]
    rhs: Fraction
    records: list[ConcentrationRecord]
    equality_pairs: list[tuple[int, int]] = field(default_factory=list)
    unpaired: list[int] = field(default_factory=list)
    hypotheses_met: bool | None = None

    @property
    def overall(self) -> Overall:
        statuses = {r.status for r in self.records}
        if Status.VIOLATED in statuses:
            return Overall.VIOLATED
        if Status.EQUALITY in statuses:
            return Overall.HOLDS_WITH_EQUALITY
        return Overall.HOLDS_STRICTLY

    @property
    def holds(self) -> bool:
        return self.overall is not Overall.VIOLATED

    def with_status(self, status: Status) -> list[ConcentrationRecord]:
        return [r for r in self.records if r.status is status]

    @property
    def witnesses(self) -> list[ConcentrationRecord]:
        return self.with_status(Status.VIOLATED)

    @property
    def contradicts_theorem(self) -> bool:
        """A violation or an unpaired equality although the hypotheses hold."""
        return bool(self.hypotheses_met) and (not self.holds or bool(self.unpaired))

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "rhs": fmt_q(self.rhs),
            "overall": self.overall.value,
            "records": [r.to_dict() for r in self.records],
            "equality_pairs": [list(p) for p in self.equality_pairs],
            "unpaired_equalities": list(self.unpaired),
            "hypotheses_met": self.hypotheses_met,
        }


# ---------------------------------------------------------------- candidates


def _points(normals: Sequence[IntVector], mode: Mode) -> list[IntVector]:
    if mode is Mode.AFFINE or mode is Mode.LINEAR:
        return [tuple(v) for v in normals]
    return [tuple(v) + (-1,) for v in normals]


def _span(points: Sequence[IntVector], idx: Sequence[int], mode: Mode) -> Subspace:
    sel = [points[i] for i in idx]
    if mode is Mode.AFFINE:
        return AffineSubspace.spanned_by(sel)
    return LinearSubspace.spanned_by(sel, len(points[0]))


def _max_dim(n: int, mode: Mode) -> int:
    return n - 1 if mode is not Mode.LIFTED else n


def candidate_subspaces(normals: Sequence[IntVector], mode: Mode | str) -> list[tuple[Subspace, frozenset[int]]]:
    """All distinct proper spans of nonempty normal subsets, with incidence.

    The span of a subset only depends on the set of normals it contains, so
    spans are grown one normal at a time and deduplicated by that set.
    Output is ordered by ``(dim, canonical form)``.
    """
    mode = Mode(mode)
    if not normals:
        raise ValueError("no normals given")
    points = _points(normals, mode)
    n = len(normals[0])
    top = _max_dim(n, mode)
    seen: dict[frozenset[int], Subspace] = {}
    frontier: list[tuple[Subspace, frozenset[int]]] = []
    for i in range(len(points)):
        S = _span(points, [i], mode)
        if S.dim > top:
            continue
        inc = frozenset(k for k, p in enumerate(points) if S.contains(p))
        if inc not in seen:
            seen[inc] = S
            frontier.append((S, inc))
    while frontier:
        nxt = []
        for S, inc in frontier:
            if S.dim >= top:
                continue
            for j in range(len(points)):
                if j in inc:
                    continue
                T = _span(points, sorted(inc) + [j], mode)
                if T.dim > top:
                    continue
                tinc = frozenset(k for k, p in enumerate(points) if T.contains(p))
                if tinc not in seen:
                    seen[tinc] = T
                    nxt.append((T, tinc))
        frontier = nxt
    out = [(S, inc) for inc, S in seen.items()]
    out.sort(key=lambda t: (t[0].dim, _sort_key(t[0])))
    return out


def _sort_key(S: Subspace) -> tuple:
    if isinstance(S, AffineSubspace):
        return (S.dirs, S.base)
    return (S.dirs,)


def _horizontal_candidates(normals: Sequence[IntVector], lifted: Sequence[tuple[Subspace, frozenset[int]]]) -> list[LinearSubspace]:
    """Subspaces of ``{x_(n+1) = 0}``: the hyperplane itself and ``W ∩`` it."""
    n1 = len(normals[0]) + 1
    horiz = linalg.kernel_lattice_basis([[0] * (n1 - 1) + [1]])
    found = {LinearSubspace.spanned_by(horiz, n1).key(): LinearSubspace.spanned_by(horiz, n1)}
    for W, _ in lifted:
        rows = linalg.intersect_rowspaces(W.dirs, horiz)
        if rows:
            H = LinearSubspace(rows, n1)
            found.setdefault(H.key(), H)
    return sorted(found.values(), key=lambda H: (H.dim, H.dirs))


# ---------------------------------------------------------------- evaluation


def _lhs(total: int, dim: int, mode: Mode) -> Fraction:
    return Fraction(total, dim + 1 if mode is Mode.AFFINE else dim)


def _rhs(volumes: Sequence[int], n: int, mode: Mode) -> Fraction:
    return Fraction(sum(volumes), n if mode is Mode.LINEAR else n + 1)


def _complementary(A: Subspace, B: Subspace, n: int, mode: Mode) -> bool:
    if mode is Mode.AFFINE:
        if A.dim + B.dim != n - 1:
            return False
        pts = [A.base] + [linalg.add(A.base, d) for d in A.dirs]
        pts += [B.base] + [linalg.add(B.base, d) for d in B.dirs]
        return linalg.affine_hull(pts)[0] == n
    amb = A.ambient
    return A.dim + B.dim == amb and linalg.rank(list(A.dirs) + list(B.dirs)) == amb


def _pair_equalities(records: Sequence[ConcentrationRecord], n: int, mode: Mode):
    eq = [i for i, r in enumerate(records) if r.status is Status.EQUALITY]
    pairs = []
    paired = set()
    for a, b in itertools.combinations(eq, 2):
        if _complementary(records[a].subspace, records[b].subspace, n, mode):
            pairs.append((a, b))
            paired.update((a, b))
    return pairs, [i for i in eq if i not in paired]


def evaluate(
    normals: Sequence[IntVector],
    volumes: Sequence[int],
    mode: Mode | str,
    hypotheses_met: bool | None = None,
) -> ConcentrationReport:
    """Evaluate one family of inequalities over the candidate subspaces."""
    mode = Mode(mode)
    normals = tuple(tuple(v) for v in normals)
    volumes = tuple(volumes)
    if len(normals) != len(volumes):
        raise ValueError("normals and volumes differ in length")
    n = len(normals[0])
    rhs = _rhs(volumes, n, mode)
    cands = candidate_subspaces(normals, mode)
    records = [
        ConcentrationRecord(S, inc, _lhs(sum(volumes[k] for k in inc), S.dim, mode), rhs)
        for S, inc in cands
    ]
    if mode is Mode.LIFTED:
        records += [ConcentrationRecord(H, frozenset(), Fraction(0), rhs) for H in _horizontal_candidates(normals, cands)]
    pairs, unpaired = _pair_equalities(records, n, mode)
    return ConcentrationReport(mode, n, normals, volumes, rhs, records, pairs, unpaired, hypotheses_met)


def theorem_hypotheses(P: LatticePolytope) -> bool:
    """Smooth, reflexive and centered."""
    return bool(is_smooth(P)) and bool(is_reflexive(P)) and is_centered(P)


def _check(P: LatticePolytope, mode: Mode) -> ConcentrationReport:
    fs = facets(P)
    return evaluate([F.normal for F in fs], [F.lattice_volume for F in fs], mode, theorem_hypotheses(P))


def check_affine(P: LatticePolytope) -> ConcentrationReport:
    return _check(P, Mode.AFFINE)


def check_linear(P: LatticePolytope) -> ConcentrationReport:
    return _check(P, Mode.LINEAR)


def check_lifted(P: LatticePolytope) -> ConcentrationReport:
    return _check(P, Mode.LIFTED)


def check(P: LatticePolytope, mode: Mode | str) -> ConcentrationReport:
    return _check(P, Mode(mode))


def lifted_correspondence(affine: ConcentrationReport, lifted: ConcentrationReport) -> list[str]:
    """Problems with the affine/lifted dictionary ``A <-> span{(x,-1) : x in A}``.

    Records of ``lifted`` off the hyperplane ``{x_(n+1)=0}`` must match the
    affine records one-to-one with equal left-hand sides, and records inside
    it must have left-hand side zero.  Returns an empty list when all hold.
    """
    problems = []
    by_lift = {r.subspace.lift().key(): r for r in affine.records}
    matched = set()
    for w in lifted.records:
        if w.subspace.inside_horizontal():
            if w.lhs != 0:
                problems.append(f"horizontal subspace with lhs {w.lhs}")
            continue
        a = by_lift.get(w.subspace.key())
        if a is None:
            problems.append(f"lifted record {w.subspace.dirs} has no affine partner")
            continue
        sliced = w.subspace.slice_at_minus_one()
        if sliced.key() != a.subspace.key():
            problems.append(f"slice of {w.subspace.dirs} differs from {a.subspace}")
        if w.lhs != a.lhs or w.incident != a.incident:
            problems.append(f"lhs mismatch {w.lhs} vs {a.lhs}")
        matched.add(a.subspace.key())
    if len(matched) != len(affine.records):
        problems.append("some affine records have no lifted partner")
    if affine.overall != lifted.overall:
        problems.append(f"verdicts differ: {affine.overall.value} vs {lifted.overall.value}")
    return problems


# ---------------------------------------------------------------- oracle


ORACLE_LIMIT = 20


def brute_force_oracle(normals: Sequence[IntVector], volumes: Sequence[int], mode: Mode | str) -> ConcentrationReport:
    """Evaluate the inequality on every nonempty subset of normals.

    Dimension and incidence are computed from ranks, never from the
    candidate machinery.  One record per subset whose span is proper.
    """
    mode = Mode(mode)
    normals = tuple(tuple(v) for v in normals)
    if len(normals) > ORACLE_LIMIT:
        raise ValueError(f"oracle limited to {ORACLE_LIMIT} normals")
    n = len(normals[0])
    rhs = _rhs(volumes, n, mode)
    records = []
    m = len(normals)
    if mode is Mode.AFFINE:
        vecs = [tuple(v) + (1,) for v in normals]
    else:
        vecs = _points(normals, mode)
    ambient = len(vecs[0])
    for size in range(1, m + 1):
        for S in itertools.combinations(range(m), size):
            rk = linalg.rank([vecs[i] for i in S])
            if rk == ambient:
                continue
            inc = frozenset(k for k in range(m) if linalg.rank([vecs[i] for i in S] + [vecs[k]]) == rk)
            dim = rk - 1 if mode is Mode.AFFINE else rk
            lhs = _lhs(sum(volumes[k] for k in inc), dim, mode)
            records.append(ConcentrationRecord(_span(_points(normals, mode), S, mode), inc, lhs, rhs))
    return ConcentrationReport(mode, n, normals, tuple(volumes), rhs, records)


def witness_sets(report: ConcentrationReport, status: Status) -> set[frozenset[int]]:
    return {r.incident for r in report.with_status(status)}


def agrees_with_oracle(report: ConcentrationReport, oracle: ConcentrationReport) -> bool:
    """Same verdict and same violation/equality witnesses up to span identity."""
    return (
        report.overall == oracle.overall
        and witness_sets(report, Status.VIOLATED) == witness_sets(oracle, Status.VIOLATED)
        and witness_sets(report, Status.EQUALITY) == witness_sets(oracle, Status.EQUALITY)
    )
