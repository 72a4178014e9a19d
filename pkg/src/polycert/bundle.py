"""Fans, Klyachko filtrations and the slope-stability inequality.

A toric vector bundle of rank ``r`` is encoded by a vector space ``E = Q^r``
and, for each ray of the fan, a decreasing filtration ``E^rho(i)``.  Only the
jumps are stored: a filtration is a list of ``(i, basis)`` steps with strictly
increasing ``i`` and strictly shrinking subspaces, where ``E^rho(i)`` is the
subspace of the first step with index ``>= i``, the whole space before the
first step and zero after the last.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Sequence

from . import linalg
from .concentration import LinearSubspace
from .linalg import IntVector, fmt_q
from .polytope import LatticePolytope, PolytopeError, facets


class BundleError(ValueError):
    pass


# ---------------------------------------------------------------- fans


@dataclass(frozen=True)
class Fan:
    """Fan given by primitive rays and its maximal cones (sorted ray indices)."""

    rays: tuple[IntVector, ...]
    cones: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rays", tuple(tuple(r) for r in self.rays))
        object.__setattr__(self, "cones", tuple(tuple(sorted(c)) for c in self.cones))
        if len(set(self.rays)) != len(self.rays):
            raise BundleError("rays must be distinct")
        for r in self.rays:
            if linalg.primitive(r) != r:
                raise BundleError(f"ray {r} is not primitive")

    @property
    def dim(self) -> int:
        return len(self.rays[0])

    def ray_matrix(self, cone: Sequence[int]) -> list[IntVector]:
        return [self.rays[i] for i in cone]

    def is_simplicial(self) -> bool:
        return all(linalg.rank(self.ray_matrix(c)) == len(c) for c in self.cones)

    def is_smooth(self) -> bool:
        """Every maximal cone is generated by part of a Z-basis."""
        for c in self.cones:
            M = self.ray_matrix(c)
            if linalg.rank(M) != len(c):
                return False
            if any(d != 1 for d in linalg.invariant_factors(M)):
                return False
        return True

    def is_complete(self) -> bool:
        """Each wall of a full-dimensional simplicial fan separates exactly two cones.

        For a genuine fan this pseudomanifold condition is equivalent to the
        support being all of ``R^n``.
        """
        n = self.dim
        if not self.cones or not self.is_simplicial() or any(len(c) != n for c in self.cones):
            return False
        walls: dict[tuple[int, ...], list[int]] = {}
        for c in self.cones:
            for i in c:
                wall = tuple(j for j in c if j != i)
                walls.setdefault(wall, []).append(i)
        for wall, opposite in walls.items():
            if len(opposite) != 2:
                return False
            if n == 1:
                a, b = (self.rays[i][0] for i in opposite)
                if a * b >= 0:
                    return False
                continue
            (normal,) = linalg.kernel_lattice_basis(self.ray_matrix(wall))
            a, b = (linalg.dot(self.rays[i], normal) for i in opposite)
            if a * b >= 0:
                return False
        return True

    def all_cones(self) -> list[tuple[int, ...]]:
        """Every nonzero face of the maximal cones (simplicial fans only)."""
        if not self.is_simplicial():
            raise BundleError("faces are only enumerated for simplicial fans")
        faces = set()
        for c in self.cones:
            for k in range(1, len(c) + 1):
                faces.update(itertools.combinations(c, k))
        return sorted(faces, key=lambda f: (len(f), f))

    def to_dict(self) -> dict:
        return {"rays": [list(r) for r in self.rays], "cones": [list(c) for c in self.cones]}


def normal_fan(P: LatticePolytope) -> Fan:
    """Inner normal fan: one maximal cone per vertex, rays in facet order."""
    fs = facets(P)
    cones = []
    for i in range(len(P.vertices)):
        cones.append(tuple(k for k, F in enumerate(fs) if i in F.vertex_indices))
    fan = Fan(tuple(F.normal for F in fs), tuple(cones))
    if not fan.is_simplicial():
        raise BundleError("normal fan is not simplicial (polytope is not simple)")
    return fan


@dataclass(frozen=True)
class ConeFan:
    """The fan of the cone over ``X`` in ``N_R + R``.

    Ray ``k < m`` is ``(v_k, -1)`` and ray ``m`` is ``(0, ..., 0, 1)``.
    ``minus[s]`` and ``plus[s]`` are the cones attached to the cone ``s`` of
    the base fan; ``top`` is the cone on all ``(v_k, -1)``, present only for
    the projective cone ``Y`` and dropped for ``Y' = Y`` minus its vertex.
    """

    fan: Fan
    minus: dict[tuple[int, ...], tuple[int, ...]]
    plus: dict[tuple[int, ...], tuple[int, ...]]
    lone_ray: int
    top: tuple[int, ...] | None = None

    def all_cones(self) -> list[tuple[int, ...]]:
        """Every cone of the fan including the origin ``()``."""
        cones = [(), (self.lone_ray,)]
        cones += list(self.minus.values()) + list(self.plus.values())
        if self.top is not None:
            cones.append(self.top)
        return cones


def cone_fan(fanX: Fan, include_top: bool = False) -> ConeFan:
    if not fanX.is_complete():
        raise BundleError("cone fan needs a complete base fan")
    m = len(fanX.rays)
    n = fanX.dim
    rays = tuple(tuple(v) + (-1,) for v in fanX.rays) + ((0,) * n + (1,),)
    minus = {}
    plus = {}
    for s in fanX.all_cones():
        minus[s] = s
        plus[s] = s + (m,)
    maximal = [plus[c] for c in fanX.cones]
    top = tuple(range(m)) if include_top else None
    if top is not None:
        maximal.append(top)
    return ConeFan(Fan(rays, tuple(maximal)), minus, plus, m, top)


# ---------------------------------------------------------------- filtrations


def _span_dim(vectors: Sequence[Sequence]) -> int:
    return linalg.rank(vectors) if vectors else 0


def _meet_dim(A: Sequence[Sequence], B: Sequence[Sequence]) -> int:
    """``dim(span A ∩ span B)``."""
    return _span_dim(A) + _span_dim(B) - _span_dim(list(A) + list(B))


def _contains(basis: Sequence[Sequence], v: Sequence) -> bool:
    return _span_dim(list(basis) + [v]) == _span_dim(basis)


@dataclass(frozen=True)
class Filtration:
    steps: tuple[tuple[int, tuple[tuple, ...]], ...]

    def subspace(self, i: int) -> tuple[tuple, ...]:
        for step, basis in self.steps:
            if i <= step:
                return basis
        return ()

    @property
    def indices(self) -> list[int]:
        return [s for s, _ in self.steps]


@dataclass(frozen=True)
class KlyachkoBundleData:
    rank: int
    filtrations: tuple[Filtration, ...]

    def __post_init__(self) -> None:
        r = self.rank
        for k, f in enumerate(self.filtrations):
            if not f.steps:
                raise BundleError(f"ray {k}: empty filtration")
            idx = f.indices
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise BundleError(f"ray {k}: steps must strictly increase")
            dims = [_span_dim(b) for _, b in f.steps]
            if dims[0] != r:
                raise BundleError(f"ray {k}: first step must be the whole space")
            if any(b >= a for a, b in zip(dims, dims[1:])) or dims[-1] == 0:
                raise BundleError(f"ray {k}: subspaces must strictly decrease and stay nonzero")
            for (_, big), (_, small) in zip(f.steps, f.steps[1:]):
                if _span_dim(list(big) + list(small)) != _span_dim(big):
                    raise BundleError(f"ray {k}: filtration is not decreasing")

    def jumps(self, k: int) -> dict[int, int]:
        """``e^[rho](i) = dim E(i) - dim E(i+1)`` at the steps of ray ``k``."""
        return subspace_profile(self, _full(self.rank)).jumps[k]


def _full(r: int) -> list[IntVector]:
    return [tuple(row) for row in linalg.identity(r)]


@dataclass(frozen=True)
class SubspaceProfile:
    basis: tuple[tuple, ...]
    jumps: tuple[dict[int, int], ...]

    @property
    def dim(self) -> int:
        return _span_dim(self.basis)


def subspace_profile(data: KlyachkoBundleData, F: Sequence[Sequence]) -> SubspaceProfile:
    """Jump counts ``f^[rho](i) = dim F(i) - dim F(i+1)`` with ``F(i) = E^rho(i) ∩ F``."""
    F = tuple(tuple(v) for v in F)
    out = []
    for filt in data.filtrations:
        meets = [_meet_dim(F, basis) for _, basis in filt.steps] + [0]
        out.append({i: meets[j] - meets[j + 1] for j, i in enumerate(filt.indices) if meets[j] != meets[j + 1]})
    return SubspaceProfile(F, tuple(out))


def canonical_extension(fanX: Fan) -> KlyachkoBundleData:
    """Filtrations of the extension of the tangent bundle by ``O`` with class ``c_1``.

    On ``E = N_Q + Q``: ``E`` for ``i <= 0``, the line through ``(v_k, -1)`` at
    ``i = 1`` and zero from ``i = 2`` on.
    """
    if not fanX.is_smooth() or not fanX.is_complete():
        raise BundleError("canonical extension requires smooth fan")
    n = fanX.dim
    # the trivial summand direction (0,...,0,1) leads the basis of E
    whole = (tuple(_full(n + 1)[n]),) + tuple(_full(n + 1)[:n])
    filts = [Filtration(((0, whole), (1, (tuple(v) + (-1,),)))) for v in fanX.rays]
    return KlyachkoBundleData(n + 1, tuple(filts))


# ---------------------------------------------------------------- compatibility


@dataclass
class CompatibilityResult:
    compatible: bool
    decompositions: dict[tuple[int, ...], list[tuple[IntVector, tuple]]] = field(default_factory=dict)
    failed_cone: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.compatible


def _candidate_pool(data: KlyachkoBundleData, cone: Sequence[int]) -> list[tuple]:
    """Basis vectors of all intersections of one step subspace per ray, deepest first."""
    options = [[(i, b) for i, b in data.filtrations[k].steps] for k in cone]
    pool: list[tuple] = []
    seen: list[tuple] = []
    combos = list(itertools.product(*options))
    combos.sort(key=lambda c: -sum(i for i, _ in c))
    r = data.rank
    for combo in combos:
        meet: tuple = tuple(combo[0][1])
        for _, b in combo[1:]:
            if _span_dim(b) == r:
                continue
            meet = tuple(b) if _span_dim(meet) == r else _meet_basis(meet, b)
            if not meet:
                break
        for v in meet:
            key = linalg.rref([v])
            if key not in seen:
                seen.append(key)
                pool.append(v)
    return pool


def _meet_basis(A: Sequence[Sequence], B: Sequence[Sequence]) -> tuple:
    return tuple(linalg.clear_denominators(r) for r in linalg.intersect_rowspaces(A, B))


def _weight(data: KlyachkoBundleData, k: int, v: Sequence) -> int:
    """Largest ``i`` with ``v in E^rho_k(i)``."""
    filt = data.filtrations[k]
    w = filt.indices[0]
    for i, b in filt.steps:
        if _contains(b, v):
            w = i
    return w


def _splits(data: KlyachkoBundleData, cone: Sequence[int], basis: Sequence[Sequence]) -> bool:
    for k in cone:
        for _, b in data.filtrations[k].steps:
            inside = sum(1 for v in basis if _contains(b, v))
            if inside != _span_dim(b):
                return False
    return True


def compatibility_check(fan: Fan, data: KlyachkoBundleData) -> CompatibilityResult:
    """Look for an eigenspace decomposition of ``E`` on every maximal cone.

    The search runs over bases of ``E`` drawn from the vectors spanning the
    intersections of filtration steps; a basis works if every step subspace
    of every ray in the cone is spanned by the basis vectors it contains.
    The induced weights are then checked against the displayed condition and
    for realizability by a character ``u in M``.
    """
    if not fan.is_simplicial():
        raise BundleError("compatibility is only checked on simplicial fans")
    r = data.rank
    result = CompatibilityResult(True)
    for cone in fan.cones:
        pool = _candidate_pool(data, cone)
        found = None
        for combo in itertools.combinations(range(len(pool)), r):
            basis = [pool[i] for i in combo]
            if _span_dim(basis) != r:
                continue
            if _splits(data, cone, basis):
                found = basis
                break
        if found is None:
            return CompatibilityResult(False, result.decompositions, cone)
        rays = fan.ray_matrix(cone)
        pieces: dict[IntVector, list] = {}
        for v in found:
            w = tuple(_weight(data, k, v) for k in cone)
            if linalg.integer_solve(rays, w) is None:
                return CompatibilityResult(False, result.decompositions, cone)
            pieces.setdefault(w, []).append(v)
        decomposition = sorted((w, tuple(vs)) for w, vs in pieces.items())
        if not _condition_holds(data, cone, decomposition):
            return CompatibilityResult(False, result.decompositions, cone)
        result.decompositions[tuple(cone)] = decomposition
    return result


def _condition_holds(data, cone, decomposition) -> bool:
    """``E^rho(i) = sum of E_[u] with <u, v_rho> >= i`` for every ray and ``i``."""
    for pos, k in enumerate(cone):
        idx = data.filtrations[k].indices
        for i in range(idx[0] - 1, idx[-1] + 2):
            target = data.filtrations[k].subspace(i)
            summed = [v for w, vs in decomposition if w[pos] >= i for v in vs]
            if _span_dim(summed) != _span_dim(target) or _span_dim(list(summed) + list(target)) != _span_dim(target):
                return False
    return True


# ---------------------------------------------------------------- stability


class Stability(str, Enum):
    STABLE = "stable"
    STRICTLY_SEMISTABLE = "strictly-semistable"
    UNSTABLE = "unstable"


def weighted_degree(data: KlyachkoBundleData, volumes: Sequence[int], F: Sequence[Sequence]) -> Fraction:
    """``(1/dim F) * sum_{i, rho} i * f^[rho](i) * vol(Q^rho)``."""
    prof = subspace_profile(data, F)
    if prof.dim == 0:
        raise BundleError("weighted degree of the zero subspace")
    total = sum(i * f * vol for jumps, vol in zip(prof.jumps, volumes) for i, f in jumps.items())
    return Fraction(total, prof.dim)


@dataclass
class StabilityVerdict:
    kind: Stability
    slope: Fraction
    witnesses: list[tuple[tuple, Fraction]]
    candidates: int

    def to_dict(self) -> dict:
        return {
            "verdict": self.kind.value,
            "slope": fmt_q(self.slope),
            "candidates": self.candidates,
            "witnesses": [
                {"basis": [list(linalg.clear_denominators(v)) for v in basis], "degree": fmt_q(d)}
                for basis, d in self.witnesses
            ],
        }


def _line_generators(data: KlyachkoBundleData) -> list[tuple]:
    gens = []
    for k, f in enumerate(data.filtrations):
        proper = [b for _, b in f.steps if 0 < _span_dim(b) < data.rank]
        if any(_span_dim(b) != 1 for b in proper):
            raise BundleError("general filtration shapes unsupported")
        gens.extend(b[0] for b in proper)
    return gens


def stability_verdict(data: KlyachkoBundleData, volumes: Sequence[int]) -> StabilityVerdict:
    """Compare every candidate subspace against the whole space.

    Candidates are the proper spans of subsets of the lines occurring in the
    filtrations; this is exhaustive when every proper step is a line.
    """
    if len(volumes) != len(data.filtrations):
        raise BundleError("one volume per ray is required")
    r = data.rank
    slope = weighted_degree(data, volumes, _full(r))
    gens = _line_generators(data)
    spans: dict[tuple, tuple] = {}
    for size in range(1, len(gens) + 1):
        for subset in itertools.combinations(gens, size):
            S = LinearSubspace.spanned_by(subset, r)
            if S.dim < r and S.key() not in spans:
                spans[S.key()] = subset
    best = None
    scored = []
    for basis in spans.values():
        d = weighted_degree(data, volumes, basis)
        scored.append((basis, d))
        best = d if best is None or d > best else best
    if best is None or best < slope:
        return StabilityVerdict(Stability.STABLE, slope, [], len(scored))
    kind = Stability.UNSTABLE if best > slope else Stability.STRICTLY_SEMISTABLE
    status_ok = (lambda d: d > slope) if kind is Stability.UNSTABLE else (lambda d: d == slope)
    return StabilityVerdict(kind, slope, [(b, d) for b, d in scored if status_ok(d)], len(scored))


# ---------------------------------------------------------------- dump format


def _q(x) -> Any:
    return x if isinstance(x, int) else fmt_q(x)


def bundle_document(fan: Fan, data: KlyachkoBundleData) -> dict:
    return {
        "rank": data.rank,
        "filtrations": [
            {
                "ray": list(ray),
                "steps": [{"i": i, "basis": [[_q(x) for x in v] for v in b]} for i, b in f.steps],
            }
            for ray, f in zip(fan.rays, data.filtrations)
        ],
    }


def parse_bundle_document(doc: dict) -> tuple[list[IntVector], KlyachkoBundleData]:
    rays = []
    filts = []
    for entry in doc["filtrations"]:
        rays.append(tuple(entry["ray"]))
        steps = []
        for st in entry["steps"]:
            basis = tuple(tuple(x if isinstance(x, int) else Fraction(x) for x in v) for v in st["basis"])
            steps.append((int(st["i"]), basis))
        filts.append(Filtration(tuple(steps)))
    return rays, KlyachkoBundleData(int(doc["rank"]), tuple(filts))


def polytope_bundle(P: LatticePolytope) -> tuple[Fan, KlyachkoBundleData, list[int]]:
    """Normal fan, canonical extension and facet volumes in ray order."""
    try:
        fan = normal_fan(P)
    except BundleError as exc:
        raise BundleError("canonical extension requires smooth fan") from exc
    data = canonical_extension(fan)
    return fan, data, [F.lattice_volume for F in facets(P)]


__all__ = [
    "BundleError",
    "ConeFan",
    "CompatibilityResult",
    "Fan",
    "Filtration",
    "KlyachkoBundleData",
    "PolytopeError",
    "Stability",
    "StabilityVerdict",
    "SubspaceProfile",
    "bundle_document",
    "canonical_extension",
    "compatibility_check",
    "cone_fan",
    "normal_fan",
    "parse_bundle_document",
    "polytope_bundle",
    "stability_verdict",
    "subspace_profile",
    "weighted_degree",
]
