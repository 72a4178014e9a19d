"""Exact certificates for subspace concentration of lattice polytopes.

Modules:
    linalg: integer and rational linear algebra (HNF, SNF, subspaces).
    polytope: lattice polytopes, facets, volumes, barycenters, predicates.
    concentration: affine, linear and lifted concentration checks plus oracle.
    bundle: fans, Klyachko filtrations of the canonical extension, stability.
    corpus: curated entries and the reflexive polygon enumerator.
    cli: the ``polycert`` command.
"""

from __future__ import annotations

from .concentration import Mode, Overall, Status, brute_force_oracle, check, check_affine, check_lifted, check_linear
from .polytope import (
    LatticePolytope,
    PolytopeError,
    barycenter,
    facets,
    is_centered,
    is_reflexive,
    is_smooth,
    load_polytope,
    normalized_volume,
)

__version__ = "0.1.0"

__all__ = [
    "LatticePolytope",
    "Mode",
    "Overall",
    "PolytopeError",
    "Status",
    "barycenter",
    "brute_force_oracle",
    "check",
    "check_affine",
    "check_lifted",
    "check_linear",
    "facets",
    "is_centered",
    "is_reflexive",
    "is_smooth",
    "load_polytope",
    "normalized_volume",
]
