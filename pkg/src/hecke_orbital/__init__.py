"""Exact orbital integrals of spherical Hecke functions on GL2 and GL3.

The closed formulas live in :mod:`hecke_orbital.closed_form`, the invariants
they consume in :mod:`hecke_orbital.profile`, and the brute-force counting
checks in :mod:`hecke_orbital.oracle`.
"""
from .closed_form import (
    GEOMETRIC,
    QUOTIENT,
    LatticeType,
    MeasureKind,
    admissible_types,
    conversion_factor,
    corner_formula,
    derive_case3,
    partial_type_formula,
    reduce_type,
    so_hecke,
    so_hecke_geometric,
    so_hecke_quotient,
    so_mn,
    so_per_lattice,
    stratification_sum,
)
from .errors import OrbitalError
from .exact_base import LAURENT, PADIC, CharPoly, FieldSpec
from .profile import (
    RAMIFIED,
    UNRAMIFIED,
    GammaProfile,
    build_profile,
    profile_grid,
    serre_crosscheck,
    serre_invariant,
    symbolic_profile,
)
from .qvalue import QValue

__version__ = "0.1.0"

__all__ = [
    "CharPoly", "FieldSpec", "GammaProfile", "LatticeType", "MeasureKind", "OrbitalError", "QValue",
    "GEOMETRIC", "QUOTIENT", "LAURENT", "PADIC", "RAMIFIED", "UNRAMIFIED",
    "admissible_types", "build_profile", "conversion_factor", "corner_formula",
    "derive_case3", "partial_type_formula", "profile_grid", "reduce_type",
    "serre_crosscheck", "serre_invariant", "so_hecke", "so_hecke_geometric",
    "so_hecke_quotient", "so_mn", "so_per_lattice", "stratification_sum",
    "symbolic_profile",
]
