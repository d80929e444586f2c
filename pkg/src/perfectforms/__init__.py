"""Exact Voronoi classification of perfect quadratic forms, with symmetry
exploiting facet enumeration (the adjacency decomposition method)."""

from .admethod import AdmCounters, AdmPolicy, Bank, GroupActionError, adm, expand_orbits
from .polycone import ConeH, ConeV, Face, dual_description, facets_with_incidence
from .qform import (
    QuadraticForm,
    arithmetical_minimum,
    catalog_form,
    eutaxy,
    hermite_power,
    is_eutactic,
    is_extreme,
    is_perfect,
    normalize_scale,
)
from .symmetry import PermutationGroup, arithmetic_equivalence, aut_group
from .voronoi import (
    ClassificationState,
    ClassifyLimits,
    FacetPolicy,
    classification_report,
    classify,
    facet_orbits,
    fingerprint,
    flip,
    perfect_domain,
)

__version__ = "0.1.0"

__all__ = [
    "AdmCounters", "AdmPolicy", "Bank", "GroupActionError", "adm", "expand_orbits",
    "ConeH", "ConeV", "Face", "dual_description", "facets_with_incidence",
    "QuadraticForm", "arithmetical_minimum", "catalog_form", "eutaxy", "hermite_power",
    "is_eutactic", "is_extreme", "is_perfect", "normalize_scale",
    "PermutationGroup", "arithmetic_equivalence", "aut_group",
    "ClassificationState", "ClassifyLimits", "FacetPolicy", "classification_report", "classify",
    "facet_orbits", "fingerprint", "flip", "perfect_domain",
]
