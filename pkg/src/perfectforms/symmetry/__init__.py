"""Group machinery: permutation groups, canonical labelings of weighted
graphs, vector-family isomorphisms and form automorphisms."""

from .canon import CanonicalLabeling, canonical_labeling
from .families import (
    CharacteristicGraph,
    RankDeficientFamilyError,
    RestrictedAutomorphisms,
    VectorFamily,
    canonical_key,
    characteristic_graph,
    restricted_automorphism_group,
    restricted_isomorphism,
)
from .forms import FormAutomorphisms, arithmetic_equivalence, aut_group, line_permutation
from .permgroup import (
    PermutationGroup,
    orbits_on_sets,
    set_stabilizer,
    set_transporter,
    split_orbit_under_subgroup,
)

__all__ = [
    "CanonicalLabeling", "canonical_labeling", "CharacteristicGraph", "RankDeficientFamilyError",
    "RestrictedAutomorphisms", "VectorFamily", "canonical_key", "characteristic_graph",
    "restricted_automorphism_group", "restricted_isomorphism", "FormAutomorphisms",
    "arithmetic_equivalence", "aut_group", "line_permutation", "PermutationGroup",
    "orbits_on_sets", "set_stabilizer", "set_transporter", "split_orbit_under_subgroup",
]
