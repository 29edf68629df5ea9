"""Slope combinatorics of abelian varieties over finite fields.

Builds Galois permutation models of CM fields, derives Frobenius slopes
from CM-types, classifies Tate / Lefschetz / exotic orbit summands,
computes endomorphism-algebra invariants, and forges number-field
certificates with prescribed local behavior.
"""

from .algebra import (
    BigRational,
    NotSquarefreeError,
    count_distinct_roots_mod,
    crt_poly,
    factor_degree_pattern,
    sturm_real_roots,
)
from .galois import (
    BlockPartition,
    CMGaloisModel,
    CapExceededError,
    PermGroup,
    blocks_of_subgroup,
    build_group,
    cm_product_group,
    index2_overgroups,
    orbit_of_subset,
)
from .slopes import (
    SlopeVector,
    fix_of_slope,
    frobenius_rank,
    is_p_potentially_in,
    minimal_field_index,
    slopes_from_cm_type,
)
from .cmtypes import CMType, PlacePrescription, enumerate_cm_types, hodge_type, is_balanced
from .classifier import (
    ClassifierReport,
    EndAlgebraReport,
    MotiveOrbit,
    classify_orbits,
    honda_tate_endomorphism,
    is_tate_subset,
    predicted_signature,
    structure_check,
    verify_lemma_suite,
    weil_tate_submotives,
)
from .forge import (
    ForgedField,
    HypothesisError,
    Scenario,
    certify_galois_sg,
    forge_quadratic,
    forge_totally_real,
    parse_scenario,
    scenario_main,
    scenario_ramified,
    scenario_split,
    serialize_scenario,
)

__version__ = "0.1.0"
