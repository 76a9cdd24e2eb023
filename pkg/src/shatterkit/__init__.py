"""Shattered matchings, separability and related extremal set-system tools."""

from .counterexamples import (
    OddCounterexample,
    RSystem,
    build_odd_counterexample,
    f_ab_family,
    has_disjointly_representable,
    is_r_system_shattered,
    kr_trivial_bound,
    verify_conjecture_B,
)
from .errors import InvalidInput, NotDownwardClosed
from .family import (
    ElementSet,
    Family,
    complement,
    downward_closure,
    is_downward_closed,
    is_intersecting,
    is_maximal_intersecting_halfsize,
    parse_family,
    shatters,
    trace_family,
    vc_dim,
)
from .hypergraph import (
    GeneralizedTriangle,
    UniformHypergraph,
    balanced_partite_hypergraph,
    extract_separating_T,
    find_generalized_triangle,
    g_reference,
)
from .matchings import (
    Matching,
    Snake,
    dichotomy_check,
    enumerate_matchings,
    is_carved,
    is_shattered,
    max_shattered_size,
)
from .randommif import (
    GENERATOR_ID,
    RandomFamilySpec,
    RefutationCertificate,
    expected_shattered_count,
    monte_carlo_not_carved,
    not_carved_probability,
    random_mif,
    search_counterexample_A,
    shattered_probability,
)
from .separability import (
    SeparabilityBounds,
    SeparationPreorder,
    arrow_holds,
    chain_product_family,
    enumerate_monotone_families,
    is_t_separable,
    p_bounds,
    quotient_width,
    s_exact_small,
    separability_bounds,
    separates,
    separation_preorder,
    trace_criterion_T,
)

__version__ = "0.1.0"
