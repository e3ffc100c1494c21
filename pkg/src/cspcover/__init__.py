"""Exact tooling for covering complexity of constraint satisfaction.

The package measures how many assignments are needed so that every
constraint of a weighted instance is satisfied by at least one of them,
builds the long-code-style instances that transfer hardness from projection
games to that covering question, and carries the supporting exact analysis:
Fourier/orthogonal decompositions of tabulated functions, correlated product
spaces with their second singular value, and influence-based decodings.
"""

from .boolanalysis import (
    EfronSteinDecomposition,
    FourierTable,
    ProductDomain,
    TabulatedFunction,
    all_degree_d_influences,
    all_influences,
    block_image,
    character,
    compose_projection,
    degree_d_influence,
    efron_stein,
    fourier,
    influence,
    influence_variance,
    noise,
    pi_oplus,
    pi_tilde,
    wht,
)
from .correlated import (
    CommuteResult,
    CorrelatedSpace,
    InvarianceGap,
    MarkovOperator,
    blocks_left_domain,
    blocks_right_domain,
    commute_check,
    correlation_rho,
    invariance_gap,
    is_connected,
    markov_apply,
    markov_apply_blocks,
    pairwise_product_check,
    product_space,
)
from .csp import (
    Assignment,
    Constraint,
    CoverSet,
    CspInstance,
    apply_literal_shift,
    cover_to_coloring,
    covered_fraction,
    covering_number,
    covers_constraint,
    find_cover,
    max_independent_set,
    translate_assignment,
    trivial_odd_cover,
    weaken_predicate,
)
from .errors import (
    DEFAULT_BUDGET,
    Budget,
    BudgetExceededError,
    FormatError,
    PreconditionError,
)
from .labelcover import (
    Edge,
    LabelCoverInstance,
    Labeling,
    edge_satisfied,
    is_c_coverable,
    max_satisfiable,
    satisfied_fraction,
    smoothness_profile,
    synthesize,
)
from .predicate import (
    Predicate,
    add_tuples,
    all_tuples,
    cnf,
    constant_tuple,
    find_non_odd_witness,
    full,
    is_odd,
    is_shift_closed,
    lin,
    nae,
    shift,
    sub_tuples,
    translate_closure,
    translate_orbit,
)
from .reductions import (
    RejectionIdentityResult,
    T1DecodeResult,
    T1Params,
    T2DecodeResult,
    T2Params,
    T3DecodeResult,
    T3Params,
    binary_dictator_tables,
    decode_t1,
    decode_t2,
    decode_t3,
    generate_t1,
    generate_t2,
    generate_t3,
    rejection_identity_check,
    sample_t1,
    sample_t2,
    sample_t3,
    t1_column_support,
    t1_completeness_witness,
    t1_connect_atoms,
    t1_dictator_tables,
    t2_block_last_row_space,
    t2_block_space,
    t2_block_table,
    t2_completeness_witness,
    t3_completeness_witness,
    t3_delta_table,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
