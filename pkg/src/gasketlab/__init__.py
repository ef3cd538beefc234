"""gasketlab: exact tools for triangular gasket IFS, their touching-
structure automata, induced pseudo-metrics, and equivalence certificates."""

__version__ = "0.1.0"

from .automaton import (
    ABSENT_ALPHA,
    ABSENT_BETA,
    ABSENT_GAMMA,
    Role,
    State,
    TriangleAutomaton,
    check_gamma_isolated,
    delta,
    equivalent,
    is_gamma_isolated,
    itinerary,
    pseudo_metric_audit,
    rho,
    surviving_time,
    validate_triangle_gasket,
)
from .classify import (
    BIHOLDER_HOMEOMORPHIC,
    INCONCLUSIVE,
    LIPSCHITZ,
    BlockProfile,
    ChainReport,
    HolderParams,
    Verdict,
    biholder_audit,
    block_profile,
    classify_pair,
    equivalence_chain,
    final_automaton,
    holder_params,
    isometry_symbol_map,
    transport_audit,
)
from .geometry import (
    Contact,
    CornerAssign,
    FamilyReport,
    GasketSpec,
    ObliquePoint,
    SeparationBounds,
    Triangle,
    component_audit,
    contacts,
    corner_symbols,
    family_check,
    geometry_vs_automaton_audit,
    horizontal_blocks,
    pi_point,
    render_svg,
    separation_constants,
    topology_automaton,
    validate_spec,
)
from .reports import FormatError, GasketlabError, Report, ScopeError, Violation
from .simplify import (
    SimplStep,
    final_simplification,
    one_step,
    select_terminal_edge,
    step_invariant_audit,
)
from .transducer import (
    Decomposition,
    DecompParams,
    Segment,
    SegmentKind,
    derived_transducer,
    distortion_audit,
    m_decompose,
    map_backward,
    map_forward,
    mp_decompose,
    run_transducer,
    segment_map,
    segment_unmap,
    transducer_step,
)
from .words import ECSeq, INFINITY, canonicalize, common_prefix_len, parse_seq
