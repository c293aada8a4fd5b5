"""Fractional Dehn twist coefficients and the modular invariants delta_i of
degenerating families of curves, computed exactly from monodromy data or from
decorated dual graphs of singular fibers."""
from .chains import (
    ChainAmbiguous,
    ChainNotFound,
    ChainReport,
    SearchCaps,
    chain_H,
    chain_report,
    chain_valencies,
    fdtc_from_chain,
    fdtc_from_screw,
    hj_expand,
    hj_valency,
    screw_number,
    semistable_node_count,
    synthesize_chain,
)
from .core import (
    ChainSeq,
    InvalidData,
    NegativeTwistChain,
    Rational,
    ValidationReport,
    Valency,
    format_rational,
    normalize_seq,
    parse_rational,
    remainder_sigma,
)
from .enumeration import EnumSpec, enumerate_chains, extremal_fdtc, random_monodromy
from .fiber import (
    FiberGraph,
    FiberReport,
    chain_type,
    delta_invariants,
    extract_chains,
    family_delta,
    fiber_genus,
    load_fiber,
    principal_components,
    validate_fiber,
)
from .monodromy import (
    AnnulusOrbit,
    MonodromyData,
    PeriodicPart,
    assemble_fiber,
    check_bounds,
    cut_curve_type,
    delta_from_map,
    fdtc_all,
    load_monodromy,
    lower_bound,
    piece_genus_rh,
    validate_monodromy,
    verify_main_identity,
)

__version__ = "0.1.0"
