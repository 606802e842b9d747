"""Exact search and claim checking for traces of uniform families that avoid chains."""

from .canon import CanonicalFamily, UnsupportedError, canonical_form
from .engine import (
    SearchIncomplete,
    SearchOptions,
    SearchResult,
    TraceState,
    compute_u,
    compute_w,
    enumerate_extremal,
    lower_bound_construction,
    update_state,
)
from .model import export_linear_model
from .setfam import (
    ChainWitness,
    InvalidInputError,
    KFamily,
    Trace,
    find_chain_witness,
    has_almost_maximal_chain,
    has_maximal_chain,
    is_intersecting,
    is_u_admissible,
    is_w_admissible,
    mask_of,
    min_pairwise_intersection,
    relabel,
    small_ground_family,
    star_family,
    trace,
    w_formula,
)

__version__ = "0.1.0"
