"""Approximate and exact counting of integer solutions of linear constraints.

The estimator samples lattice points with a rejection-filtered hit-and-run
walk over a facet-shifted, affinely rounded body, telescopes the count
through a halving chain of polytopes, and stops when a grouped-variance
criterion certifies the requested (epsilon, delta) accuracy. An exact
enumeration oracle backs tests and experiments.
"""

from .chain import Chain, ChainLevel, disturb, find_threshold, subdivision
from .errors import (
    DegenerateBodyError,
    DimensionMismatchError,
    InfeasibleError,
    OracleLimitError,
    ParseError,
    PolycountError,
    ResourceCapError,
    UnboundedError,
)
from .estimator import (
    CountEstimate,
    RatioStats,
    RunConfig,
    default_s,
    estimate,
    ratio_stats,
    stopping_satisfied,
)
from .oracle import OracleResult, exact_count
from .polytope import (
    Halfspace,
    Polytope,
    contains_lattice,
    contains_real,
    load_constraints,
    parse_polytope,
    round_real,
    serialize_polytope,
)
from .rng import Rng
from .rounding import AffineMap, apply, apply_inv, round_body, transform_polytope
from .sampler import (
    SampleSet,
    ShiftedPolytope,
    hit_and_run_step,
    sample_lattice,
    shift_facets,
    walk,
)
from .simplex import (
    LpResult,
    Rectangle,
    chebyshev_center,
    get_rect,
    maximize,
    rect_lattice_count,
)

__version__ = "0.1.0"
