"""Six-vertex model with a reflecting end.

Exact partition functions and boundary correlations at small size,
high-precision determinant evaluation, the arctic curve at the free-fermion
point via the tangent method, and a Monte Carlo sampler that confirms the
curve empirically.
"""

from .params import (
    SpectralParams,
    WeightSet,
    build_weights,
    special_point,
    OutOfRegimeError,
    CapacityError,
)
from .lattice import LatticeState, PathPicture, validate_state, state_weight, to_paths, from_paths
from .enumeration import (
    enumerate_Z,
    enumerate_states,
    enumerate_correlations,
    evaluate_h,
    enumerate_extended,
    CorrelationTable,
    ExtendedLattice,
)

__version__ = "0.1.0"
