"""Global permutation entropy: ordinal-pattern profiles over all index tuples.

Order-k profiles (k <= 4) are recovered in near-linear time from corner-tree
counts; orders 5 and 6 use an exact enumerating counter.
"""

__version__ = "0.1.0"

from .analysis import (
    EntropySeries,
    HalfPeriodEstimate,
    SweepCurve,
    default_sweep_range,
    estimate_half_period,
    feasible_delays,
    window_size_sweep,
    windowed_entropy,
)
from .cornertree import (
    Basis,
    CoefficientVector,
    CornerTree,
    coefficient_vector,
    count_tree,
    enumerate_corner_trees,
    independent_trees,
    parse_tree,
    select_basis,
)
from .entropy import EntropyValue, ctpe, gpe, pe, pe_avg, shannon
from .errors import (
    GPEError,
    InsufficientDataError,
    InternalConsistencyError,
    ResourceGuardError,
    ValidationError,
)
from .patterns import Profile, decode, encode, oracle_profile
from .profile import (
    SampleSizeWarning,
    count_3214,
    fallback_profile,
    fast_profile,
    profile,
    window_profiles,
)
from .series import WindowSpec, as_series, rank_series, read_series_csv, sliding_windows

__all__ = [
    "__version__",
    "EntropySeries", "HalfPeriodEstimate", "SweepCurve", "default_sweep_range",
    "estimate_half_period", "feasible_delays", "window_size_sweep", "windowed_entropy",
    "Basis", "CoefficientVector", "CornerTree", "coefficient_vector", "count_tree",
    "enumerate_corner_trees", "independent_trees", "parse_tree", "select_basis",
    "EntropyValue", "ctpe", "gpe", "pe", "pe_avg", "shannon",
    "GPEError", "InsufficientDataError", "InternalConsistencyError", "ResourceGuardError",
    "ValidationError",
    "Profile", "decode", "encode", "oracle_profile",
    "SampleSizeWarning", "count_3214", "fallback_profile", "fast_profile", "profile",
    "window_profiles",
    "WindowSpec", "as_series", "rank_series", "read_series_csv", "sliding_windows",
]
