"""Fractal invariants of unbounded sets of finite measure, computed at infinity.

Tube functions, box dimensions and Minkowski contents at infinity, distance
zeta functions at infinity with their poles and residues, and the geometric
inversion that carries neighbourhoods of infinity to neighbourhoods of 0.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .cplxdim import (
    PoleReport,
    WindowSpec,
    count_window,
    find_poles,
    principal_dimensions,
    residue_at,
    residue_content_check,
)
from .errors import (
    AccumulationBoundaryError,
    ConvergenceWarning,
    DepthExhaustedError,
    DomainError,
    PoleError,
    RegionError,
    UnsupportedError,
    ZetaInfError,
)
from .inversion import (
    InvertedDrumIntegral,
    invert_point,
    inversion_identity_check,
    inversion_jacobian_det,
    inverted_zeta_mc,
)
from .minkowski import (
    DimensionEstimate,
    content_at_exponent,
    estimate_dimension,
    measurability_diagnostic,
)
from .regions import (
    CantorDrum,
    ExpSubgraph,
    Generic,
    IntervalChain,
    Norm,
    PowerSubgraph,
    StackedPower,
    contains,
    contains_many,
    load_region,
    stacking_offsets,
    total_measure,
)
from .tube import Grid, TubeSample, TubeScan, tube_scan, tube_volume_analytic, tube_volume_mc
from .zeta import (
    ZetaEvaluator,
    abscissa_check,
    zeta_closed_form,
    zeta_numeric,
    zeta_T_shift_check,
)

__all__ = [
    "BACKEND",
    "AccumulationBoundaryError", "ConvergenceWarning", "DepthExhaustedError", "DomainError",
    "PoleError", "RegionError", "UnsupportedError", "ZetaInfError",
    "CantorDrum", "ExpSubgraph", "Generic", "IntervalChain", "Norm", "PowerSubgraph",
    "StackedPower", "contains", "contains_many", "load_region", "stacking_offsets",
    "total_measure",
    "Grid", "TubeSample", "TubeScan", "tube_scan", "tube_volume_analytic", "tube_volume_mc",
    "DimensionEstimate", "content_at_exponent", "estimate_dimension",
    "measurability_diagnostic",
    "ZetaEvaluator", "abscissa_check", "zeta_closed_form", "zeta_numeric", "zeta_T_shift_check",
    "PoleReport", "WindowSpec", "count_window", "find_poles", "principal_dimensions",
    "residue_at", "residue_content_check",
    "InvertedDrumIntegral", "invert_point", "inversion_identity_check",
    "inversion_jacobian_det", "inverted_zeta_mc",
]
