"""Exact autocorrelation functions of the regular tetrahedron and octahedron,
their Monte-Carlo covariogram oracle, and small-angle scattering curves."""

__version__ = "0.1.0"

from .cf_calculus import (
    ConstraintRecord,
    ConstraintReport,
    cf_derivative,
    moment_integral,
    slope_at_zero,
    validate_constraints,
)
from .cf_core import (
    CF_CONSTANTS,
    CFConstants,
    HelperDomainError,
    PiecewiseCF,
    TabulatedCF,
    cf_for,
    cf_octahedron,
    cf_sphere,
    cf_tetrahedron,
    eval_helper,
)
from .geometry import (
    SolidKind,
    SolidSpec,
    contains,
    sample_point,
    sample_points,
    scale_to_unit_dmax,
    solid_metrics,
    vertices,
)
from .mc_oracle import CurvePoint, McEstimate, estimate_cf, estimate_rg2, tabulate_cf
from .scattering import (
    EstimationError,
    IntensityCurve,
    PointMixture,
    PoissonGamma,
    QuadratureSpec,
    intensity,
    intensity_curve,
    normalize_curve,
    oscillation_amplitude,
    oscillation_spacing,
    parse_distribution,
    point_mass,
    polydisperse_curve,
    polydisperse_intensity,
    porod_curve,
    window_mean,
)

__all__ = [name for name in dir() if not name.startswith("_")]
