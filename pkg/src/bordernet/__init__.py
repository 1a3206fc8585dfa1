"""Border effects in interference-limited wireless networks.

Analytic connection probability, rate statistics, and success density
for finite deployment regions (circular sectors and rectangles), with
matching Monte Carlo estimators and a self-validation suite.

The command-line entry points live in ``bordernet.cli`` and the figure
renderers in ``bordernet._plots``; both are imported lazily by the
console script so that ``import bordernet`` stays light.
"""

__version__ = "0.1.0"

from .analytic import (
    InterferenceArg,
    ScenarioConfig,
    bpp_interference_factor,
    connection_probability,
    connection_probability_bpp,
    ergodic_rate,
    interference_integral_infinite,
    interference_integral_numeric,
    interference_integral_sector,
    laplace_argument,
    laplace_interference,
    optimal_density,
    rate_moment,
    success_density,
    success_density_closed,
)
from .channel import (
    PathLossParams,
    RadioParams,
    path_gain,
    path_gain_array,
    sample_fading,
    sample_fading_many,
    sinr,
)
from .errors import (
    ConvergenceError,
    DegenerateSinrError,
    InterferenceStormError,
    ParameterError,
    SingularityError,
    ValidationFailure,
)
from .geometry import (
    Domain,
    Point2,
    RectDomain,
    RngState,
    SectorDomain,
    distance,
    domain_area,
    sample_poisson_count,
    sample_uniform,
    sample_uniform_many,
)
from .montecarlo import (
    Estimate,
    HeatmapResult,
    SimConfig,
    estimate_connection,
    estimate_rate,
    estimate_success_density,
    outage_heatmap,
)
from .specfun import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    erfc,
    erfcx,
    hyp2f1_1b,
    integrate_finite,
    integrate_semiinfinite,
)
from .validation import CheckResult, ValidationReport, run_validation

__all__ = [
    "__version__",
    # errors
    "ParameterError", "SingularityError", "DegenerateSinrError",
    "InterferenceStormError", "ConvergenceError", "ValidationFailure",
    # special functions and quadrature
    "QuadratureSpec", "DEFAULT_QUADRATURE", "hyp2f1_1b", "erfc", "erfcx",
    "integrate_finite", "integrate_semiinfinite",
    # geometry
    "Point2", "SectorDomain", "RectDomain", "Domain", "RngState",
    "domain_area", "distance", "sample_uniform", "sample_uniform_many",
    "sample_poisson_count",
    # channel
    "PathLossParams", "RadioParams", "path_gain", "path_gain_array",
    "sample_fading", "sample_fading_many", "sinr",
    # analytic
    "ScenarioConfig", "InterferenceArg", "laplace_argument",
    "interference_integral_sector", "interference_integral_infinite",
    "interference_integral_numeric", "laplace_interference",
    "connection_probability", "bpp_interference_factor",
    "connection_probability_bpp", "rate_moment", "ergodic_rate",
    "success_density", "success_density_closed", "optimal_density",
    # monte carlo
    "SimConfig", "Estimate", "HeatmapResult", "estimate_connection",
    "estimate_rate", "estimate_success_density", "outage_heatmap",
    # validation
    "CheckResult", "ValidationReport", "run_validation",
]
