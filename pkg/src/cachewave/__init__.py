"""cachewave: successful-transmission probability of a two-cache coded
delivery scheme over Rayleigh fading — analytic evaluators, a Monte Carlo
oracle, and allocation optimizers.

The quadrature and trial-counting kernels run on a compiled Cython
backend when the extension is importable, falling back to a NumPy
implementation otherwise; see :data:`backend_name` and the
``CACHEWAVE_BACKEND`` environment variable.
"""
from ._backend import available_backends, backend_name
from .channel import ChannelParams, GainDraw, gain_stream, power_from_snr_db
from .mc import McConfig, McEstimate, UnknownFactor, estimate_factor, estimate_stp
from .opt import GaParams, OptResult, SearchSpace, optimize_genetic, optimize_grid
from .quadrature import IntegralResult, NonConvergence, integrate
from .stp import (
    DegenerateSplit,
    Method,
    PowerSplit,
    QuadratureFailure,
    RateConfig,
    StpReport,
    evaluate,
    stp_method1,
    stp_method2,
    stp_method3,
    stp_method4,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "available_backends",
    "backend_name",
    "ChannelParams",
    "GainDraw",
    "gain_stream",
    "power_from_snr_db",
    "McConfig",
    "McEstimate",
    "UnknownFactor",
    "estimate_factor",
    "estimate_stp",
    "GaParams",
    "OptResult",
    "SearchSpace",
    "optimize_genetic",
    "optimize_grid",
    "IntegralResult",
    "NonConvergence",
    "integrate",
    "DegenerateSplit",
    "Method",
    "PowerSplit",
    "QuadratureFailure",
    "RateConfig",
    "StpReport",
    "evaluate",
    "stp_method1",
    "stp_method2",
    "stp_method3",
    "stp_method4",
]
