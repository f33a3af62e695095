"""Capacity bounds for memoryless fading channels with imperfect receiver CSI."""

__version__ = "0.1.0"

from .bounds import (  # noqa: F401
    BoundValue,
    ChannelPoint,
    OptimizerConfig,
    asymptotic_gap_diag,
    coherent_capacity,
    layered_bound,
    medard_bound,
    optimize_layers,
    prelog_diag,
    rate_splitting_supremum,
    two_layer_bound,
    upper_bound_iupper,
)
from .estimator import (  # noqa: F401
    EstimateResult,
    ExpectationSpec,
    UnsupportedConfigError,
    expect_g,
    expect_gw,
    expect_w,
    mc_full_layers,
)
from .fading import (  # noqa: F401
    ConstantError,
    FadingModel,
    GaussianEstimateLaw,
    GeneralPSDError,
    InterpolationError,
    PredictionError,
    entropy_power,
    error_variance,
    psd_interpolation_variance,
    psd_prediction_variance,
    rectangular_psd,
    sample_estimate,
)
from .layering import Layering, map_monotone, powers, refine, uniform  # noqa: F401
from .special import EULER_GAMMA, LOG_MOMENT_K, exp_int_e1, expected_log_affine, g_diag, theta  # noqa: F401
