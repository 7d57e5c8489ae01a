"""Active-contour segmentation of speckled images.

A locally statistical level-set model for multiplicative-Gamma-noise
imagery with four interchangeable solvers: explicit reaction-diffusion
evolution (rdls), split Bregman (sbrd), and two proximal fixed-point
schemes (fprd1, fprd2), plus a speckle/phantom simulator, quality metrics,
and a benchmark harness.
"""

from .errors import ConfigurationError, InvalidInputError, NumericFailureError
from .metrics import dice, pp_uniformity
from .model import (
    LocalMeans,
    ModelParams,
    data_force,
    delta_eps,
    edge_detector,
    heaviside_eps,
    local_means,
    region_means,
    scalar_force,
    weighted_curvature,
)
from .presets import PHANTOM_SUITE, phantom_suite_config
from .solvers import (
    ALGORITHMS,
    BregmanState,
    SegmentationResult,
    SolverConfig,
    default_config,
    run,
    run_fprd1,
    run_fprd2,
    run_rdls,
    run_sbrd,
    shrink,
    threshold_mask,
)
from .speckle import GEOMETRIES, Phantom, SpeckleSpec, gamma_speckle, make_phantom

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "BregmanState",
    "ConfigurationError",
    "GEOMETRIES",
    "InvalidInputError",
    "LocalMeans",
    "ModelParams",
    "NumericFailureError",
    "PHANTOM_SUITE",
    "Phantom",
    "SegmentationResult",
    "SolverConfig",
    "SpeckleSpec",
    "data_force",
    "default_config",
    "delta_eps",
    "dice",
    "edge_detector",
    "gamma_speckle",
    "heaviside_eps",
    "local_means",
    "make_phantom",
    "phantom_suite_config",
    "pp_uniformity",
    "region_means",
    "run",
    "run_fprd1",
    "run_fprd2",
    "run_rdls",
    "run_sbrd",
    "scalar_force",
    "shrink",
    "threshold_mask",
    "weighted_curvature",
]
