"""Robust phase retrieval under heavy-tailed noise and adversarial
corruption: filtering mean/PCA estimators, truncation-based robust
spectral initialization (zero-mean and symmetrized unknown-mean variants),
robust gradient descent, stability probes, and analytic oracles."""

from .domain import (
    ConfigurationError,
    CorruptionPlan,
    DimensionError,
    DirectionPlant,
    GDConfig,
    LargeOutlier,
    MeanShift,
    MeasurementSet,
    NoCorruption,
    NoiseKind,
    NoiseModel,
    Signal,
    SignAlignedResponse,
    SizeError,
    SpectralEstimate,
    StabilityReport,
    SymmetrizedSet,
    TruncationParams,
    dist,
)
from .datagen import BatchSplit, corrupt, generate_clean, split_batches, symmetrize
from .robust_mean import RobustMeanResult, robust_mean_1d, robust_mean_nd
from .robust_pca import PcaBackend, PcaResult, power_iteration, robust_top_eigen, stability_top_eigen
from .spectral_init import InitConfig, estimate_norm, spectral_initialize, truncate
from .blind_deconv import BdInitConfig, bd_spectral_initialize, estimate_second_moment
from .robust_gd import (
    GdTrace,
    default_step_size,
    robust_descend,
    sample_gradient_bd,
    sample_gradient_pr,
)
from .stability import estimate_gamma, question1_sweep
from .pipeline import PipelineReport, naive_solve_pr, solve_bd, solve_pr

__version__ = "0.1.0"
