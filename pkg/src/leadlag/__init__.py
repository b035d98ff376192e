"""Lead-lag estimation between non-synchronously observed fractional processes.

The package simulates pairs of correlated fractional Brownian motions, builds
lead-lag price models on top of them, samples the latent paths under
synchronous or Poisson observation schemes, and estimates the time shift
between the two components by maximizing a shifted Hayashi-Yoshida
correlation contrast over a finite grid.
"""

from .errors import DomainError, LeadLagError, NumericsError, StructuralError
from .estimator import ContrastCurve, EstimateResult, contrast_curve, estimate_leadlag, hy_contrast
from .fbm import (
    CorrelatedFbmSpec,
    DriverGrid,
    GaussianPathPair,
    HurstParam,
    cross_covariance,
    fbm_covariance,
    normalization_constant,
    simulate_fbm_pair,
    volterra_kernel,
)
from .model import (
    DriftSpec,
    LatentPair,
    LeadLagModel,
    simulate_latent_pair,
    simulate_sde_euler,
)
from .rng import seed_fingerprint, seed_sequence
from .sampling import (
    Diagnostics,
    GridSpec,
    ObservationSet,
    SamplingScheme,
    build_grid,
    diagnostics,
    generate_times,
    observe,
)

__all__ = [
    "LeadLagError",
    "DomainError",
    "StructuralError",
    "NumericsError",
    "HurstParam",
    "CorrelatedFbmSpec",
    "DriverGrid",
    "GaussianPathPair",
    "normalization_constant",
    "volterra_kernel",
    "fbm_covariance",
    "cross_covariance",
    "simulate_fbm_pair",
    "DriftSpec",
    "LeadLagModel",
    "LatentPair",
    "simulate_latent_pair",
    "simulate_sde_euler",
    "SamplingScheme",
    "ObservationSet",
    "Diagnostics",
    "GridSpec",
    "generate_times",
    "observe",
    "diagnostics",
    "build_grid",
    "ContrastCurve",
    "EstimateResult",
    "hy_contrast",
    "contrast_curve",
    "estimate_leadlag",
    "seed_sequence",
    "seed_fingerprint",
]
