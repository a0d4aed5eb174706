"""Frequency-domain estimation and inference for spatial point processes."""
from .core import (
    DomainSpec,
    FrequencyGrid,
    PatternFormatError,
    PeriodogramField,
    PointPattern,
    Window,
    build_grid,
    read_field,
    read_pattern,
    write_field,
    write_pattern,
)
from .dft import centered_dft, dft, intensity_hat, periodogram, periodogram_grid
from .irdft import IntensityField, ir_dft, ir_periodogram, ir_psd, simulate_inhomogeneous_poisson
from .models import GDPP, HawkesExp, LGCPExp, Matern, Poisson, Thomas, make_model, parse_model, simulate
from .smoothing import ksde, smooth_field
from .specmean import spectral_mean_estimate, spectral_mean_true
from .taper import Taper, bias_factor, fejer
from .variance import SubsampleConfig, subsample_variance, whittle_ci
from .whittle import OptimizerConfig, best_fit_oracle, fit, fit_reduced_tcp, whittle_objective

__version__ = "0.1.0"

__all__ = [
    "DomainSpec", "FrequencyGrid", "PatternFormatError", "PeriodogramField", "PointPattern", "Window",
    "build_grid", "read_field", "read_pattern", "write_field", "write_pattern",
    "centered_dft", "dft", "intensity_hat", "periodogram", "periodogram_grid",
    "IntensityField", "ir_dft", "ir_periodogram", "ir_psd", "simulate_inhomogeneous_poisson",
    "GDPP", "HawkesExp", "LGCPExp", "Matern", "Poisson", "Thomas", "make_model", "parse_model", "simulate",
    "ksde", "smooth_field", "spectral_mean_estimate", "spectral_mean_true",
    "Taper", "bias_factor", "fejer",
    "SubsampleConfig", "subsample_variance", "whittle_ci",
    "OptimizerConfig", "best_fit_oracle", "fit", "fit_reduced_tcp", "whittle_objective",
]
