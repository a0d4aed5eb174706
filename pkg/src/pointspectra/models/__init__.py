"""Point-process families: spectra, pair correlations, derivatives and simulators."""
from .families import (
    FAMILIES,
    GDPP,
    HawkesExp,
    LGCPExp,
    Matern,
    Poisson,
    SpectralModel,
    Thomas,
    make_model,
    parse_model,
)
from .simulate import simulate

__all__ = [
    "FAMILIES",
    "GDPP",
    "HawkesExp",
    "LGCPExp",
    "Matern",
    "Poisson",
    "SpectralModel",
    "Thomas",
    "make_model",
    "parse_model",
    "simulate",
]
