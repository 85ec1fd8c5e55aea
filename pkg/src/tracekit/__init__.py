"""Numerical verification toolkit for weight-k trace formulas and zeta
functions on complex hyperbolic 2-space."""

from .common import TruncationConfig, VerificationReport
from .operators import Weight, as_weight
from .spectrum import PrimitivePair, SpectrumModel, load_spectrum
from .transforms import RationalTestFunction, kernel_chain, rational_pair
from .zeta import WParams

__all__ = [
    "PrimitivePair",
    "RationalTestFunction",
    "SpectrumModel",
    "TruncationConfig",
    "VerificationReport",
    "WParams",
    "Weight",
    "as_weight",
    "kernel_chain",
    "load_spectrum",
    "rational_pair",
]

__version__ = "0.1.0"
