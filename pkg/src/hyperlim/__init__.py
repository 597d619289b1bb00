"""Arbitrary-precision checks of hyperfactorial limits, closed forms and
zeta(3) = 4 pi^2 ln B."""

from .closed_forms import closed_form, e0_closed, e1_closed, e2_closed, e3_closed, e_closed
from .constants import bendersky_B, glaisher_A, hyperfactorial_exact, ln_hyperfactorial, normalized_remainder
from .exact_identities import IdentityResult, check_identity, wallis_partial
from .factored import FactoredRational
from .numerics import (
    DEFAULT_PRECISION,
    ConstantEstimate,
    ExtrapolationConfig,
    InvalidArgument,
    ResourceLimit,
    const_pi,
    richardson_extrapolate,
    zeta3_reference,
)
from .series_limits import EIndex, SeriesValue, e_limit, e_partial, recursion_residual

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PRECISION",
    "ConstantEstimate",
    "EIndex",
    "ExtrapolationConfig",
    "FactoredRational",
    "IdentityResult",
    "InvalidArgument",
    "ResourceLimit",
    "SeriesValue",
    "bendersky_B",
    "check_identity",
    "closed_form",
    "const_pi",
    "e0_closed",
    "e1_closed",
    "e2_closed",
    "e3_closed",
    "e_closed",
    "e_limit",
    "e_partial",
    "glaisher_A",
    "hyperfactorial_exact",
    "ln_hyperfactorial",
    "normalized_remainder",
    "recursion_residual",
    "richardson_extrapolate",
    "wallis_partial",
    "zeta3_reference",
]
