"""Complete elliptic integral K(r), its sharp closed-form bounds, and tools to check them."""

from .bounds import (
    BoundConstants,
    BoundFamily,
    constants,
    f1_direct,
    f1_series,
    g1_direct,
    g1_series,
    new_lower,
    new_upper,
    upper_ar,
    upper_avv,
    wclc_bounds,
)
from .precision import (
    DEFAULT_CONTEXT,
    HARDWARE_CONTEXT,
    AssemblyMismatch,
    ConvergenceTooSlow,
    DomainError,
    EllipkError,
    PrecisionContext,
    PrecisionLoss,
    ToleranceNotMet,
)
from .special_fn import (
    Modulus,
    ellipk,
    ellipk_agm,
    ellipk_quadrature,
    ellipk_series,
    gamma_half_ratio,
    log_one_minus_r_squared,
    pochhammer,
)

__version__ = "0.1.0"
