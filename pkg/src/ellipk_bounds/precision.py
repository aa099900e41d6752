"""Arithmetic contexts and the error hierarchy shared by every module.

A :class:`PrecisionContext` picks between hardware doubles (``mpmath.fp``)
and a private ``mpmath.MPContext`` carrying ``digits`` significant decimal
digits. Numerical code never touches the global ``mpmath.mp`` so that two
contexts of different precision can be used side by side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal

import mpmath

HARDWARE: Literal["hardware"] = "hardware"
EXTENDED: Literal["extended"] = "extended"


class EllipkError(Exception):
    """Base class for numerical failures raised by this package."""


class DomainError(EllipkError, ValueError):
    """Argument outside the domain of the requested operation."""


class ConvergenceTooSlow(EllipkError):
    """A series needed more terms than its configured cap."""


class ToleranceNotMet(EllipkError):
    """Adaptive quadrature exhausted its subdivision budget."""


class PrecisionLoss(EllipkError):
    """Cancellation consumed more than half of the working digits."""


class AssemblyMismatch(EllipkError):
    """Power-series heads that must cancel exactly did not."""


@dataclass(frozen=True)
class PrecisionContext:
    mode: Literal["hardware", "extended"] = EXTENDED
    digits: int = 50
    _math: Any = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.mode not in (HARDWARE, EXTENDED):
            raise ValueError(f"unknown precision mode {self.mode!r}")
        if self.mode == HARDWARE:
            object.__setattr__(self, "digits", 16)
            object.__setattr__(self, "_math", mpmath.fp)
            return
        if int(self.digits) != self.digits or self.digits < 16:
            raise ValueError(f"extended mode needs digits >= 16, got {self.digits}")
        ctx = mpmath.MPContext()
        ctx.dps = int(self.digits)
        object.__setattr__(self, "_math", ctx)

    @classmethod
    def hardware(cls) -> PrecisionContext:
        return cls(HARDWARE)

    @classmethod
    def extended(cls, digits: int = 50) -> PrecisionContext:
        return cls(EXTENDED, digits)

    @property
    def m(self) -> Any:
        """The mpmath context (``fp`` or a private ``MPContext``)."""
        return self._math

    @property
    def is_hardware(self) -> bool:
        return self.mode == HARDWARE

    @property
    def eps(self) -> Any:
        return self._math.eps

    def num(self, x: Any) -> Any:
        """Convert ``x`` into this context's number type.

        Strings are parsed at full precision, so ``"0.1"`` is exact to the
        working digits in extended mode.
        """
        if self.is_hardware:
            return float(x)
        return self._math.mpf(x)

    def to_float(self, x: Any) -> float:
        return float(x)

    def format(self, x: Any) -> str:
        """Serialize a value: shortest round-trip for doubles, fixed significant figures otherwise."""
        if self.is_hardware:
            return repr(float(x))
        return self._math.nstr(x, self.digits, strip_zeros=False)


DEFAULT_CONTEXT = PrecisionContext.extended(50)
HARDWARE_CONTEXT = PrecisionContext.hardware()
