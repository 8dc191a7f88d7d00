"""
Working precision and the tolerance-aware sign policy

Hardware doubles are used by default. When a sign decision lands inside the
tolerance band the caller escalates to mpmath software floats, doubling the
mantissa up to a cap, and the band shrinks with the added bits.
"""

import cmath
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Union

from mpmath.ctx_mp import MPContext

from bhconstruct.constants import ErrorMessage, Precision, SignVerdict
from bhconstruct.errors import InputError

logger = logging.getLogger(__name__)

Scalar = Union[float, "mpmath.mpf"]  # noqa: F821
ComplexScalar = Union[complex, "mpmath.mpc"]  # noqa: F821


def validate_bits(bits: int) -> int:
    """Accept 53 (hardware) or a software width in [64, MAX_BITS]"""
    if bits == Precision.HARDWARE_BITS or Precision.MIN_SOFTWARE_BITS <= bits <= Precision.MAX_BITS:
        return bits
    raise InputError(ErrorMessage.BAD_CONFIG.format(
        detail=f"precision_bits={bits} not in {{53}} or [64, {Precision.MAX_BITS}]"))


@dataclass(frozen=True)
class WorkingPrecision:
    """A floating-point context of a given mantissa width"""
    bits: int = Precision.HARDWARE_BITS

    def __post_init__(self) -> None:
        validate_bits(self.bits)

    @property
    def is_hardware(self) -> bool:
        """True when computing in IEEE doubles"""
        return self.bits == Precision.HARDWARE_BITS

    @cached_property
    def ctx(self) -> MPContext:
        """Private mpmath context (one per instance, so threads never share prec state)"""
        ctx = MPContext()
        ctx.prec = self.bits
        return ctx

    def real(self, value) -> Scalar:
        """Convert to a real scalar of this precision"""
        if self.is_hardware:
            return float(value)
        return self.ctx.mpf(value)

    def cplx(self, value) -> ComplexScalar:
        """Convert to a complex scalar of this precision"""
        if self.is_hardware:
            return complex(value)
        return self.ctx.mpc(value)

    def abs(self, value) -> Scalar:
        """Modulus as a real scalar of this precision"""
        if self.is_hardware:
            return abs(complex(value))
        return self.ctx.mpf(abs(value))

    def isfinite(self, value) -> bool:
        if self.is_hardware:
            return cmath.isfinite(complex(value))
        return bool(self.ctx.isfinite(value))

    def band(self, tol: float) -> float:
        """Relative tolerance scaled down by the bits added over hardware precision"""
        extra = self.bits - Precision.HARDWARE_BITS
        return tol * 2.0 ** (-extra) if extra > 0 else tol

    def escalate(self, max_bits: int = Precision.MAX_BITS) -> Optional["WorkingPrecision"]:
        """Next rung of the escalation ladder, or None at the cap"""
        if self.bits < Precision.FIRST_ESCALATION_BITS:
            nxt = Precision.FIRST_ESCALATION_BITS
        else:
            nxt = self.bits * 2
        if nxt > max_bits:
            return None
        return WorkingPrecision(nxt)


def escalation_ladder(start_bits: int = Precision.HARDWARE_BITS,
                      max_bits: int = Precision.MAX_BITS) -> Iterator[WorkingPrecision]:
    """Yield the working precisions tried for one sign decision, lowest first"""
    precision: Optional[WorkingPrecision] = WorkingPrecision(start_bits)
    while precision is not None:
        yield precision
        precision = precision.escalate(max_bits)


def classify_sign(value: Scalar, scale: float, tol: float,
                  precision: WorkingPrecision) -> SignVerdict:
    """
    Strict sign decision with an ambiguity band

    Args:
        value: Quantity whose sign is wanted
        scale: A-priori magnitude of the quantity
        tol: Relative tolerance at hardware precision
        precision: Precision the value was computed in

    Returns:
        POSITIVE above the band, NEGATIVE below it, AMBIGUOUS inside
    """
    band = precision.band(tol) * scale
    if value > band:
        return SignVerdict.POSITIVE
    if value < -band:
        return SignVerdict.NEGATIVE
    return SignVerdict.AMBIGUOUS


def classify_nonnegative(value: Scalar, scale: float, tol: float) -> SignVerdict:
    """Non-strict decision: accepted down to -tol*scale, never ambiguous"""
    if value >= -tol * scale:
        return SignVerdict.POSITIVE
    return SignVerdict.NEGATIVE
