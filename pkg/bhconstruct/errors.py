"""
Exception hierarchy for bhconstruct

Library code raises these; only the CLI layer turns them into exit codes.
"""

from typing import Any, Optional

from bhconstruct.constants import ErrorMessage


class BHError(Exception):
    """Base class for all bhconstruct errors"""


class InputError(BHError):
    """Errors caused by the caller's input (CLI exit code 2)"""


class ParseError(InputError):
    """Spectrum or coefficient text could not be parsed"""

    def __init__(self, token: str, position: Any):
        self.token = token
        self.position = position
        super().__init__(ErrorMessage.PARSE.format(token=token, position=position))


class ConjugateClosureViolation(InputError):
    """A non-real value has no conjugate partner"""

    def __init__(self, value: complex):
        self.value = value
        super().__init__(ErrorMessage.CONJUGATE_CLOSURE.format(value=value))


class NoPerronElement(InputError):
    """No real nonnegative entry attains the maximum modulus"""

    def __init__(self, modulus: float):
        self.modulus = modulus
        super().__init__(ErrorMessage.NO_PERRON.format(modulus=modulus))


class DimensionTooSmall(InputError):
    """Requested matrix dimension below what the operation needs"""

    def __init__(self, dim: int, need: str):
        self.dim = dim
        super().__init__(ErrorMessage.DIMENSION_TOO_SMALL.format(dim=dim, need=need))


class DegreeMismatch(InputError):
    """Two polynomials of different degree were compared"""

    def __init__(self, left: int, right: int):
        super().__init__(ErrorMessage.DEGREE_MISMATCH.format(left=left, right=right))


class LengthMismatch(InputError):
    """Two root lists of different length were matched"""

    def __init__(self, left: int, right: int):
        super().__init__(ErrorMessage.LENGTH_MISMATCH.format(left=left, right=right))


class StrictDominanceRequired(BHError):
    """The Perron root does not strictly dominate the other moduli"""

    def __init__(self, perron: float, lambda0: float):
        self.perron = perron
        self.lambda0 = lambda0
        super().__init__(ErrorMessage.STRICT_DOMINANCE.format(perron=perron, lambda0=lambda0))


class HypothesesNotSatisfied(BHError):
    """Power-sum hypotheses fail"""

    def __init__(self, detail: str):
        super().__init__(ErrorMessage.HYPOTHESES.format(detail=detail))


class OverflowAtIndex(BHError):
    """A power-sum recurrence left the representable range"""

    def __init__(self, index: int):
        self.index = index
        super().__init__(ErrorMessage.OVERFLOW_AT_INDEX.format(index=index))


class NoConvergence(BHError):
    """Root iteration did not reach the residual tolerance"""

    def __init__(self, iterations: int):
        self.iterations = iterations
        super().__init__(ErrorMessage.NO_CONVERGENCE.format(iterations=iterations))


class NegativeEntry(BHError):
    """A pattern entry fails the sign policy"""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(ErrorMessage.NEGATIVE_ENTRY.format(index=index, value=value))


class VerificationFailed(BHError):
    """An assembled matrix does not reproduce the requested spectrum"""

    def __init__(self, check: str, residual: float):
        self.check = check
        self.residual = residual
        super().__init__(ErrorMessage.VERIFICATION_FAILED.format(check=check, residual=residual))


class IndeterminateSign(BHError):
    """A sign decision stayed inside the tolerance band at maximum precision"""

    def __init__(self, index: Optional[int], bits: int):
        self.index = index
        self.bits = bits
        super().__init__(ErrorMessage.INDETERMINATE.format(index=index, bits=bits))
