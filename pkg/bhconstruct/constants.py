"""
Centralized constants and enums for bhconstruct

This module provides a single source of truth for tolerances, precision
limits, exit codes, configuration keys and message templates used across
the package.
"""

import math
from enum import Enum, IntEnum
from typing import Final


# ============================================================================
# Numerical Tolerances
# ============================================================================

class Tolerance:
    """Default relative tolerances (all overridable through config)"""
    CONJ: Final = 1e-9    # conjugate pairing, relative to the largest modulus
    SIGN: Final = 1e-12   # power-sum sign decisions
    FEAS: Final = 1e-12   # x_k sign decisions
    ROOT: Final = 1e-12   # polynomial residual at returned roots
    MAX_ALLOWED: Final = 1e-3  # every tolerance must lie in (0, MAX_ALLOWED)


class Verification:
    """Verification thresholds for assembled matrices"""
    K_VERIFY: Final = 20
    CHARPOLY_MAX_DIM: Final = 64
    DET_MAX_DIM: Final = 12
    TRACE_TOL: Final = 1e-8
    CHARPOLY_TOL: Final = 1e-6
    DET_TOL: Final = 1e-9
    TRACE_BLOCK: Final = 256  # identity columns pushed through X together in trace checks


# ============================================================================
# Working Precision
# ============================================================================

class Precision:
    """Mantissa widths in bits"""
    HARDWARE_BITS: Final = 53   # IEEE double
    MIN_SOFTWARE_BITS: Final = 64
    FIRST_ESCALATION_BITS: Final = 128
    MAX_BITS: Final = 1024
    ORACLE_BITS: Final = 256    # independent high-precision checks
    CONSTANTS_BITS: Final = 128  # bound constants are always evaluated here


class RootFinder:
    """Simultaneous-iteration root finder limits"""
    MAX_ITERATIONS: Final = 200


# ============================================================================
# Bound
# ============================================================================

class BoundLimits:
    """Reporting limits for the explicit padding bound"""
    SATURATION_LOG10: Final = 18.0
    BEK_FACTOR: Final = 16.0 / (3.0 * math.sqrt(3.0))


# ============================================================================
# Search
# ============================================================================

class Search:
    """Minimal-dimension scan defaults"""
    N_MAX_SCAN: Final = 256
    WORKERS: Final = 4
    EXHAUSTIVE_MATCHING_MAX_N: Final = 10
    JLL_K_MAX: Final = 5
    JLL_M_MAX: Final = 5
    JLL_HORIZON: Final = 400
    POWER_SUM_HORIZON: Final = 100_000
    POWER_SUM_CHUNK: Final = 4096


# ============================================================================
# Sign Verdicts
# ============================================================================

class SignVerdict(str, Enum):
    """Outcome of a tolerance-aware sign decision"""
    POSITIVE = "positive"
    NEGATIVE = "negative"
    AMBIGUOUS = "ambiguous"

    @property
    def symbol(self) -> str:
        """Single-character form used in feasibility bitmaps"""
        return {
            self.POSITIVE: "1",
            self.NEGATIVE: "0",
            self.AMBIGUOUS: "?",
        }[self]


# ============================================================================
# CLI
# ============================================================================

class ExitCode(IntEnum):
    """Process exit codes of the command-line front end"""
    SUCCESS = 0
    INFEASIBLE = 1
    INPUT_ERROR = 2
    INDETERMINATE = 3


class Subcommand(str, Enum):
    """Subcommands understood by the CLI"""
    CHECK = "check"
    BOUND = "bound"
    REALIZE = "realize"
    SEARCH = "search"
    VERIFY = "verify"
    BEK = "bek"
    SWEEP = "sweep"


class SweepFamily(str, Enum):
    """Parametrized spectrum families for sweeps"""
    DISK = "disk"                  # (rho, e^{i theta}, e^{-i theta})
    TWO_POSITIVE = "two-positive"  # (3+t, 3-t, -2, -2, -2)

    @property
    def display_name(self) -> str:
        """Get human-readable family name"""
        return {
            self.DISK: "Perron root plus a unit-circle conjugate pair",
            self.TWO_POSITIVE: "Real list with two positive entries",
        }[self]


class ReportFormat:
    """Serialization settings for run reports"""
    FLOAT_DIGITS: Final = 17
    INDENT: Final = 2
    MAX_INLINE_DIM: Final = 16
    CSV_HEADER: Final = ("param", "first_feasible_N", "log10_paper_bound", "min_margin")


class EnvVar:
    """Environment variables read at startup"""
    PRECISION_BITS: Final = "BH_PRECISION_BITS"


# ============================================================================
# Reference Spectra
# ============================================================================

class ReferenceSpectra:
    """Frozen regression anchors"""
    DISK_RHO: Final = 1.1
    DISK_THETA: Final = math.pi / 10
    # Smallest N with the disk spectrum realizable by X_N, scanned at 256 bits
    DISK_FIRST_FEASIBLE_N: Final = 128


# ============================================================================
# Configuration Keys
# ============================================================================

class ConfigKeys:
    """Configuration key paths (dot-notation)"""

    class Precision:
        """Working precision keys"""
        BITS: Final = "precision.bits"
        MAX_BITS: Final = "precision.max_bits"

    class Tolerance:
        """Tolerance keys"""
        CONJ: Final = "tolerance.conj"
        SIGN: Final = "tolerance.sign"
        FEAS: Final = "tolerance.feas"
        ROOT: Final = "tolerance.root"

    class Search:
        """Search keys"""
        N_MAX_SCAN: Final = "search.n_max_scan"
        WORKERS: Final = "search.workers"
        POWER_SUM_HORIZON: Final = "search.power_sum_horizon"

    class Verify:
        """Verification keys"""
        K_VERIFY: Final = "verify.k_verify"
        CHARPOLY_MAX_DIM: Final = "verify.charpoly_max_dim"
        DET_MAX_DIM: Final = "verify.det_max_dim"
        TRACE_TOL: Final = "verify.trace_tol"
        CHARPOLY_TOL: Final = "verify.charpoly_tol"

    class Bound:
        """Bound keys"""
        SATURATION_LOG10: Final = "bound.saturation_log10"

    class Logging:
        """Logging keys"""
        ENABLE_FILE: Final = "logging.enable_file"


# ============================================================================
# Paths & Directories
# ============================================================================

class PathPattern:
    """Path patterns and directory names"""
    CONFIG_DIR: Final = ".config/bhconstruct"
    LOG_DIR: Final = ".local/share/bhconstruct/logs"

    # File names
    CONFIG_FILE: Final = "config.yaml"
    LOG_FILE: Final = "bhconstruct.log"


# ============================================================================
# Error Messages
# ============================================================================

class ErrorMessage:
    """Common error message templates"""
    CONJUGATE_CLOSURE: Final = "No conjugate partner within tolerance for {value}"
    OVERFLOW_AT_INDEX: Final = "Power sum overflowed at index {index}"
    NO_CONVERGENCE: Final = "Root iteration did not converge after {iterations} iterations"
    NO_PERRON: Final = "No real nonnegative entry attains the maximum modulus {modulus}"
    STRICT_DOMINANCE: Final = "Perron root {perron} does not strictly dominate {lambda0}"
    HYPOTHESES: Final = "Power-sum hypotheses fail: {detail}"
    DIMENSION_TOO_SMALL: Final = "Dimension {dim} is too small (need {need})"
    NEGATIVE_ENTRY: Final = "Pattern entry x_{index} = {value} is negative"
    VERIFICATION_FAILED: Final = "Verification of {check} failed: residual {residual}"
    DEGREE_MISMATCH: Final = "Degree mismatch: {left} vs {right}"
    LENGTH_MISMATCH: Final = "Length mismatch: {left} vs {right}"
    PARSE: Final = "Cannot parse {token!r} at position {position}"
    INDETERMINATE: Final = "Sign of index {index} undecided at {bits} bits"
    EMPTY_SPECTRUM: Final = "Spectrum is empty"
    NOT_FINITE: Final = "Non-finite value {value}"
    NOT_PATTERN: Final = "Matrix does not have the X_N pattern ({detail})"
    BAD_CONFIG: Final = "Invalid configuration: {detail}"
