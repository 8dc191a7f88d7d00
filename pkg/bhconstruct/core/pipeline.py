"""
Subcommand orchestration for the command-line front end
"""

import argparse
import logging
import math
import os
import time
from dataclasses import dataclass, field, replace
from datetime import timedelta
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import humanize
import numpy as np

from bhconstruct import __version__
from bhconstruct.config import Config
from bhconstruct.constants import (
    BoundLimits,
    ConfigKeys,
    EnvVar,
    ErrorMessage,
    ExitCode,
    Precision,
    ReferenceSpectra,
    ReportFormat,
    Search,
    Subcommand,
    SweepFamily,
    Tolerance,
    Verification,
)
from bhconstruct.errors import (
    BHError,
    DimensionTooSmall,
    IndeterminateSign,
    InputError,
    NoConvergence,
    OverflowAtIndex,
)
from bhconstruct.utils.bound import closed_form_log10, compute_constants
from bhconstruct.utils.matrix_market import read_matrix, write_matrix
from bhconstruct.utils.perturb import bek_bound, matching_distance
from bhconstruct.utils.poly import coeffs_from_roots, find_roots
from bhconstruct.utils.precision import validate_bits
from bhconstruct.utils.realize import (
    build_from_report,
    check_feasible,
    search_min_feasible,
    verify,
)
from bhconstruct.utils.report import render_csv, render_json
from bhconstruct.utils.spectrum import SpectrumList, check_hypotheses, validate
from bhconstruct.utils.spectrum_parser import (
    parse_coefficients,
    parse_spectrum,
    read_spectrum_file,
)

logger = logging.getLogger(__name__)


# ============================================================================
# Run configuration
# ============================================================================

@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one invocation"""
    precision_bits: int = Precision.HARDWARE_BITS
    max_bits: int = Precision.MAX_BITS
    tol_conj: float = Tolerance.CONJ
    tol_sign: float = Tolerance.SIGN
    tol_feas: float = Tolerance.FEAS
    tol_root: float = Tolerance.ROOT
    n_max_scan: int = Search.N_MAX_SCAN
    workers: int = Search.WORKERS
    power_sum_horizon: int = Search.POWER_SUM_HORIZON
    k_verify: int = Verification.K_VERIFY
    charpoly_max_dim: int = Verification.CHARPOLY_MAX_DIM
    det_max_dim: int = Verification.DET_MAX_DIM
    trace_tol: float = Verification.TRACE_TOL
    charpoly_tol: float = Verification.CHARPOLY_TOL
    saturation_log10: float = BoundLimits.SATURATION_LOG10
    report_out: Optional[Path] = None
    verbosity: int = 0
    timing: bool = False

    def __post_init__(self) -> None:
        validate_bits(self.precision_bits)
        validate_bits(self.max_bits)
        if self.max_bits < self.precision_bits:
            raise InputError(ErrorMessage.BAD_CONFIG.format(
                detail=f"max_bits={self.max_bits} below precision_bits={self.precision_bits}"))
        for name in ('tol_conj', 'tol_sign', 'tol_feas', 'tol_root'):
            value = getattr(self, name)
            if not 0 < value < Tolerance.MAX_ALLOWED:
                raise InputError(ErrorMessage.BAD_CONFIG.format(
                    detail=f"{name}={value} not in (0, {Tolerance.MAX_ALLOWED})"))
        if min(self.workers, self.n_max_scan, self.k_verify, self.power_sum_horizon) < 1:
            raise InputError(ErrorMessage.BAD_CONFIG.format(
                detail="workers, n_max_scan, k_verify and power_sum_horizon must be positive"))

    @classmethod
    def from_config(cls, config: Config, environ: Optional[Mapping[str, str]] = None,
                    **overrides: Any) -> "RunConfig":
        """
        Layer defaults, the YAML config, the environment and explicit overrides

        Args:
            config: Loaded YAML configuration
            environ: Environment mapping (os.environ when None)
            **overrides: CLI values; None entries are ignored

        Returns:
            Validated RunConfig
        """
        environ = os.environ if environ is None else environ
        values: Dict[str, Any] = {
            'precision_bits': config.get(ConfigKeys.Precision.BITS, Precision.HARDWARE_BITS),
            'max_bits': config.get(ConfigKeys.Precision.MAX_BITS, Precision.MAX_BITS),
            'tol_conj': config.get(ConfigKeys.Tolerance.CONJ, Tolerance.CONJ),
            'tol_sign': config.get(ConfigKeys.Tolerance.SIGN, Tolerance.SIGN),
            'tol_feas': config.get(ConfigKeys.Tolerance.FEAS, Tolerance.FEAS),
            'tol_root': config.get(ConfigKeys.Tolerance.ROOT, Tolerance.ROOT),
            'n_max_scan': config.get(ConfigKeys.Search.N_MAX_SCAN, Search.N_MAX_SCAN),
            'workers': config.get(ConfigKeys.Search.WORKERS, Search.WORKERS),
            'power_sum_horizon': config.get(ConfigKeys.Search.POWER_SUM_HORIZON,
                                            Search.POWER_SUM_HORIZON),
            'k_verify': config.get(ConfigKeys.Verify.K_VERIFY, Verification.K_VERIFY),
            'charpoly_max_dim': config.get(ConfigKeys.Verify.CHARPOLY_MAX_DIM,
                                           Verification.CHARPOLY_MAX_DIM),
            'det_max_dim': config.get(ConfigKeys.Verify.DET_MAX_DIM, Verification.DET_MAX_DIM),
            'trace_tol': config.get(ConfigKeys.Verify.TRACE_TOL, Verification.TRACE_TOL),
            'charpoly_tol': config.get(ConfigKeys.Verify.CHARPOLY_TOL, Verification.CHARPOLY_TOL),
            'saturation_log10': config.get(ConfigKeys.Bound.SATURATION_LOG10,
                                           BoundLimits.SATURATION_LOG10),
        }
        env_bits = environ.get(EnvVar.PRECISION_BITS)
        if env_bits:
            try:
                values['precision_bits'] = int(env_bits)
            except ValueError as e:
                raise InputError(ErrorMessage.BAD_CONFIG.format(
                    detail=f"{EnvVar.PRECISION_BITS}={env_bits!r} is not an integer")) from e
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except TypeError as e:
            raise InputError(ErrorMessage.BAD_CONFIG.format(detail=str(e))) from e

    @property
    def feasibility_kwargs(self) -> Dict[str, Any]:
        return {
            'tol_feas': self.tol_feas,
            'tol_conj': self.tol_conj,
            'start_bits': self.precision_bits,
            'max_bits': self.max_bits,
        }

    @property
    def verify_kwargs(self) -> Dict[str, Any]:
        return {
            'K_verify': self.k_verify,
            'trace_tol': self.trace_tol,
            'charpoly_max_dim': self.charpoly_max_dim,
            'charpoly_tol': self.charpoly_tol,
            'det_max_dim': self.det_max_dim,
        }


@dataclass
class RunReport:
    """Structured outcome of one subcommand"""
    subcommand: str
    exit_code: int = ExitCode.SUCCESS
    sections: Dict[str, Any] = field(default_factory=dict)
    elapsed: Optional[float] = None
    csv_text: Optional[str] = None

    def to_document(self) -> Dict[str, Any]:
        document = {
            'subcommand': self.subcommand,
            'exit_code': int(self.exit_code),
            'version': __version__,
        }
        document.update(self.sections)
        if self.elapsed is not None:
            document['timing_seconds'] = self.elapsed
        return document

    def render(self) -> str:
        return render_json(self.to_document())


# ============================================================================
# Argument parsing
# ============================================================================

def _add_spectrum_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--spectrum', help='Comma-separated list, e.g. "2, -1" or "1.1, 0.95+0.31i, 0.95-0.31i"')
    source.add_argument('--input', type=Path, help='File with one entry per line')


def build_parser() -> argparse.ArgumentParser:
    """Parser for global flags and every subcommand"""
    parser = argparse.ArgumentParser(
        prog='bhconstruct',
        description='Realize a list of complex numbers, padded with zeros, as the '
                    'spectrum of a nonnegative matrix'
    )
    parser.add_argument('--config', type=Path, help='YAML configuration file')
    parser.add_argument('--precision-bits', type=int,
                        help='Starting mantissa width: 53 or 64..1024')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='Increase log verbosity (repeatable)')
    parser.add_argument('--log-file', type=Path, help='Also write the log to this file')
    parser.add_argument('--output', type=Path, help='Write the report here instead of stdout')
    parser.add_argument('--timing', action='store_true',
                        help='Include wall-clock timing in the report')
    parser.add_argument('--version', action='version',
                        version=f"%(prog)s {__version__}")

    sub = parser.add_subparsers(dest='subcommand', required=True)

    check = sub.add_parser(Subcommand.CHECK.value, help='Dominance, power-sum and JLL checks')
    _add_spectrum_source(check)

    bound = sub.add_parser(Subcommand.BOUND.value, help='Explicit padding bound')
    _add_spectrum_source(bound)

    realize = sub.add_parser(Subcommand.REALIZE.value, help='Build and verify X_N')
    _add_spectrum_source(realize)
    realize.add_argument('--dim', type=int, required=True, help='Matrix dimension N')
    realize.add_argument('--matrix-out', type=Path, help='Export X_N in Matrix Market format')

    search = sub.add_parser(Subcommand.SEARCH.value, help='Smallest feasible N')
    _add_spectrum_source(search)
    search.add_argument('--max', type=int, dest='n_max', help='Largest N scanned')
    search.add_argument('--workers', type=int, help='Scan threads')

    verify_cmd = sub.add_parser(Subcommand.VERIFY.value, help='Verify an exported matrix')
    _add_spectrum_source(verify_cmd)
    verify_cmd.add_argument('--matrix', type=Path, required=True, help='Matrix Market file')

    bek = sub.add_parser(Subcommand.BEK.value, help='Root displacement bounds for two polynomials')
    bek.add_argument('--f', required=True, help='Coefficients p_1..p_n of the first monic polynomial')
    bek.add_argument('--g', required=True, help='Coefficients of the second monic polynomial')

    sweep = sub.add_parser(Subcommand.SWEEP.value, help='First feasible N across a spectrum family')
    sweep.add_argument('--family', choices=[f.value for f in SweepFamily], required=True)
    sweep.add_argument('--start', type=float, required=True)
    sweep.add_argument('--stop', type=float, required=True)
    sweep.add_argument('--steps', type=int, default=11)
    sweep.add_argument('--max', type=int, dest='n_max', help='Largest N scanned per point')
    sweep.add_argument('--theta', type=float, default=ReferenceSpectra.DISK_THETA,
                       help='Argument of the unit-circle pair (disk family)')
    sweep.add_argument('--csv', action='store_true', help='Emit CSV instead of JSON')
    return parser


# ============================================================================
# Pipeline
# ============================================================================

def family_spectrum(family: SweepFamily, t: float,
                    theta: float = ReferenceSpectra.DISK_THETA) -> List[complex]:
    """Member of a parametrized sweep family"""
    if family is SweepFamily.DISK:
        pair = complex(math.cos(theta), math.sin(theta))
        return [complex(t), pair, pair.conjugate()]
    return [complex(3 + t), complex(3 - t), complex(-2), complex(-2), complex(-2)]


def _hypothesis_exit(report) -> ExitCode:
    if report.ok:
        return ExitCode.SUCCESS
    if report.perron_ok and report.first_negative_index is None and report.undecided:
        return ExitCode.INDETERMINATE
    return ExitCode.INFEASIBLE


def _feasibility_exit(report) -> ExitCode:
    if report.feasible:
        return ExitCode.SUCCESS
    if report.first_negative_index is None and report.indeterminate:
        return ExitCode.INDETERMINATE
    return ExitCode.INFEASIBLE


class Pipeline:
    """
    Runs one subcommand against a validated RunConfig
    """

    def __init__(self, config: RunConfig):
        self.config = config

    def run(self, args: argparse.Namespace) -> RunReport:
        """
        Execute the subcommand named in args

        Returns:
            RunReport whose exit_code follows the CLI contract
        """
        name = args.subcommand
        handler = getattr(self, f"_run_{name}")
        started = time.perf_counter()
        try:
            report = handler(args)
        except InputError as e:
            logger.error(f"{name}: {e}")
            report = RunReport(name, ExitCode.INPUT_ERROR, {'error': str(e)})
        except (IndeterminateSign, NoConvergence, OverflowAtIndex) as e:
            logger.warning(f"{name}: {e}")
            report = RunReport(name, ExitCode.INDETERMINATE, {'error': str(e)})
        except BHError as e:
            logger.warning(f"{name}: {e}")
            report = RunReport(name, ExitCode.INFEASIBLE, {'error': str(e)})
        elapsed = time.perf_counter() - started
        logger.info(f"{name} finished with exit code {int(report.exit_code)} "
                    f"in {humanize.naturaldelta(timedelta(seconds=elapsed), minimum_unit='milliseconds')}")
        if self.config.timing:
            report.elapsed = elapsed
        return report

    def _spectrum(self, args: argparse.Namespace) -> SpectrumList:
        if getattr(args, 'input', None):
            return read_spectrum_file(args.input, self.config.tol_conj)
        return parse_spectrum(args.spectrum, self.config.tol_conj)

    def _hypotheses(self, sigma: SpectrumList):
        return check_hypotheses(sigma, self.config.tol_sign,
                                self.config.precision_bits, self.config.max_bits,
                                self.config.power_sum_horizon)

    def _run_check(self, args: argparse.Namespace) -> RunReport:
        sigma = self._spectrum(args)
        report = self._hypotheses(sigma)
        return RunReport(Subcommand.CHECK.value, _hypothesis_exit(report), {
            'spectrum': list(sigma.entries),
            'hypotheses': report,
        })

    def _run_bound(self, args: argparse.Namespace) -> RunReport:
        sigma = self._spectrum(args)
        if sigma.n == 1:
            # (lambda_1) is realized by the 1x1 matrix [lambda_1]
            return RunReport(Subcommand.BOUND.value, ExitCode.SUCCESS, {
                'spectrum': list(sigma.entries),
                'bound': {'N_bound': 1, 'log10_N_bound': 0.0, 'saturated': False},
            })
        hypotheses = self._hypotheses(sigma)
        if not hypotheses.ok:
            return RunReport(Subcommand.BOUND.value, _hypothesis_exit(hypotheses), {
                'spectrum': list(sigma.entries),
                'hypotheses': hypotheses,
            })
        f = coeffs_from_roots(sigma.entries, self.config.tol_conj)
        constants = compute_constants(sigma, f, hypotheses, self.config.saturation_log10,
                                      self.config.tol_sign)
        return RunReport(Subcommand.BOUND.value, ExitCode.SUCCESS, {
            'spectrum': list(sigma.entries),
            'bound': constants,
            'closed_form_log10': closed_form_log10(constants),
        })

    def _run_realize(self, args: argparse.Namespace) -> RunReport:
        sigma = self._spectrum(args)
        report = check_feasible(sigma, args.dim, **self.config.feasibility_kwargs)
        sections: Dict[str, Any] = {'spectrum': list(sigma.entries), 'feasibility': report}
        if not report.feasible:
            return RunReport(Subcommand.REALIZE.value, _feasibility_exit(report), sections)

        X = build_from_report(report, self.config.tol_feas)
        sections['certificate'] = verify(sigma, X, report=report, **self.config.verify_kwargs)
        if X.dim <= ReportFormat.MAX_INLINE_DIM:
            sections['matrix'] = X.dense().tolist()
        if args.matrix_out:
            sections['matrix_file'] = str(write_matrix(args.matrix_out, X,
                                                       comment=f"X_{X.dim} for {sigma}"))
        return RunReport(Subcommand.REALIZE.value, ExitCode.SUCCESS, sections)

    def _run_search(self, args: argparse.Namespace) -> RunReport:
        sigma = self._spectrum(args)
        n_max = args.n_max or self.config.n_max_scan
        if n_max < sigma.n:
            raise DimensionTooSmall(n_max, f"--max >= n = {sigma.n}")
        workers = args.workers or self.config.workers
        result = search_min_feasible(sigma, n_max, workers, **self.config.feasibility_kwargs)
        if result.first_feasible is not None:
            code = ExitCode.SUCCESS
        elif '?' in result.bitmap:
            code = ExitCode.INDETERMINATE
        else:
            code = ExitCode.INFEASIBLE
        return RunReport(Subcommand.SEARCH.value, code, {
            'spectrum': list(sigma.entries),
            'search': result,
            'non_monotone': result.non_monotone,
        })

    def _run_verify(self, args: argparse.Namespace) -> RunReport:
        sigma = self._spectrum(args)
        X = read_matrix(args.matrix)
        sections: Dict[str, Any] = {'spectrum': list(sigma.entries), 'matrix_dim': X.dim,
                                    'min_entry': X.min_entry}
        if X.min_entry < 0:
            sections['error'] = ErrorMessage.NEGATIVE_ENTRY.format(
                index=X.x.index(X.min_entry) + 1, value=X.min_entry)
            return RunReport(Subcommand.VERIFY.value, ExitCode.INFEASIBLE, sections)
        sections['certificate'] = verify(sigma, X, **self.config.verify_kwargs)
        return RunReport(Subcommand.VERIFY.value, ExitCode.SUCCESS, sections)

    def _run_bek(self, args: argparse.Namespace) -> RunReport:
        f = parse_coefficients(args.f)
        g = parse_coefficients(args.g)
        bound = bek_bound(f, g)
        distance = matching_distance(find_roots(f, self.config.tol_root),
                                     find_roots(g, self.config.tol_root))
        return RunReport(Subcommand.BEK.value, ExitCode.SUCCESS, {
            'bounds': bound,
            'matching_distance': distance,
        })

    def _sweep_point(self, family: SweepFamily, t: float, theta: float,
                     n_max: int) -> Tuple[Optional[int], Optional[float], Optional[float]]:
        try:
            sigma = validate(family_spectrum(family, t, theta), self.config.tol_conj)
        except InputError as e:
            logger.debug(f"Sweep point {t}: {e}")
            return None, None, None
        result = search_min_feasible(sigma, max(n_max, sigma.n), self.config.workers,
                                     **self.config.feasibility_kwargs)
        log10_bound = None
        hypotheses = self._hypotheses(sigma)
        if hypotheses.ok:
            f = coeffs_from_roots(sigma.entries, self.config.tol_conj)
            log10_bound = compute_constants(sigma, f, hypotheses, self.config.saturation_log10,
                                            self.config.tol_sign).log10_N_bound
        return result.first_feasible, log10_bound, result.min_margin_at_first

    def _run_sweep(self, args: argparse.Namespace) -> RunReport:
        family = SweepFamily(args.family)
        if args.steps < 1:
            raise InputError(ErrorMessage.BAD_CONFIG.format(detail="--steps must be >= 1"))
        n_max = args.n_max or self.config.n_max_scan
        params = np.linspace(args.start, args.stop, args.steps)
        rows = []
        for t in params:
            first, log10_bound, margin = self._sweep_point(family, float(t), args.theta, n_max)
            rows.append((float(t), first, log10_bound, margin))
        logger.info(f"Swept {family.display_name.lower()} over {len(rows)} points")
        report = RunReport(Subcommand.SWEEP.value, ExitCode.SUCCESS, {
            'family': family,
            'rows': [dict(zip(ReportFormat.CSV_HEADER, row)) for row in rows],
        })
        if args.csv:
            report.csv_text = render_csv(ReportFormat.CSV_HEADER, rows)
        return report


def run_subcommand(config: RunConfig, argv: Sequence[str]) -> Tuple[int, RunReport]:
    """
    Parse argv and run the named subcommand

    Args:
        config: Validated run configuration
        argv: Subcommand and its options, optionally preceded by global flags

    Returns:
        (exit code, report)
    """
    try:
        args = build_parser().parse_args(list(argv))
    except SystemExit as e:
        code = int(e.code) if isinstance(e.code, int) else int(ExitCode.INPUT_ERROR)
        return code, RunReport('usage', code, {'error': 'invalid arguments'})
    if getattr(args, 'workers', None) is not None:
        config = replace(config, workers=args.workers)
    report = Pipeline(config).run(args)
    return int(report.exit_code), report
