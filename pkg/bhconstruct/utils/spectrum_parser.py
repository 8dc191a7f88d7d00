"""
Spectrum and coefficient text parsing

Grammar per entry: a real ``a``, an imaginary ``bi`` (``j`` also accepted), or
``a+bi`` / ``a-bi``, decimal or scientific, with optional whitespace around
the inner sign. Inline lists are comma-separated; files hold one entry per
line with ``#`` comments.
"""

import logging
import re
from pathlib import Path
from typing import List, Tuple

from bhconstruct.constants import Tolerance
from bhconstruct.errors import InputError, ParseError
from bhconstruct.utils.poly import MonicRealPoly
from bhconstruct.utils.spectrum import SpectrumList, validate

logger = logging.getLogger(__name__)

NUMBER = r'(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?'

PATTERNS = [
    # 2, -1.5, 3e-4
    re.compile(rf'^(?P<re>[+-]?{NUMBER})$'),
    # 1i, -0.5i, i
    re.compile(rf'^(?P<im>[+-]?(?:{NUMBER})?)[ij]$'),
    # 0.95+0.31i, 1e-3-2i
    re.compile(rf'^(?P<re>[+-]?{NUMBER})(?P<im>[+-](?:{NUMBER})?)[ij]$'),
]

_INNER_SIGN = re.compile(r'(?<=[\d.ij])\s*([+-])\s*')


def _imaginary(text: str) -> float:
    if text in ('', '+'):
        return 1.0
    if text == '-':
        return -1.0
    return float(text)


def parse_value(token: str, position=0) -> complex:
    """Parse one entry of the grammar"""
    compact = _INNER_SIGN.sub(r'\1', token.strip())
    compact = re.sub(r'^([+-])\s+', r'\1', compact)
    for pattern in PATTERNS:
        match = pattern.match(compact)
        if match:
            groups = match.groupdict()
            real = float(groups['re']) if groups.get('re') else 0.0
            imag = _imaginary(groups['im']) if 'im' in groups else 0.0
            return complex(real, imag)
    raise ParseError(token.strip(), position)


def _split(text: str) -> List[Tuple[str, int]]:
    tokens = []
    start = 0
    for piece in text.split(','):
        offset = start + (len(piece) - len(piece.lstrip()))
        tokens.append((piece, offset))
        start += len(piece) + 1
    return tokens


def parse_entries(text: str) -> List[complex]:
    """Comma-separated list into complex values (positions are character offsets)"""
    if not text.strip():
        raise ParseError(text, 0)
    return [parse_value(token, offset) for token, offset in _split(text)]


def parse_spectrum(text: str, tol_conj: float = Tolerance.CONJ) -> SpectrumList:
    """Parse and validate an inline spectrum"""
    entries = parse_entries(text)
    logger.debug(f"Parsed {len(entries)} spectrum entries")
    return validate(entries, tol_conj)


def read_spectrum_file(path: Path, tol_conj: float = Tolerance.CONJ) -> SpectrumList:
    """One UTF-8 entry per line; blank lines and # comments are ignored"""
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"Cannot read spectrum file {path}: {e}") from e
    try:
        lines = raw.decode('utf-8').splitlines()
    except UnicodeDecodeError as e:
        line_number = raw.count(b"\n", 0, e.start) + 1
        raise ParseError(raw[e.start:e.end].hex(), f"line {line_number}, byte {e.start}") from e
    entries = []
    for number, line in enumerate(lines, start=1):
        content = line.split('#', 1)[0].strip()
        if content:
            entries.append(parse_value(content, f"line {number}"))
    return validate(entries, tol_conj)


def parse_coefficients(text: str) -> MonicRealPoly:
    """Comma-separated real coefficients p_1..p_n of a monic polynomial"""
    values = []
    for token, offset in _split(text):
        value = parse_value(token, offset)
        if value.imag != 0.0:
            raise ParseError(token.strip(), offset)
        values.append(value.real)
    return MonicRealPoly(tuple(values))
