"""
Matrix Market export and import of X_N

Coordinate format, real, general, 1-indexed, 17 significant digits so that a
write/read cycle reproduces every double exactly.
"""

import logging
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import io, sparse

from bhconstruct.constants import ErrorMessage, ReportFormat
from bhconstruct.errors import InputError
from bhconstruct.utils.realize import PatternMatrix

logger = logging.getLogger(__name__)


def write_matrix(path: Path, X: PatternMatrix, comment: Optional[str] = None) -> Path:
    """
    Write X_N as a coordinate Matrix Market file

    Args:
        path: Destination (".mtx" is conventional)
        X: Pattern matrix to export
        comment: Optional header comment

    Returns:
        The path written
    """
    path = Path(path)
    coo = sparse.coo_matrix(X.dense())
    try:
        io.mmwrite(str(path), coo, comment=comment or "", field='real',
                   precision=ReportFormat.FLOAT_DIGITS - 1, symmetry='general')
    except OSError as e:
        raise InputError(f"Cannot write matrix file {path}: {e}") from e
    # scipy may append the extension
    if not path.exists() and path.with_suffix('.mtx').exists():
        path = path.with_suffix('.mtx')
    logger.info(f"Wrote {X.dim}x{X.dim} matrix with {coo.nnz} stored entries to {path}")
    return path


def read_matrix(path: Path) -> PatternMatrix:
    """
    Read a Matrix Market file and check that it has the X_N pattern

    Raises:
        InputError: unreadable file, non-square matrix or a pattern mismatch
    """
    try:
        data = io.mmread(str(path))
    except (OSError, ValueError) as e:
        raise InputError(f"Cannot read matrix file {path}: {e}") from e
    dense = data.toarray() if sparse.issparse(data) else np.asarray(data)
    dense = np.asarray(dense, dtype=float)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise InputError(ErrorMessage.NOT_PATTERN.format(detail=f"shape {dense.shape}"))

    candidate = PatternMatrix(dense.shape[0], tuple(dense[:, 0]))
    mismatch = np.argwhere(candidate.dense() != dense)
    if mismatch.size:
        i, j = (int(v) + 1 for v in mismatch[0])
        raise InputError(ErrorMessage.NOT_PATTERN.format(detail=f"entry ({i}, {j}) = {dense[i - 1, j - 1]}"))
    logger.debug(f"Read {candidate.dim}x{candidate.dim} pattern matrix from {path}")
    return candidate
