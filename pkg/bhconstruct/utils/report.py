"""
Deterministic report rendering

JSON documents with sorted keys and every float printed with 17 significant
digits, and CSV tables for sweeps. Identical inputs render byte-identical.
"""

import csv
import dataclasses
import io
import json
import math
from enum import Enum
from typing import Any, Iterable, Sequence

import numpy as np

from bhconstruct.constants import ReportFormat


def to_plain(value: Any) -> Any:
    """Convert dataclasses, enums, tuples, complex and numpy scalars into JSON-ready values"""
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_plain(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"im": float(value.imag), "re": float(value.real)}
    return value


def format_float(value: float) -> str:
    """17 significant digits; non-finite values become quoted strings"""
    if math.isnan(value):
        return '"NaN"'
    if math.isinf(value):
        return '"Infinity"' if value > 0 else '"-Infinity"'
    return format(value, f'.{ReportFormat.FLOAT_DIGITS}g')


def _is_scalar(value: Any) -> bool:
    return value is None or isinstance(value, (bool, int, float, str))


def _render(value: Any, depth: int) -> str:
    pad = ' ' * (ReportFormat.INDENT * (depth + 1))
    end = ' ' * (ReportFormat.INDENT * depth)
    if value is None:
        return 'null'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, list):
        if not value:
            return '[]'
        if all(_is_scalar(v) for v in value):
            return '[' + ', '.join(_render(v, depth + 1) for v in value) + ']'
        items = [pad + _render(v, depth + 1) for v in value]
        return '[\n' + ',\n'.join(items) + '\n' + end + ']'
    if isinstance(value, dict):
        if not value:
            return '{}'
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_render(value[k], depth + 1)}"
                 for k in sorted(value)]
        return '{\n' + ',\n'.join(items) + '\n' + end + '}'
    raise TypeError(f"Cannot render {type(value).__name__}")


def render_json(document: Any) -> str:
    """Render a report document deterministically (trailing newline included)"""
    return _render(to_plain(document), 0) + '\n'


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV with floats at 17 significant digits and empty cells for None"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow(['' if v is None else
                         format_float(float(v)).strip('"') if isinstance(v, float) else v
                         for v in row])
    return buffer.getvalue()
