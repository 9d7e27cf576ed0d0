"""JSON and CSV writers with fixed float formatting."""

import csv
import io
import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any

import numpy as np

CSV_DIGITS = 12


def format_csv_float(value: float) -> str:
    """12 significant digits; non-finite values are written as nan/inf."""
    return f"{value:.{CSV_DIGITS}g}"


def _json_float(value: float) -> float | None:
    # repr of a float is the shortest string that round-trips (at most 17 digits)
    return float(value) if math.isfinite(value) else None


def to_jsonable(obj: Any) -> Any:
    """
    Convert results to plain JSON types.

    Complex numbers become [re, im]; numpy scalars and arrays become Python
    numbers and lists; non-finite floats become null; dataclasses become dicts.
    """
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _json_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return [_json_float(z.real), _json_float(z.imag)]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps_json(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(obj: Any, path: str | Path) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dumps_json(obj), encoding="utf-8")
    return out


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            format_csv_float(v) if isinstance(v, (float, np.floating)) else v for v in row
        )
    return buffer.getvalue()


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], path: str | Path) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(csv_text(header, rows), encoding="utf-8")
    return out
