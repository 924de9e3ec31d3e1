"""JSON and CSV interchange formats.

Operators are ``{"dim": d, "re": [[...]], "im": [[...]]}`` (row-major); kets use
the same keys with flat lists. Floats are written with ``repr`` precision, so a
round trip through a file is bit-exact.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .linalg_core import as_operator


class FormatError(ValueError):
    """Input document does not follow the interchange format."""


def _combine(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    # assigning parts keeps signed zeros that re + 1j * im would lose
    out = np.empty(re.shape, dtype=complex)
    out.real, out.imag = re, im
    return out


def operator_to_json(A) -> dict[str, Any]:
    A = as_operator(A)
    return {"dim": int(A.shape[0]), "re": A.real.tolist(), "im": A.imag.tolist()}


def operator_from_json(data: dict[str, Any]) -> np.ndarray:
    try:
        dim = int(data["dim"])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed operator document: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise FormatError(f"operator arrays must be {dim}x{dim}, got {re.shape} and {im.shape}")
    try:
        return as_operator(_combine(re, im))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def ket_to_json(psi) -> dict[str, Any]:
    v = np.asarray(psi, dtype=complex)
    return {"dim": int(v.size), "re": v.real.tolist(), "im": v.imag.tolist()}


def ket_from_json(data: dict[str, Any]) -> np.ndarray:
    try:
        dim = int(data["dim"])
        v = _combine(np.asarray(data["re"], dtype=float), np.asarray(data["im"], dtype=float))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed ket document: {exc}") from exc
    if v.shape != (dim,):
        raise FormatError(f"ket arrays must have length {dim}")
    return v


def _clean(obj):
    """Replace non-finite floats by None so the output stays strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path: str | Path):
    """Raises ``OSError`` for unreadable files and ``FormatError`` for bad JSON."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def read_operator(path: str | Path) -> np.ndarray:
    data = read_json(path)
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected an operator object")
    return operator_from_json(data)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()
