"""File formats: matrix JSON/CSV, frame JSON, and JSON encoding of reports.

Matrix JSON::

    {"rows": n, "cols": m, "data": [[re, im], ...]}      # row-major

Frame JSON::

    {"dim": n, "vectors": [[[re, im], ...], ...]}        # one entry per vector

Matrix CSV has one matrix row per line with cells like ``1.5+2i`` (``j``
is accepted on input); a purely real cell may omit the imaginary part.  Floats are written with Python's
shortest round-trip representation, so reading back is bit-exact.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import math
from pathlib import Path

import numpy as np

from .exceptions import FormatError

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "frame_to_json",
    "frame_from_json",
    "matrix_to_csv",
    "matrix_from_csv",
    "read_matrix",
    "write_matrix",
    "read_frame",
    "write_frame",
    "to_jsonable",
    "dumps",
]


def _pair(z):
    return [float(z.real), float(z.imag)]


def _scalar(cell, where):
    if isinstance(cell, (list, tuple)) and len(cell) == 2:
        re, im = cell
    elif isinstance(cell, (int, float)) and not isinstance(cell, bool):
        re, im = cell, 0.0
    else:
        raise FormatError(f"{where}: expected [re, im], got {cell!r}")
    try:
        z = complex(float(re), float(im))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: non-numeric entry {cell!r}") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise FormatError(f"{where}: non-finite entry")
    return z


def matrix_to_json(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise FormatError("only two-dimensional arrays can be written as matrices")
    return {"rows": a.shape[0], "cols": a.shape[1], "data": [_pair(z) for z in a.ravel()]}


def matrix_from_json(obj):
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= obj.keys():
        raise FormatError("matrix JSON needs keys rows, cols, data")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(rows, int) and isinstance(cols, int) and rows >= 0 and cols >= 0):
        raise FormatError("rows and cols must be nonnegative integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise FormatError(f"data must hold rows*cols = {rows * cols} entries")
    vals = [_scalar(c, f"data[{k}]") for k, c in enumerate(data)]
    return np.array(vals, dtype=complex).reshape(rows, cols)


def frame_to_json(frame):
    t = np.asarray(getattr(frame, "synthesis", frame), dtype=complex)
    return {"dim": t.shape[0], "vectors": [[_pair(z) for z in t[:, j]] for j in range(t.shape[1])]}


def frame_from_json(obj):
    from .frames import FrameSystem

    if not isinstance(obj, dict) or not {"dim", "vectors"} <= obj.keys():
        raise FormatError("frame JSON needs keys dim, vectors")
    dim, vectors = obj["dim"], obj["vectors"]
    if not (isinstance(dim, int) and dim >= 0) or not isinstance(vectors, list):
        raise FormatError("dim must be a nonnegative integer and vectors a list")
    cols = []
    for j, vec in enumerate(vectors):
        if not isinstance(vec, list) or len(vec) != dim:
            raise FormatError(f"vector {j} must have {dim} entries")
        cols.append([_scalar(c, f"vectors[{j}][{k}]") for k, c in enumerate(vec)])
    t = np.array(cols, dtype=complex).T if cols else np.zeros((dim, 0), dtype=complex)
    return FrameSystem(t.reshape(dim, len(cols)))


def _fmt(z):
    re, im = repr(float(z.real)), repr(float(z.imag))
    return f"{re}{'' if im.startswith('-') else '+'}{im}i"


def matrix_to_csv(a):
    a = np.asarray(a, dtype=complex)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in a:
        writer.writerow([_fmt(z) for z in row])
    return buf.getvalue()


def matrix_from_csv(text):
    rows = []
    for k, row in enumerate(csv.reader(io.StringIO(text))):
        if not row:
            continue
        try:
            vals = [complex(cell.strip().replace("i", "j").replace(" ", "")) for cell in row]
        except ValueError as exc:
            raise FormatError(f"CSV row {k}: {exc}") from exc
        rows.append(vals)
    if not rows:
        raise FormatError("empty CSV matrix")
    if len({len(r) for r in rows}) != 1:
        raise FormatError("CSV rows have different lengths")
    a = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise FormatError("CSV matrix has non-finite entries")
    return a


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def read_matrix(path):
    """Read a matrix from ``.json`` or ``.csv`` (chosen by extension)."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return matrix_from_csv(path.read_text(encoding="utf-8"))
    try:
        return matrix_from_json(_load_json(path))
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_matrix(path, a):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        path.write_text(matrix_to_csv(a), encoding="utf-8")
    else:
        path.write_text(json.dumps(matrix_to_json(a)) + "\n", encoding="utf-8")


def read_frame(path):
    try:
        return frame_from_json(_load_json(path))
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_frame(path, frame):
    Path(path).write_text(json.dumps(frame_to_json(frame)) + "\n", encoding="utf-8")


def to_jsonable(obj):
    """Recursively convert reports, arrays and frames to JSON-ready values.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    from .frames import FrameSystem
    from .gram import CrossGram

    if isinstance(obj, FrameSystem):
        return frame_to_json(obj)
    if isinstance(obj, CrossGram):
        out = {"matrix": matrix_to_json(obj.matrix), "rule": obj.rule}
        if obj.op is not None:
            out["op"] = matrix_to_json(obj.op)
        return out
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2:
            return matrix_to_json(obj)
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, enum.Enum):
        return obj.value
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, (complex, np.complexfloating)):
        return _pair(complex(obj))
    return obj


def dumps(obj):
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)
