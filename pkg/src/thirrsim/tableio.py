"""Deterministic table and JSON writers.

All files are written atomically (temp file in the target directory, then
os.replace) so a crashed run never leaves a half-written output. Floats are
serialized with repr, which round-trips exactly; complex columns are split
into _re/_im pairs. CSV is UTF-8 with LF line endings on every platform.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .errors import ConfigError


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return repr(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, str):
        if any(c in value for c in ",\"\n"):
            return '"' + value.replace('"', '""') + '"'
        return value
    raise ConfigError(f"cannot serialize {type(value).__name__} into a CSV cell")


def atomic_write_text(path: str, text: str) -> None:
    """Write text through a temp file and rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, columns: dict) -> None:
    """Write named columns; complex columns become name_re and name_im.

    columns maps header name to a 1D sequence; all columns must have equal
    length. Values are written with repr so they parse back bit-exactly.
    """
    if not columns:
        raise ConfigError("refusing to write a CSV with no columns")
    expanded: list[tuple[str, np.ndarray]] = []
    length = None
    for name, col in columns.items():
        arr = np.asarray(col)
        if arr.ndim != 1:
            raise ConfigError(f"column {name!r} is not one-dimensional")
        if length is None:
            length = arr.shape[0]
        elif arr.shape[0] != length:
            raise ConfigError(
                f"column {name!r} has {arr.shape[0]} rows, expected {length}"
            )
        if np.issubdtype(arr.dtype, np.complexfloating):
            expanded.append((f"{name}_re", arr.real))
            expanded.append((f"{name}_im", arr.imag))
        else:
            expanded.append((name, arr))
    lines = [",".join(name for name, _ in expanded)]
    for i in range(length or 0):
        lines.append(",".join(_format_cell(arr[i]) for _, arr in expanded))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def dump_json(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def write_json(path: str, obj) -> None:
    atomic_write_text(path, dump_json(obj))
