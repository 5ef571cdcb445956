"""MatrixFile JSON reading and writing.

Layout: ``{"schema_version": 1, "n": n, "k": k, "data": [[[re, im], ...], ...]}``
with ``n*k`` rows of ``n*k`` pairs.  Floats are written in the shortest form
that round-trips, so write -> read -> write reproduces the file byte for byte.
"""

from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np

from .blockops import BlockMatrix
from .errors import UsageError

SCHEMA_VERSION = 1


class MatrixFileError(UsageError):
    """Malformed MatrixFile; ``line`` and ``column`` are 1-based when known."""

    def __init__(self, message: str, source: str = "<input>", line: int | None = None,
                 column: int | None = None):
        where = source if line is None else f"{source}:{line}:{column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


def _line_col(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _data_row_offsets(text: str) -> list[int]:
    """Offsets of the rows of the top-level ``"data"`` array (best effort)."""
    offsets = []
    depth = 0
    i = 0
    last_key = None
    in_data_at = None
    while i < len(text):
        ch = text[i]
        if ch == '"':
            j = i + 1
            while j < len(text) and text[j] != '"':
                j += 2 if text[j] == "\\" else 1
            if depth == 1:
                last_key = text[i + 1:j]
            i = j + 1
            continue
        if ch in "[{":
            depth += 1
            if ch == "[" and depth == 2 and last_key == "data" and in_data_at is None:
                in_data_at = depth
            elif ch == "[" and in_data_at is not None and depth == in_data_at + 1:
                offsets.append(i)
        elif ch in "]}":
            if in_data_at is not None and depth == in_data_at:
                in_data_at = -1
            depth -= 1
        i += 1
    return offsets


def _number(x, what: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValueError(f"{what} is not a number: {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"{what} is not finite")
    return x


def parse_matrix_file(text: str, source: str = "<input>") -> BlockMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(exc.msg, source, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise MatrixFileError("top level must be an object", source, 1, 1)
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise MatrixFileError(f"unsupported schema_version {version!r}", source)
    for key in ("n", "k", "data"):
        if key not in doc:
            raise MatrixFileError(f"missing field {key!r}", source)
    n, k = doc["n"], doc["k"]
    for name, v in (("n", n), ("k", k)):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise MatrixFileError(f"{name} must be a positive integer, got {v!r}", source)
    dim = n * k
    rows = doc["data"]
    offsets = _data_row_offsets(text)

    def fail(msg, r=None):
        if r is not None and r < len(offsets):
            raise MatrixFileError(msg, source, *_line_col(text, offsets[r]))
        raise MatrixFileError(msg, source)

    if not isinstance(rows, list) or len(rows) != dim:
        got = len(rows) if isinstance(rows, list) else type(rows).__name__
        fail(f"data must have n*k = {dim} rows, got {got}")
    mat = np.empty((dim, dim), dtype=np.complex128)
    for r, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            got = len(row) if isinstance(row, list) else type(row).__name__
            fail(f"row {r + 1} has {got} entries, expected {dim}", r)
        for c, entry in enumerate(row):
            if not isinstance(entry, list) or len(entry) != 2:
                fail(f"entry ({r + 1}, {c + 1}) must be a [re, im] pair", r)
            try:
                mat[r, c] = complex(_number(entry[0], "real part"), _number(entry[1], "imaginary part"))
            except ValueError as exc:
                fail(f"entry ({r + 1}, {c + 1}): {exc}", r)
    return BlockMatrix(n, k, mat)


def read_matrix_file(path: str) -> BlockMatrix:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_matrix_file(text, path)


def _float(x: float) -> str:
    return repr(float(x))


def format_matrix_file(h: BlockMatrix) -> str:
    mat = np.asarray(h.mat)
    if mat.ndim != 2:
        raise UsageError("a MatrixFile holds a single matrix")
    if not np.all(np.isfinite(mat)):
        raise UsageError("cannot serialize non-finite entries")
    rows = [
        "    [" + ", ".join(f"[{_float(z.real)}, {_float(z.imag)}]" for z in row) + "]"
        for row in mat
    ]
    return (f'{{"schema_version": {SCHEMA_VERSION}, "n": {h.n}, "k": {h.k}, "data": [\n'
            + ",\n".join(rows) + "\n]}\n")


def atomic_write(path: str, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix_file(path: str, h: BlockMatrix) -> None:
    atomic_write(path, format_matrix_file(h))


def complex_json(a) -> list:
    """Nested ``[re, im]`` pairs for a complex array."""
    a = np.asarray(a)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [complex_json(x) for x in a]
