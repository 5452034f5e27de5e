# hyperpower/matrix_io.py
"""
Matrix Market exchange and trace export.

Supported headers: ``%%MatrixMarket matrix <array|coordinate>
<real|integer|complex> <general|symmetric>``. Indices are 1-based, ``array``
entries are column-major, and symmetric files store the lower triangle only.
Values are written with 17 significant digits so every float64 survives a
write/read cycle unchanged.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from enum import Enum
from pathlib import Path

import numpy as np
from rest_framework.renderers import JSONRenderer

from . import dense
from .dense import Matrix
from .exceptions import MatrixMarketError
from .serializers import SolveReportSerializer
from .solver import SolveReport

logger = logging.getLogger(__name__)

BANNER = "%%MatrixMarket"
TRACE_COLUMNS = ("k", "alpha", "beta", "res_norm", "fallback", "wall_ns")
FLOAT_FORMAT = "%.17g"


class TraceFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class Layout(str, Enum):
    ARRAY = "array"
    COORDINATE = "coordinate"


# ---------- Reading ----------

def _data_lines(lines, start):
    """Yield (lineno, tokens) for non-blank, non-comment lines."""
    for lineno, line in enumerate(lines, start=start):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        yield lineno, stripped.split()


def _parse_header(line):
    tokens = line.split()
    if not tokens or tokens[0] != BANNER:
        raise MatrixMarketError("missing %s banner" % BANNER, 1)
    if len(tokens) != 5 or tokens[1].lower() != "matrix":
        raise MatrixMarketError("header must read '%s matrix <format> <field> <symmetry>'" % BANNER, 1)
    layout, field, symmetry = (t.lower() for t in tokens[2:])
    if layout not in ("array", "coordinate"):
        raise MatrixMarketError("unsupported format %r" % layout, 1)
    if field not in ("real", "integer", "complex"):
        raise MatrixMarketError("unsupported field %r" % field, 1)
    if symmetry not in ("general", "symmetric"):
        raise MatrixMarketError("unsupported symmetry %r" % symmetry, 1)
    return Layout(layout), field == "complex", symmetry == "symmetric"


def _parse_int(token, lineno, what):
    try:
        return int(token)
    except ValueError:
        raise MatrixMarketError("%s is not an integer: %r" % (what, token), lineno) from None


def _parse_value(tokens, lineno, is_complex):
    expected = 2 if is_complex else 1
    if len(tokens) != expected:
        raise MatrixMarketError("expected %d value(s), got %d" % (expected, len(tokens)), lineno)
    try:
        parts = [float(t) for t in tokens]
    except ValueError:
        bad = next(t for t in tokens if not _is_float(t))
        logger.warning("Rejected Matrix Market token %r on line %d", bad, lineno)
        raise MatrixMarketError("non-numeric value %r" % bad, lineno) from None
    if not all(math.isfinite(p) for p in parts):
        raise MatrixMarketError("value is not finite", lineno)
    return complex(parts[0], parts[1]) if is_complex else parts[0]


def _is_float(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def _array_positions(rows, cols, symmetric):
    for j in range(cols):
        for i in range(j if symmetric else 0, rows):
            yield i, j


def parse_matrix_market(text: str) -> Matrix:
    """Parse Matrix Market text into a dense matrix."""
    lines = text.splitlines()
    if not lines:
        raise MatrixMarketError("empty input", None)
    layout, is_complex, symmetric = _parse_header(lines[0])
    body = _data_lines(lines[1:], start=2)

    try:
        lineno, size = next(body)
    except StopIteration:
        raise MatrixMarketError("missing size line", None) from None
    expected = 2 if layout is Layout.ARRAY else 3
    if len(size) != expected:
        raise MatrixMarketError("size line needs %d integers, got %d" % (expected, len(size)), lineno)
    rows = _parse_int(size[0], lineno, "row count")
    cols = _parse_int(size[1], lineno, "column count")
    if rows < 1 or cols < 1:
        raise MatrixMarketError("matrix dimensions must be positive, got %dx%d" % (rows, cols), lineno)
    if symmetric and rows != cols:
        raise MatrixMarketError("symmetric matrix must be square, got %dx%d" % (rows, cols), lineno)

    out = np.zeros((rows, cols), dtype=np.complex128 if is_complex else np.float64)
    if layout is Layout.ARRAY:
        positions = _array_positions(rows, cols, symmetric)
        count = rows * (rows + 1) // 2 if symmetric else rows * cols
        for _ in range(count):
            try:
                lineno, tokens = next(body)
            except StopIteration:
                raise MatrixMarketError("file ended after fewer than %d entries" % count, None) from None
            i, j = next(positions)
            out[i, j] = _parse_value(tokens, lineno, is_complex)
    else:
        nnz = _parse_int(size[2], lineno, "entry count")
        if nnz < 0:
            raise MatrixMarketError("entry count must be non-negative", lineno)
        seen = set()
        for _ in range(nnz):
            try:
                lineno, tokens = next(body)
            except StopIteration:
                raise MatrixMarketError("file ended after fewer than %d entries" % nnz, None) from None
            if len(tokens) < 3:
                raise MatrixMarketError("coordinate entry needs 'i j value'", lineno)
            i = _parse_int(tokens[0], lineno, "row index") - 1
            j = _parse_int(tokens[1], lineno, "column index") - 1
            if not (0 <= i < rows and 0 <= j < cols):
                raise MatrixMarketError("index (%d, %d) outside %dx%d" % (i + 1, j + 1, rows, cols), lineno)
            if symmetric and i < j:
                raise MatrixMarketError("symmetric file lists (%d, %d) above the diagonal" % (i + 1, j + 1), lineno)
            if (i, j) in seen:
                raise MatrixMarketError("duplicate entry (%d, %d)" % (i + 1, j + 1), lineno)
            seen.add((i, j))
            out[i, j] = _parse_value(tokens[2:], lineno, is_complex)

    extra = next(body, None)
    if extra is not None:
        raise MatrixMarketError("unexpected data after the last entry", extra[0])

    if symmetric:
        lower = np.tril(out, -1)
        out = out + lower.T
    return dense.as_matrix(out)


def read_matrix_market(path) -> Matrix:
    text = Path(path).read_text(encoding="utf-8")
    m = parse_matrix_market(text)
    logger.info("Read %dx%d %s matrix from %s", m.shape[0], m.shape[1],
                "complex" if dense.is_complex(m) else "real", path)
    return m


# ---------- Writing ----------

def _format_value(v, is_complex):
    if is_complex:
        return "%s %s" % (FLOAT_FORMAT % v.real, FLOAT_FORMAT % v.imag)
    return FLOAT_FORMAT % v


def format_matrix_market(m: Matrix, layout: Layout = Layout.ARRAY) -> str:
    """Matrix Market text for ``m`` (general symmetry)."""
    m = dense.as_matrix(m)
    layout = Layout(layout)
    is_complex = dense.is_complex(m)
    rows, cols = m.shape
    field = "complex" if is_complex else "real"
    out = ["%s matrix %s %s general" % (BANNER, layout.value, field)]
    if layout is Layout.ARRAY:
        out.append("%d %d" % (rows, cols))
        # column-major
        out.extend(_format_value(v, is_complex) for v in m.T.ravel())
    else:
        entries = [(i, j) for j in range(cols) for i in range(rows) if m[i, j] != 0]
        out.append("%d %d %d" % (rows, cols, len(entries)))
        out.extend("%d %d %s" % (i + 1, j + 1, _format_value(m[i, j], is_complex)) for i, j in entries)
    return "\n".join(out) + "\n"


def write_matrix_market(m: Matrix, path, layout: Layout = Layout.ARRAY) -> None:
    Path(path).write_text(format_matrix_market(m, layout), encoding="utf-8")
    logger.info("Wrote %dx%d matrix to %s", m.shape[0], m.shape[1], path)


# ---------- Trace export ----------

def _csv_float(value):
    return "" if value is None else FLOAT_FORMAT % value


def trace_to_csv(report: SolveReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for rec in report.trace:
        writer.writerow([rec.k, _csv_float(rec.alpha), _csv_float(rec.beta), _csv_float(rec.res_norm),
                         "true" if rec.fallback else "false", rec.wall_ns])
    return buf.getvalue()


def trace_to_json(report: SolveReport, seed=None) -> bytes:
    """The serialized SolveReport plus a ``meta`` block (method, n, epsilon, seed)."""
    data = dict(SolveReportSerializer(report).data)
    data["meta"] = {
        "method": report.method.value,
        "n": report.n,
        "epsilon": report.config.epsilon,
        "seed": seed,
    }
    return JSONRenderer().render(data)


def export_trace(report: SolveReport, fmt, path, seed=None) -> None:
    fmt = TraceFormat(fmt)
    if fmt is TraceFormat.CSV:
        Path(path).write_text(trace_to_csv(report), encoding="utf-8")
    else:
        Path(path).write_bytes(trace_to_json(report, seed))
    logger.info("Exported %d trace rows as %s to %s", len(report.trace), fmt.value, path)
