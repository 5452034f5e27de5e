# hyperpower/dense.py
"""
Dense real and complex matrices and the handful of kernels the solver needs.

Matrices are plain C-ordered numpy arrays (float64 or complex128, complex
entries interleaved as (re, im)). Every kernel returns a fresh array marked
read-only, so a matrix never changes after it has been handed out.

Complex kernels are assembled from the real ones on the (re, im) parts. For
a complex matrix whose imaginary part is zero, this reproduces the real
kernels bit for bit, which is what lets the complex engine replay a real run
exactly.
"""
from __future__ import annotations

import math
from typing import Union

import numpy as np
import numpy.typing as npt

from .exceptions import NonFiniteError, ShapeError

RealMatrix = npt.NDArray[np.float64]
ComplexMatrix = npt.NDArray[np.complex128]
Matrix = Union[RealMatrix, ComplexMatrix]
Scalar = Union[float, complex]


def _freeze(arr):
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


def _parts(a):
    """Contiguous (re, im) float64 parts; im is None for real input."""
    if np.iscomplexobj(a):
        return np.ascontiguousarray(a.real), np.ascontiguousarray(a.imag)
    return a, None


def _combine(re, im):
    out = np.empty(re.shape, dtype=np.complex128)
    out.real = re
    out.imag = im
    return out


def is_complex(a) -> bool:
    return np.iscomplexobj(a)


def as_matrix(data, *, complex_: bool = False) -> Matrix:
    """
    Validate ``data`` and return it as a read-only 2-D float64 (or complex128)
    matrix. Complex data is kept complex even when ``complex_`` is False.
    """
    dtype = np.complex128 if complex_ or np.iscomplexobj(data) else np.float64
    try:
        arr = np.array(data, dtype=dtype, order="C")
    except (TypeError, ValueError) as exc:
        raise ShapeError("matrix data is not a rectangular numeric array: %s" % exc) from exc
    if arr.ndim != 2:
        raise ShapeError("expected a 2-D matrix, got %d dimension(s)" % arr.ndim)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("matrix contains NaN or infinite entries")
    return _freeze(arr)


def to_complex(a: Matrix) -> ComplexMatrix:
    return as_matrix(a, complex_=True)


def require_square(a: Matrix, what: str = "matrix") -> int:
    rows, cols = a.shape
    if rows != cols:
        raise ShapeError("%s must be square, got %dx%d" % (what, rows, cols))
    return rows


def _require_same_shape(a, b, op):
    if a.shape != b.shape:
        raise ShapeError("%s: shape mismatch %s vs %s" % (op, a.shape, b.shape))


def identity(n: int, *, complex_: bool = False) -> Matrix:
    return _freeze(np.eye(n, dtype=np.complex128 if complex_ else np.float64))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Matrix product. Complex products use four real products."""
    if a.shape[1] != b.shape[0]:
        raise ShapeError("matmul: %s cannot multiply %s" % (a.shape, b.shape))
    ar, ai = _parts(a)
    br, bi = _parts(b)
    if ai is None and bi is None:
        return _freeze(ar @ br)
    if ai is None:
        return _freeze(_combine(ar @ br, ar @ bi))
    if bi is None:
        return _freeze(_combine(ar @ br, ai @ br))
    return _freeze(_combine(ar @ br - ai @ bi, ar @ bi + ai @ br))


def adjoint(a: Matrix) -> Matrix:
    """Transpose, conjugated for complex input."""
    if np.iscomplexobj(a):
        return _freeze(a.conj().T)
    return _freeze(a.T)


def trace(a: Matrix) -> Scalar:
    require_square(a, "trace operand")
    ar, ai = _parts(a)
    re = float(np.trace(ar))
    if ai is None:
        return re
    return complex(re, float(np.trace(ai)))


def frob_inner(a: Matrix, b: Matrix) -> Scalar:
    """Frobenius inner product sum(conj(a_ij) * b_ij)."""
    _require_same_shape(a, b, "frob_inner")
    ar, ai = _parts(a)
    br, bi = _parts(b)
    re = float(np.dot(ar.ravel(), br.ravel()))
    if ai is None and bi is None:
        return re
    im = 0.0
    if ai is not None and bi is not None:
        re += float(np.dot(ai.ravel(), bi.ravel()))
    if bi is not None:
        im += float(np.dot(ar.ravel(), bi.ravel()))
    if ai is not None:
        im -= float(np.dot(ai.ravel(), br.ravel()))
    return complex(re, im)


def frob_norm(a: Matrix) -> float:
    return math.sqrt(frob_norm2(a))


def frob_norm2(a: Matrix) -> float:
    """Squared Frobenius norm, i.e. Re <a, a>."""
    value = frob_inner(a, a)
    return float(value.real) if isinstance(value, complex) else value


def affine_combine(c0: float, c1: float, c2: float, f: Matrix, f2: Matrix) -> Matrix:
    """c0*I + c1*F + c2*F2, entrywise; no matrix product is formed."""
    require_square(f, "F")
    _require_same_shape(f, f2, "affine_combine")
    out = c1 * f + c2 * f2
    out[np.diag_indices_from(out)] += c0
    return _freeze(out)


def identity_minus(m: Matrix) -> Matrix:
    """I - M."""
    require_square(m)
    out = -m
    out[np.diag_indices_from(out)] += 1.0
    return _freeze(out)


def scale(c: float, m: Matrix) -> Matrix:
    return _freeze(c * m)


def symmetry_defect(a: Matrix) -> float:
    """||A - A^T||_F (plain transpose, also for complex input)."""
    require_square(a)
    return frob_norm(_freeze(a - a.T))
