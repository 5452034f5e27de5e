# hyperpower/coeff.py
"""
Optimal step coefficients for the variable-coefficient Schultz iteration.

With U = I - F and V = I - F^2 the next residual is
``F_next = I - alpha*U - beta*V``, and minimizing ||F_next||_F over real
(alpha, beta) gives the 2x2 normal equations

    <U,U> alpha + <U,V> beta = Re tr U
    <U,V> alpha + <V,V> beta = Re tr V

(<.,.> is the real part of the Frobenius inner product, so the same system
serves complex residuals.)

Close to convergence U and V are nearly collinear, and c00*c11 - c01**2
cancels almost completely. The system is therefore also stored in the basis
(U, W) with W = V - U = F - F^2. That is a unimodular change of variables, so
the determinant is the same, but it can be formed without the cancellation.
The solve happens in that basis.
"""
from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from . import dense
from .dense import Matrix
from .exceptions import NonFiniteError

logger = logging.getLogger(__name__)

# det values below -NEGATIVE_DET_SLOP * max(1, c00*c11) cannot come from rounding
NEGATIVE_DET_SLOP = 1e-9
# a det within this many ulps of its two products is indistinguishable from 0
ROUNDING_FLOOR = 8 * sys.float_info.epsilon


class DenomMode(str, Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"


@dataclass(frozen=True)
class GramSystem:
    """
    The normal equations in the (U, V) basis. The (U, W) values are derived
    from them when not given; ``build_gram`` passes them in directly because
    forming them from c01 and c11 brings the cancellation back.
    """
    c00: float
    c01: float
    c11: float
    b1: float
    b2: float
    det: float
    dim: int
    # the same system in the (U, W) basis, W = F - F^2
    defect_cross: Optional[float] = None   # Re <U, W>
    defect_norm2: Optional[float] = None   # ||W||_F^2
    defect_trace: Optional[float] = None   # Re tr W

    def __post_init__(self):
        if self.defect_cross is None:
            object.__setattr__(self, "defect_cross", self.c01 - self.c00)
        if self.defect_norm2 is None:
            object.__setattr__(self, "defect_norm2", self.c11 - 2.0 * self.c01 + self.c00)
        if self.defect_trace is None:
            object.__setattr__(self, "defect_trace", self.b2 - self.b1)

    def scaled(self, factor: float) -> "GramSystem":
        """Every matrix and right-hand-side entry multiplied by ``factor``."""
        return GramSystem(
            c00=self.c00 * factor,
            c01=self.c01 * factor,
            c11=self.c11 * factor,
            b1=self.b1 * factor,
            b2=self.b2 * factor,
            det=self.det * factor * factor,
            dim=self.dim,
            defect_cross=self.defect_cross * factor,
            defect_norm2=self.defect_norm2 * factor,
            defect_trace=self.defect_trace * factor,
        )

    def values(self):
        return (self.c00, self.c01, self.c11, self.b1, self.b2, self.det,
                self.defect_cross, self.defect_norm2, self.defect_trace)


@dataclass(frozen=True)
class CoefficientResult:
    alpha: float
    beta: float
    fallback: bool
    det: float


def _re(value) -> float:
    return float(value.real) if isinstance(value, complex) else float(value)


def build_gram(f: Matrix, f2: Matrix) -> GramSystem:
    """Gram data of I - F and I - F^2; ``f2`` must be F @ F."""
    n = dense.require_square(f, "F")
    u = dense.identity_minus(f)
    v = dense.identity_minus(f2)
    w = dense.affine_combine(0.0, 1.0, -1.0, f, f2)

    c00 = dense.frob_norm2(u)
    c01 = _re(dense.frob_inner(u, v))
    c11 = dense.frob_norm2(v)
    b1 = n - _re(dense.trace(f))
    b2 = n - _re(dense.trace(f2))

    defect_cross = _re(dense.frob_inner(u, w))
    defect_norm2 = dense.frob_norm2(w)
    defect_trace = _re(dense.trace(w))
    det = c00 * defect_norm2 - defect_cross * defect_cross

    return GramSystem(
        c00=c00, c01=c01, c11=c11, b1=b1, b2=b2, det=det, dim=n,
        defect_cross=defect_cross, defect_norm2=defect_norm2, defect_trace=defect_trace,
    )


def solve_coefficients(g: GramSystem, denom_tol: float,
                       mode: DenomMode = DenomMode.ABSOLUTE) -> CoefficientResult:
    """
    Solve the Gram system for (alpha, beta).

    When |det| is below ``denom_tol`` the step falls back to plain Schultz,
    (alpha, beta) = (0, 1). In relative mode the test is
    |det| >= denom_tol * max(1, c00*c11).
    """
    if not denom_tol > 0:
        raise ValueError("denom_tol must be positive, got %r" % (denom_tol,))
    if not all(math.isfinite(v) for v in g.values()):
        raise NonFiniteError("Gram system has non-finite entries: %r" % (g,))

    mode = DenomMode(mode)
    scale = max(1.0, g.c00 * g.c11)
    det = g.det
    if det < 0.0:
        if det < -NEGATIVE_DET_SLOP * scale:
            logger.warning("Gram determinant %.3e is negative beyond rounding", det)
        det = 0.0
    if det <= ROUNDING_FLOOR * (g.c00 * g.defect_norm2 + g.defect_cross * g.defect_cross):
        det = 0.0

    threshold = denom_tol if mode is DenomMode.ABSOLUTE else denom_tol * scale
    if abs(det) < threshold:
        return CoefficientResult(alpha=0.0, beta=1.0, fallback=True, det=det)

    # Cramer's rule in the (U, W) basis: s = alpha + beta multiplies U
    s = (g.defect_norm2 * g.b1 - g.defect_cross * g.defect_trace) / det
    beta = (g.c00 * g.defect_trace - g.defect_cross * g.b1) / det
    alpha = s - beta
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise NonFiniteError("coefficients overflowed: alpha=%r beta=%r" % (alpha, beta))
    return CoefficientResult(alpha=alpha, beta=beta, fallback=False, det=det)


def optimal_coefficients(f: Matrix, f2: Matrix, denom_tol: float,
                         mode: DenomMode = DenomMode.ABSOLUTE) -> CoefficientResult:
    return solve_coefficients(build_gram(f, f2), denom_tol, mode)
