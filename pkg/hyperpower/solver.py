# hyperpower/solver.py
"""
Iteration engines for matrix inversion: SSHP2 (variable coefficients),
HP2 (classical Schultz) and HP3 (third-order hyper-power).

Every method starts from X0 = A* / (2 ||A||_F^2) and propagates the residual
F_k = I - A X_k by its own recurrence instead of recomputing it from A.
``iterate`` yields one IterationState per step so diagnostics can inspect
intermediate residuals; ``run`` folds those states into a SolveReport.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional

import numpy as np
from django.conf import settings

from . import coeff, dense
from .coeff import CoefficientResult, DenomMode
from .dense import Matrix
from .exceptions import DivergenceError, NonFiniteError, ShapeError, SingularInputError

logger = logging.getLogger(__name__)


class MethodKind(str, Enum):
    HP2 = "hp2"
    HP3 = "hp3"
    SSHP2 = "sshp2"


class StopReason(str, Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    STAGNATED = "stagnated"


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-10
    max_iter: int = 1000
    denom_tol: float = 1e-12
    denom_mode: DenomMode = DenomMode.ABSOLUTE
    record_trace: bool = True
    x0_scale: Optional[float] = None
    recompute_residual: bool = False
    stagnation_window: int = 25
    stagnation_factor: float = 0.999

    def __post_init__(self):
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError("epsilon must be a positive number, got %r" % (self.epsilon,))
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1, got %r" % (self.max_iter,))
        if not self.denom_tol > 0:
            raise ValueError("denom_tol must be positive, got %r" % (self.denom_tol,))
        if self.x0_scale is not None and not (self.x0_scale > 0 and math.isfinite(self.x0_scale)):
            raise ValueError("x0_scale must be a positive number, got %r" % (self.x0_scale,))
        if self.stagnation_window < 1 or not 0 < self.stagnation_factor <= 1:
            raise ValueError("invalid stagnation guard (%r, %r)"
                             % (self.stagnation_window, self.stagnation_factor))
        object.__setattr__(self, "denom_mode", DenomMode(self.denom_mode))

    @classmethod
    def from_settings(cls, *, is_complex=False, **overrides):
        """
        Defaults from Django settings, then ``overrides`` (None values are
        ignored so unset CLI flags and API fields fall through).
        """
        values = {
            "epsilon": getattr(settings, "HYPERPOWER_EPSILON", 1e-10),
            "max_iter": getattr(settings, "HYPERPOWER_MAX_ITER", 1000),
            "denom_tol": (getattr(settings, "HYPERPOWER_DENOM_TOL_COMPLEX", 1e-5) if is_complex
                          else getattr(settings, "HYPERPOWER_DENOM_TOL_REAL", 1e-12)),
            "stagnation_window": getattr(settings, "HYPERPOWER_STAGNATION_WINDOW", 25),
            "stagnation_factor": getattr(settings, "HYPERPOWER_STAGNATION_FACTOR", 0.999),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class IterationRecord:
    k: int
    alpha: Optional[float]
    beta: Optional[float]
    res_norm: float
    fallback: bool
    wall_ns: int


@dataclass(frozen=True)
class IterationState:
    """
    X_k and F_k together with the step taken from them. The terminal state
    has ``coeff`` None and ``stop_reason`` set; its X/F are the final ones.
    """
    k: int
    x: Matrix
    f: Matrix
    res_norm: float
    f2: Optional[Matrix] = None
    coeff: Optional[CoefficientResult] = None
    wall_ns: int = 0
    matmuls: int = 0
    stop_reason: Optional[StopReason] = None

    def record(self, method: MethodKind) -> IterationRecord:
        if method is MethodKind.HP3:
            alpha = beta = None
        else:
            alpha, beta = self.coeff.alpha, self.coeff.beta
        return IterationRecord(k=self.k, alpha=alpha, beta=beta, res_norm=self.res_norm,
                               fallback=self.coeff.fallback, wall_ns=self.wall_ns)


@dataclass(frozen=True)
class SolveReport:
    method: MethodKind
    x: Matrix
    final_res: float
    iterations: int
    converged: bool
    trace: tuple = ()
    matmul_count: int = 0
    stop_reason: StopReason = StopReason.CONVERGED
    x0_scale: float = 0.0
    fallback_count: int = 0
    wall_ns: int = 0
    is_complex: bool = False
    identity_gap: float = 0.0
    n: int = 0
    config: SolverConfig = field(default_factory=SolverConfig)


def initial_guess(a: Matrix, scale: Optional[float] = None) -> Matrix:
    """X0 = A* / (2 ||A||_F^2), or scale * A* when ``scale`` is given."""
    dense.require_square(a, "A")
    norm2 = dense.frob_norm2(a)
    if norm2 == 0.0:
        raise SingularInputError("A is the zero matrix and has no inverse")
    if scale is None:
        scale = 1.0 / (2.0 * norm2)
    elif not (scale > 0 and math.isfinite(scale)):
        raise ValueError("initial guess scale must be positive, got %r" % (scale,))
    return dense.scale(scale, dense.adjoint(a))


def compute_residual(a: Matrix, x: Matrix) -> Matrix:
    """F = I - A X."""
    dense.require_square(a, "A")
    if a.shape != x.shape:
        raise ShapeError("A is %s but X is %s" % (a.shape, x.shape))
    return dense.identity_minus(dense.matmul(a, x))


def sshp2_step(x: Matrix, f: Matrix, f2: Matrix, alpha: float, beta: float):
    """
    X_next = X((alpha+beta) I + beta F) with one product, and
    F_next = (1-(alpha+beta)) I + alpha F + beta F^2 with none.
    """
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise NonFiniteError("step coefficients must be finite, got (%r, %r)" % (alpha, beta))
    s = alpha + beta
    x_next = dense.matmul(x, dense.affine_combine(s, beta, 0.0, f, f2))
    f_next = dense.affine_combine(1.0 - s, alpha, beta, f, f2)
    return x_next, f_next


def hp2_step(x: Matrix, f: Matrix):
    """Schultz: X_next = X(I + F), F_next = F^2."""
    if x.shape != f.shape:
        raise ShapeError("X is %s but F is %s" % (x.shape, f.shape))
    x_next = dense.matmul(x, dense.affine_combine(1.0, 1.0, 0.0, f, f))
    return x_next, dense.matmul(f, f)


def hp3_step(x: Matrix, f: Matrix, f2: Matrix):
    """Hyper-power of degree 2: X_next = X(I + F + F^2), F_next = F^3."""
    if not (x.shape == f.shape == f2.shape):
        raise ShapeError("hp3_step operands differ in shape: %s %s %s" % (x.shape, f.shape, f2.shape))
    x_next = dense.matmul(x, dense.affine_combine(1.0, 1.0, 1.0, f, f2))
    return x_next, dense.matmul(f, f2)


_HP2_COEFF = CoefficientResult(alpha=0.0, beta=1.0, fallback=False, det=0.0)
_HP3_COEFF = CoefficientResult(alpha=math.nan, beta=math.nan, fallback=False, det=0.0)


def iterate(a: Matrix, method: MethodKind, cfg: SolverConfig) -> Iterator[IterationState]:
    """Yield one state per step, then a terminal state carrying the stop reason."""
    method = MethodKind(method)
    dense.require_square(a, "A")
    if dense.frob_norm2(a) == 0.0:
        raise SingularInputError("A is the zero matrix and has no inverse")

    x = initial_guess(a, cfg.x0_scale)
    f = compute_residual(a, x)
    # only SSHP2 is charged for the initial residual product
    matmuls = 1 if method is MethodKind.SSHP2 else 0
    norms = []
    k = 0
    while True:
        res_norm = dense.frob_norm(f)
        if not math.isfinite(res_norm):
            raise DivergenceError("%s diverged at iteration %d: residual is not finite" % (method.value, k))
        norms.append(res_norm)

        stop = None
        if res_norm < cfg.epsilon:
            stop = StopReason.CONVERGED
        elif k >= cfg.max_iter:
            stop = StopReason.MAX_ITER
        elif k >= cfg.stagnation_window and res_norm > cfg.stagnation_factor * norms[k - cfg.stagnation_window]:
            stop = StopReason.STAGNATED
        if stop is not None:
            yield IterationState(k=k, x=x, f=f, res_norm=res_norm, matmuls=matmuls, stop_reason=stop)
            return

        started = time.perf_counter_ns()
        with np.errstate(over="ignore", invalid="ignore"):
            if method is MethodKind.SSHP2:
                f2 = dense.matmul(f, f)
                try:
                    if not np.all(np.isfinite(f2)):
                        raise NonFiniteError("F^2 overflowed")
                    step = coeff.optimal_coefficients(f, f2, cfg.denom_tol, cfg.denom_mode)
                except NonFiniteError as e:
                    raise DivergenceError("%s diverged at iteration %d: %s" % (method.value, k, e)) from e
                x_next, f_next = sshp2_step(x, f, f2, step.alpha, step.beta)
                matmuls += 2
            elif method is MethodKind.HP2:
                f2 = None
                step = _HP2_COEFF
                x_next, f_next = hp2_step(x, f)
                matmuls += 2
            else:
                f2 = dense.matmul(f, f)
                step = _HP3_COEFF
                x_next, f_next = hp3_step(x, f, f2)
                matmuls += 3
            if cfg.recompute_residual:
                f_next = compute_residual(a, x_next)
                matmuls += 1
        wall_ns = time.perf_counter_ns() - started

        logger.debug("%s k=%d alpha=%r beta=%r res=%.6e fallback=%s",
                     method.value, k, step.alpha, step.beta, res_norm, step.fallback)
        yield IterationState(k=k, x=x, f=f, res_norm=res_norm, f2=f2, coeff=step,
                             wall_ns=wall_ns, matmuls=matmuls)
        x, f = x_next, f_next
        k += 1


def run(a: Matrix, method: MethodKind, cfg: Optional[SolverConfig] = None) -> SolveReport:
    """Run ``method`` on ``a`` until ||F_k||_F < epsilon, max_iter, or stagnation."""
    method = MethodKind(method)
    a = dense.as_matrix(a)
    if cfg is None:
        cfg = SolverConfig.from_settings(is_complex=dense.is_complex(a))
    n = dense.require_square(a, "A")
    logger.info("Starting %s on n=%d (%s, eps=%g)", method.value, n,
                "complex" if dense.is_complex(a) else "real", cfg.epsilon)

    started = time.perf_counter_ns()
    trace = []
    fallbacks = 0
    for state in iterate(a, method, cfg):
        if state.stop_reason is not None:
            final = state
            break
        if state.coeff.fallback:
            fallbacks += 1
        if cfg.record_trace:
            trace.append(state.record(method))
    wall_ns = time.perf_counter_ns() - started

    x0_scale = cfg.x0_scale if cfg.x0_scale is not None else 1.0 / (2.0 * dense.frob_norm2(a))
    report = SolveReport(
        method=method,
        x=final.x,
        final_res=final.res_norm,
        iterations=final.k,
        converged=final.stop_reason is StopReason.CONVERGED,
        trace=tuple(trace),
        matmul_count=final.matmuls,
        stop_reason=final.stop_reason,
        x0_scale=x0_scale,
        fallback_count=fallbacks,
        wall_ns=wall_ns,
        is_complex=dense.is_complex(a),
        identity_gap=dense.frob_norm(dense.identity_minus(final.f)),
        n=n,
        config=cfg,
    )
    if report.stop_reason is StopReason.STAGNATED:
        logger.warning("%s stagnated at ||F||=%.3e after %d iterations (idempotent limit?)",
                       method.value, report.final_res, report.iterations)
    if (method is MethodKind.SSHP2
            and report.iterations >= getattr(settings, "HYPERPOWER_FALLBACK_WARN_MIN_ITER", 4)
            and fallbacks > getattr(settings, "HYPERPOWER_FALLBACK_WARN_RATIO", 0.5) * report.iterations):
        logger.warning("%s fell back to Schultz steps in %d of %d iterations (n=%d, denom_tol=%g)",
                       method.value, fallbacks, report.iterations, n, cfg.denom_tol)
    logger.info("Finished %s: iterations=%d res=%.3e stop=%s fallbacks=%d",
                method.value, report.iterations, report.final_res,
                report.stop_reason.value, fallbacks)
    return report


def run_many(a: Matrix, methods, configure=None, max_workers=None):
    """
    Run several methods on the same matrix concurrently. Reports come back in
    the order of ``methods``. ``configure(method)`` returns each SolverConfig
    (default: settings for the matrix's field).
    """
    methods = [MethodKind(m) for m in methods]
    a = dense.as_matrix(a)
    if configure is None:
        base = SolverConfig.from_settings(is_complex=dense.is_complex(a))
        configure = lambda method: base  # noqa: E731
    with ThreadPoolExecutor(max_workers=max_workers or len(methods)) as pool:
        futures = [pool.submit(run, a, m, configure(m)) for m in methods]
        return [fut.result() for fut in futures]
