# hyperpower/oracle.py
"""
Independent checks on the SSHP2 iteration.

For a real A and X0 = c*A^T every residual F_k is symmetric, so the whole
iteration can be followed through the eigenvalues of F_k alone. This module
computes those eigenvalues with its own cyclic Jacobi solver, derives the
step coefficients from pairwise spectral sums, replays the scalar eigenvalue
recurrence, and evaluates the convergence identities of a finished run.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import List, NamedTuple, Optional

import numpy as np
from django.conf import settings

from . import dense, solver
from .coeff import DenomMode
from .dense import Matrix
from .exceptions import EigenvalueError
from .solver import MethodKind, SolveReport

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
SPECTRAL_DEGENERACY_TOL = 1e-12


class SpectrumCoefficients(NamedTuple):
    alpha: float
    beta: float
    degenerate: bool


@dataclass(frozen=True)
class SpectrumDiag:
    eigenvalues: np.ndarray
    alpha: float
    beta: float
    degenerate: bool


@dataclass(frozen=True)
class RecurrenceStep:
    lams: np.ndarray
    alpha: float
    beta: float
    degenerate: bool


@dataclass(frozen=True)
class InvariantCheck:
    name: str
    max_violation: float
    tolerance: float
    passed: bool
    worst_k: Optional[int]
    evaluated: int


@dataclass(frozen=True)
class InvariantReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def __getitem__(self, name) -> InvariantCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def names(self):
        return [check.name for check in self.checks]

    def failures(self):
        return [check for check in self.checks if not check.passed]


@dataclass(frozen=True)
class LimitDiagnostics:
    limit: float
    identity_gap: float
    predicted_identity_gap: Optional[float]

    @property
    def discrepancy(self) -> Optional[float]:
        if self.predicted_identity_gap is None:
            return None
        return abs(self.identity_gap - self.predicted_identity_gap)


# ---------- Eigenvalues ----------

def jacobi_eigenvalues(s: Matrix, tol: float = 1e-12, max_sweeps: Optional[int] = None) -> np.ndarray:
    """
    Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, sorted
    ascending. Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * ||S||_F``.
    """
    if np.iscomplexobj(s):
        raise EigenvalueError("Jacobi eigensolver needs a real symmetric matrix, got complex input")
    if not tol > 0:
        raise ValueError("tol must be positive, got %r" % (tol,))
    s = dense.as_matrix(s)
    n = dense.require_square(s)
    if max_sweeps is None:
        max_sweeps = getattr(settings, "HYPERPOWER_JACOBI_MAX_SWEEPS", 100)

    norm = dense.frob_norm(s)
    if dense.symmetry_defect(s) > SYMMETRY_TOL * norm:
        raise EigenvalueError("matrix is not symmetric (||S - S^T||_F = %.3e)" % dense.symmetry_defect(s))
    if norm == 0.0:
        return np.zeros(n)

    a = 0.5 * (s + s.T)
    target = tol * norm
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))
        if off < target:
            logger.debug("Jacobi converged after %d sweep(s), n=%d", sweep, n)
            return np.sort(np.diag(a))
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - sn * col_q
                a[:, q] = sn * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - sn * row_q
                a[q, :] = sn * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
    raise EigenvalueError("Jacobi did not converge within %d sweeps (off-diagonal %.3e)" % (max_sweeps, off))


def spectral_radius(lams) -> float:
    lams = np.asarray(lams, dtype=np.float64)
    return float(np.max(np.abs(lams))) if lams.size else 0.0


# ---------- Spectral coefficient formulas ----------

def spectral_sums(lams):
    """
    Pairwise sums (A, B, D) over i < j, with alpha = A/D and beta = B/D:

        A = -sum (1-l_i)(1-l_j)(l_i+l_j)(l_j-l_i)^2
        B =  sum (1-l_i)(1-l_j)(l_j-l_i)^2
        D =  sum (1-l_i)^2 (1-l_j)^2 (l_j-l_i)^2
    """
    lam = np.asarray(lams, dtype=np.float64)
    i, j = np.triu_indices(lam.size, 1)
    one_i, one_j = 1.0 - lam[i], 1.0 - lam[j]
    diff2 = (lam[j] - lam[i]) ** 2
    weight = one_i * one_j * diff2
    a_sum = -float(np.sum(weight * (lam[i] + lam[j])))
    b_sum = float(np.sum(weight))
    d_sum = float(np.sum(weight * one_i * one_j))
    return a_sum, b_sum, d_sum


def coeffs_from_spectrum(lams, tol: float = SPECTRAL_DEGENERACY_TOL,
                         mode: DenomMode = DenomMode.RELATIVE) -> SpectrumCoefficients:
    """
    (alpha, beta, degenerate) from the eigenvalues of a symmetric residual.
    Degenerate when D < tol * (sum (1-l_i)^2)^2, or D < tol in absolute mode;
    a degenerate spectrum gets the Schultz step (0, 1).
    """
    lam = np.asarray(lams, dtype=np.float64).ravel()
    if lam.size == 0:
        raise ValueError("eigenvalue list is empty")
    a_sum, b_sum, d_sum = spectral_sums(lam)
    if DenomMode(mode) is DenomMode.RELATIVE:
        threshold = tol * float(np.sum((1.0 - lam) ** 2)) ** 2
    else:
        threshold = tol
    if d_sum <= 0.0 or d_sum < threshold:
        return SpectrumCoefficients(0.0, 1.0, True)
    return SpectrumCoefficients(a_sum / d_sum, b_sum / d_sum, False)


def spectrum_diag(f: Matrix, tol: float = SPECTRAL_DEGENERACY_TOL) -> SpectrumDiag:
    lams = jacobi_eigenvalues(f)
    alpha, beta, degenerate = coeffs_from_spectrum(lams, tol)
    return SpectrumDiag(eigenvalues=lams, alpha=alpha, beta=beta, degenerate=degenerate)


def scalar_recurrence(lams0, steps: int, tol: float = SPECTRAL_DEGENERACY_TOL,
                      mode: DenomMode = DenomMode.RELATIVE) -> List[RecurrenceStep]:
    """
    SSHP2 played out on eigenvalues alone:
    l <- 1 - (alpha+beta) + alpha*l + beta*l^2, with the coefficients of the
    current spectrum. Each entry holds the spectrum after the step and the
    coefficients that produced it.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative, got %r" % (steps,))
    lam = np.array(lams0, dtype=np.float64).ravel()
    out = []
    for _ in range(steps):
        alpha, beta, degenerate = coeffs_from_spectrum(lam, tol, mode)
        # written around l = 1 so that an eigenvalue 1 stays exactly 1
        lam = 1.0 + alpha * (lam - 1.0) + beta * (lam * lam - 1.0)
        out.append(RecurrenceStep(lams=lam.copy(), alpha=alpha, beta=beta, degenerate=degenerate))
    return out


def beta_trace_form(f: Matrix) -> Optional[float]:
    """
    beta from traces of F alone, valid right after a non-fallback step:
    ||I-F||^2 tr(F^2-F^3) / (||I-F||^2 ||F-F^2||^2 - tr(F^2-F^3)^2).
    None when the denominator vanishes.
    """
    f2 = dense.matmul(f, f)
    f3 = dense.matmul(f, f2)
    gap2 = dense.frob_norm2(dense.identity_minus(f))
    t = float(np.real(dense.trace(f2) - dense.trace(f3)))
    denom = gap2 * dense.frob_norm2(dense.affine_combine(0.0, 1.0, -1.0, f, f2)) - t * t
    if denom <= 0.0:
        return None
    return gap2 * t / denom


def limit_diagnostics(report: SolveReport) -> LimitDiagnostics:
    """
    Observed limit L of ||F_k||_F next to ||I - F_k||_F and sqrt(n - L^2),
    which agree for a symmetric run whose last step was not a fallback.
    """
    limit = report.final_res
    rest = report.n - limit * limit
    predicted = math.sqrt(rest) if rest >= 0.0 else None
    return LimitDiagnostics(limit=limit, identity_gap=report.identity_gap,
                            predicted_identity_gap=predicted)


# ---------- Invariant battery ----------

class _Tally:
    def __init__(self, name, tolerance):
        self.name = name
        self.tolerance = tolerance
        self.worst = 0.0
        self.worst_k = None
        self.count = 0

    def add(self, k, violation):
        self.count += 1
        if not math.isfinite(violation):
            violation = math.inf
        if self.worst_k is None or violation > self.worst:
            self.worst = violation
            self.worst_k = k

    def result(self) -> InvariantCheck:
        return InvariantCheck(name=self.name, max_violation=self.worst, tolerance=self.tolerance,
                              passed=self.worst <= self.tolerance, worst_k=self.worst_k,
                              evaluated=self.count)


def _trace_product(a, b) -> float:
    """tr(AB) without forming AB."""
    return float(np.real(np.einsum("ij,ji->", a, b)))


def _relative_gap(x, y) -> float:
    scale = max(abs(x), abs(y))
    return 0.0 if scale == 0.0 else abs(x - y) / scale


def check_invariants(report: SolveReport, a: Matrix, *, spectral: bool = True) -> InvariantReport:
    """
    Re-run the iteration behind ``report`` and evaluate the convergence
    identities on every intermediate residual. ``spectral=False`` skips the
    eigenvalue-based checks (they cost one Jacobi solve per iteration).
    """
    if report.iterations > 0 and not report.trace:
        raise ValueError("report has no iteration trace; solve with record_trace=True")
    a = dense.as_matrix(a)
    n = dense.require_square(a, "A")
    cfg = report.config
    states = list(solver.iterate(a, report.method, cfg))
    steps = states[:-1]
    final = states[-1]
    norms = [state.res_norm for state in states]
    sshp2 = report.method is MethodKind.SSHP2
    symmetric = sshp2 and not dense.is_complex(a)

    def fallback(k):
        return steps[k].coeff.fallback

    monotonicity = _Tally("monotonicity", 1e-9 * n)
    domination = _Tally("schultz_domination", 1e-9 * n)
    orthogonality = _Tally("orthogonality", 1e-8 * n)
    trace_ids = _Tally("trace_identities", 1e-8 * n)
    decrement = _Tally("decrement_identity", 1e-7 * n)
    coef_sum = _Tally("coefficient_sum", 1e-8)
    coef_limits = _Tally("coefficient_limits", 1e-2)
    correctness = _Tally("correctness", cfg.epsilon)
    consistency = _Tally("residual_consistency", 1e-8 * n)
    agreement = _Tally("complex_real_agreement", 1e-12)
    oracle_agree = _Tally("oracle_agreement", 1e-6)
    bounds = _Tally("spectral_bounds", 1e-8)
    numerator = _Tally("numerator_identity", 1e-7)
    twin = _Tally("recurrence_agreement", 1e-6)
    beta_form = _Tally("beta_trace_form", 1e-6)
    identity_limit = _Tally("identity_limit", 1e-8 * n)

    for k, state in enumerate(steps):
        nxt = states[k + 1]
        step = state.coeff
        if sshp2 and not step.fallback:
            monotonicity.add(k, max(0.0, nxt.res_norm - state.res_norm))
            domination.add(k, max(0.0, nxt.res_norm - dense.frob_norm(state.f2)))
        if not symmetric:
            continue
        if not step.fallback:
            gap = dense.identity_minus(state.f)
            gap2 = dense.identity_minus(state.f2)
            orthogonality.add(k, max(abs(_trace_product(nxt.f, gap)), abs(_trace_product(nxt.f, gap2))))
        if k >= 1 and not fallback(k - 1):
            coef_sum.add(k, max(0.0, 1.0 - (step.alpha + step.beta)))
            if not step.fallback:
                lhs = norms[k] ** 2 - norms[k + 1] ** 2
                rhs = (step.alpha + step.beta - 1.0) * dense.frob_norm2(dense.identity_minus(state.f))
                decrement.add(k, abs(lhs - rhs))
                if state.res_norm >= 1e-3:
                    beta = beta_trace_form(state.f)
                    beta_form.add(k, math.inf if beta is None
                                  else abs(beta - step.beta) / max(1.0, abs(step.beta)))
        if report.converged and not step.fallback and state.res_norm <= 1e-3:
            coef_limits.add(k, max(abs(step.alpha), abs(step.beta - 1.0)))

    if symmetric:
        for k in range(1, len(states)):
            if fallback(k - 1):
                continue
            f = states[k].f
            norm2 = norms[k] ** 2
            trace_ids.add(k, max(abs(norm2 - dense.trace(f)),
                                 abs(norm2 + dense.frob_norm2(dense.identity_minus(f)) - n)))
        if steps and not fallback(len(steps) - 1):
            diag = limit_diagnostics(report)
            if diag.discrepancy is not None:
                identity_limit.add(final.k, diag.discrepancy)

    if report.converged:
        correctness.add(final.k, dense.frob_norm(solver.compute_residual(a, final.x)))

    if np.linalg.cond(a) <= 1e6:
        for state in states:
            drift = dense.frob_norm(solver.compute_residual(a, state.x) - state.f)
            consistency.add(state.k, drift)

    if not dense.is_complex(a):
        replay = solver.run(dense.to_complex(a), report.method, replace(cfg, record_trace=True))
        real_trace = [state.record(report.method) for state in steps]
        if len(replay.trace) != len(real_trace):
            agreement.add(0, math.inf)
        for real, cplx in zip(real_trace, replay.trace):
            gaps = [_relative_gap(real.res_norm, cplx.res_norm)]
            if real.alpha is not None:
                gaps += [_relative_gap(real.alpha, cplx.alpha), _relative_gap(real.beta, cplx.beta)]
            agreement.add(real.k, max(gaps))

    if symmetric and spectral:
        _spectral_checks(states, cfg, oracle_agree, bounds, numerator, twin)

    tallies = (monotonicity, domination, orthogonality, trace_ids, decrement, coef_sum,
               coef_limits, correctness, consistency, agreement, oracle_agree, bounds,
               numerator, twin, beta_form, identity_limit)
    result = InvariantReport(checks=tuple(t.result() for t in tallies))
    for check in result.failures():
        logger.warning("invariant %s failed: %.3e > %.3e at k=%s",
                       check.name, check.max_violation, check.tolerance, check.worst_k)
    return result


def _spectral_checks(states, cfg, oracle_agree, bounds, numerator, twin):
    steps = states[:-1]
    spectra = []
    for state in states:
        if state.res_norm < 1e-8:
            break
        spectra.append(jacobi_eigenvalues(state.f))
    if not spectra:
        return

    # same degeneracy test as the Gram solve so both paths take the same steps
    replay = scalar_recurrence(spectra[0], len(spectra) - 1, tol=cfg.denom_tol, mode=cfg.denom_mode)
    for k in range(1, len(spectra)):
        twin.add(k, float(np.max(np.abs(spectra[k] - np.sort(replay[k - 1].lams)))))

    for k, lams in enumerate(spectra):
        if k < len(steps):
            step = steps[k].coeff
            alpha, beta, degenerate = coeffs_from_spectrum(lams)
            if not (degenerate or step.fallback):
                oracle_agree.add(k, max(abs(alpha - step.alpha) / max(1.0, abs(step.alpha)),
                                        abs(beta - step.beta) / max(1.0, abs(step.beta))))
            r = spectral_radius(lams)
            if r < 1.0:
                excess = max(abs(step.alpha) - 2.0 * r / (1.0 - r) ** 2,
                             (1.0 + r) ** -2 - step.beta,
                             step.beta - (1.0 - r) ** -2)
                bounds.add(k, max(0.0, excess) / max(1.0, (1.0 - r) ** -2))
        if k >= 1 and not steps[k - 1].coeff.fallback:
            a_sum, b_sum, d_sum = spectral_sums(lams)
            t = float(np.sum(lams ** 2 - lams ** 3))
            numerator.add(k, abs(a_sum + b_sum - d_sum - t * t) / max(1.0, abs(a_sum) + abs(b_sum) + abs(d_sum)))
