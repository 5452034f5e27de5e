import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from hyperpower import coeff, dense, oracle, solver
from hyperpower.coeff import DenomMode
from hyperpower.exceptions import EigenvalueError
from hyperpower.generators import GeneratorKind, GeneratorSpec, generate_matrix
from hyperpower.solver import MethodKind, SolverConfig

EXPECTED_CHECKS = [
    "monotonicity", "schultz_domination", "orthogonality", "trace_identities", "decrement_identity",
    "coefficient_sum", "coefficient_limits", "correctness", "residual_consistency",
    "complex_real_agreement", "oracle_agreement", "spectral_bounds", "numerator_identity",
    "recurrence_agreement", "beta_trace_form", "identity_limit",
]


def symmetric_with_spectrum(lams, seed):
    """Q diag(lams) Q^T for a random orthogonal Q."""
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.uniform(-1.0, 1.0, size=(len(lams), len(lams))))
    s = (q * np.asarray(lams)) @ q.T
    return dense.as_matrix(0.5 * (s + s.T))


class JacobiTests(SimpleTestCase):

    def test_diagonal(self):
        np.testing.assert_allclose(oracle.jacobi_eigenvalues(np.diag([0.9, 0.6])), [0.6, 0.9])

    def test_swap(self):
        np.testing.assert_allclose(oracle.jacobi_eigenvalues([[0.0, 1.0], [1.0, 0.0]]), [-1.0, 1.0],
                                   atol=1e-14)

    def test_two_by_two(self):
        np.testing.assert_allclose(oracle.jacobi_eigenvalues([[2.0, 1.0], [1.0, 2.0]]), [1.0, 3.0],
                                   atol=1e-14)

    def test_zero_matrix(self):
        np.testing.assert_array_equal(oracle.jacobi_eigenvalues(np.zeros((3, 3))), np.zeros(3))

    def test_rejects_asymmetric(self):
        with self.assertRaises(EigenvalueError):
            oracle.jacobi_eigenvalues([[1.0, 2.0], [0.0, 1.0]])

    def test_rejects_complex(self):
        with self.assertRaises(EigenvalueError):
            oracle.jacobi_eigenvalues(dense.as_matrix([[1.0]], complex_=True))

    def test_sweep_limit(self):
        s = generate_matrix(GeneratorSpec(GeneratorKind.SYMMETRIC, 8, seed=1))
        with self.assertRaises(EigenvalueError):
            oracle.jacobi_eigenvalues(s, max_sweeps=0)

    def test_rejects_bad_tolerance(self):
        with self.assertRaises(ValueError):
            oracle.jacobi_eigenvalues(np.eye(2), tol=0.0)

    @given(n=st.integers(1, 12), seed=st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_trace_and_norm_are_preserved(self, n, seed):
        rng = np.random.default_rng(seed)
        b = rng.uniform(-1.0, 1.0, size=(n, n))
        s = dense.as_matrix(0.5 * (b + b.T))
        lams = oracle.jacobi_eigenvalues(s)
        scale = max(1.0, dense.frob_norm2(s))
        self.assertTrue(np.all(np.diff(lams) >= 0))
        self.assertAlmostEqual(float(np.sum(lams)), dense.trace(s), delta=1e-10 * scale)
        self.assertAlmostEqual(float(np.sum(lams ** 2)), dense.frob_norm2(s), delta=1e-10 * scale)
        np.testing.assert_allclose(lams, np.linalg.eigvalsh(s), atol=1e-10 * scale)


class SpectralCoefficientTests(SimpleTestCase):

    def test_reference_pair(self):
        alpha, beta, degenerate = oracle.coeffs_from_spectrum([0.9, 0.6])
        self.assertFalse(degenerate)
        self.assertAlmostEqual(alpha, -37.5, delta=1e-12 * 37.5)
        self.assertAlmostEqual(beta, 25.0, delta=1e-12 * 25.0)

    def test_repeated_eigenvalue_is_degenerate(self):
        for c in (0.3, -0.7, 0.0):
            self.assertEqual(tuple(oracle.coeffs_from_spectrum([c, c])), (0.0, 1.0, True))

    def test_single_eigenvalue_is_degenerate(self):
        self.assertEqual(tuple(oracle.coeffs_from_spectrum([0.4])), (0.0, 1.0, True))

    def test_empty_spectrum(self):
        with self.assertRaises(ValueError):
            oracle.coeffs_from_spectrum([])

    def test_absolute_mode(self):
        # D = 0.000144 for {0.9, 0.6}
        self.assertTrue(oracle.coeffs_from_spectrum([0.9, 0.6], tol=1e-3, mode=DenomMode.ABSOLUTE).degenerate)
        self.assertFalse(oracle.coeffs_from_spectrum([0.9, 0.6], tol=1e-5, mode=DenomMode.ABSOLUTE).degenerate)

    def test_spectral_sums(self):
        a_sum, b_sum, d_sum = oracle.spectral_sums([0.9, 0.6])
        self.assertAlmostEqual(a_sum, -0.1 * 0.4 * 1.5 * 0.09, delta=1e-16)
        self.assertAlmostEqual(b_sum, 0.1 * 0.4 * 0.09, delta=1e-16)
        self.assertAlmostEqual(d_sum, 0.000144, delta=1e-17)

    def test_spectrum_diag(self):
        diag = oracle.spectrum_diag(symmetric_with_spectrum([0.9, 0.6], seed=3))
        np.testing.assert_allclose(diag.eigenvalues, [0.6, 0.9], atol=1e-13)
        self.assertAlmostEqual(diag.alpha, -37.5, delta=1e-8)
        self.assertAlmostEqual(diag.beta, 25.0, delta=1e-8)

    def test_spectrum_diag_refuses_complex(self):
        with self.assertRaises(EigenvalueError):
            oracle.spectrum_diag(dense.to_complex(dense.identity(2)))

    def test_agrees_with_gram_solve(self):
        rng = np.random.default_rng(2024)
        checked = 0
        for _ in range(100):
            n = int(rng.integers(2, 11))
            lams = rng.uniform(-0.95, 0.95, size=n)
            f = symmetric_with_spectrum(lams, int(rng.integers(0, 2 ** 32)))
            gram = coeff.optimal_coefficients(f, dense.matmul(f, f), 1e-12)
            spectral = oracle.coeffs_from_spectrum(oracle.jacobi_eigenvalues(f))
            if gram.fallback or spectral.degenerate:
                continue
            checked += 1
            self.assertAlmostEqual(spectral.alpha, gram.alpha, delta=1e-6 * max(1.0, abs(gram.alpha)))
            self.assertAlmostEqual(spectral.beta, gram.beta, delta=1e-6 * max(1.0, abs(gram.beta)))
        self.assertGreater(checked, 90)

    def test_beta_trace_form_after_a_step(self):
        a = generate_matrix(GeneratorSpec(GeneratorKind.SPD, 6, seed=12))
        states = list(solver.iterate(a, MethodKind.SSHP2, SolverConfig()))
        state = states[1]
        self.assertFalse(states[0].coeff.fallback)
        self.assertAlmostEqual(oracle.beta_trace_form(state.f), state.coeff.beta,
                               delta=1e-6 * max(1.0, abs(state.coeff.beta)))

    def test_beta_trace_form_degenerate(self):
        self.assertIsNone(oracle.beta_trace_form(dense.as_matrix(0.5 * np.eye(3))))


class ScalarRecurrenceTests(SimpleTestCase):

    def test_two_eigenvalues_vanish_in_one_step(self):
        steps = oracle.scalar_recurrence([0.9, 0.6], 1)
        self.assertEqual(len(steps), 1)
        np.testing.assert_allclose(steps[0].lams, [0.0, 0.0], atol=1e-12)
        self.assertAlmostEqual(steps[0].alpha, -37.5, delta=1e-10)

    def test_single_eigenvalue_squares(self):
        steps = oracle.scalar_recurrence([0.5], 3)
        self.assertEqual([s.lams[0] for s in steps], [0.25, 0.0625, 0.00390625])
        self.assertTrue(all(s.degenerate for s in steps))

    def test_eigenvalue_one_is_fixed(self):
        steps = oracle.scalar_recurrence([1.0, 0.3, -0.2], 10)
        self.assertTrue(all(s.lams[0] == 1.0 for s in steps))

    def test_zero_steps(self):
        self.assertEqual(oracle.scalar_recurrence([0.9, 0.6], 0), [])

    def test_negative_steps(self):
        with self.assertRaises(ValueError):
            oracle.scalar_recurrence([0.9], -1)

    def test_matches_matrix_run(self):
        a = generate_matrix(GeneratorSpec(GeneratorKind.SYMMETRIC, 7, seed=21))
        cfg = SolverConfig()
        states = list(solver.iterate(a, MethodKind.SSHP2, cfg))
        spectra = [oracle.jacobi_eigenvalues(s.f) for s in states if s.res_norm >= 1e-8]
        replay = oracle.scalar_recurrence(spectra[0], len(spectra) - 1, tol=cfg.denom_tol, mode=cfg.denom_mode)
        for k in range(1, len(spectra)):
            np.testing.assert_allclose(spectra[k], np.sort(replay[k - 1].lams), atol=1e-6)


class LimitDiagnosticsTests(SimpleTestCase):

    def test_converged_run(self):
        report = solver.run(dense.as_matrix(np.diag([1.0, 2.0])), MethodKind.SSHP2, SolverConfig())
        diag = oracle.limit_diagnostics(report)
        self.assertLess(diag.limit, 1e-10)
        self.assertAlmostEqual(diag.predicted_identity_gap, math.sqrt(2), delta=1e-12)
        self.assertLess(diag.discrepancy, 1e-10)

    def test_idempotent_limit(self):
        report = solver.run(dense.as_matrix(np.diag([1.0, 0.0])), MethodKind.SSHP2, SolverConfig())
        diag = oracle.limit_diagnostics(report)
        self.assertAlmostEqual(diag.limit, 1.0, delta=1e-12)
        self.assertAlmostEqual(diag.identity_gap, 1.0, delta=1e-12)
        self.assertAlmostEqual(diag.predicted_identity_gap, 1.0, delta=1e-12)


class CheckInvariantsTests(SimpleTestCase):

    def assertAllPass(self, result):
        failures = ["%s: %.3e > %.3e at k=%s" % (c.name, c.max_violation, c.tolerance, c.worst_k)
                    for c in result.failures()]
        self.assertEqual(failures, [])

    def test_every_check_appears_once(self):
        report = solver.run(dense.as_matrix(np.diag([1.0, 2.0])), MethodKind.SSHP2, SolverConfig())
        result = oracle.check_invariants(report, np.diag([1.0, 2.0]))
        self.assertEqual(result.names(), EXPECTED_CHECKS)

    def test_diag_run(self):
        a = dense.as_matrix(np.diag([1.0, 2.0]))
        report = solver.run(a, MethodKind.SSHP2, SolverConfig())
        result = oracle.check_invariants(report, a)
        self.assertAllPass(result)
        self.assertLessEqual(result["orthogonality"].max_violation, 1e-12)
        self.assertEqual(result["orthogonality"].evaluated, 1)

    def test_scalar_run_is_vacuous(self):
        a = dense.as_matrix([[2.0]])
        report = solver.run(a, MethodKind.SSHP2, SolverConfig())
        result = oracle.check_invariants(report, a)
        self.assertAllPass(result)
        for name in ("orthogonality", "trace_identities", "decrement_identity", "coefficient_sum"):
            self.assertEqual(result[name].evaluated, 0, name)

    def test_random_spd(self):
        a = generate_matrix(GeneratorSpec(GeneratorKind.SPD, 20, seed=42))
        report = solver.run(a, MethodKind.SSHP2, SolverConfig())
        result = oracle.check_invariants(report, a)
        self.assertAllPass(result)
        self.assertGreater(result["decrement_identity"].evaluated, 0)

    def test_baseline_methods(self):
        a = generate_matrix(GeneratorSpec(GeneratorKind.SPD, 10, seed=4))
        for method in (MethodKind.HP2, MethodKind.HP3):
            report = solver.run(a, method, SolverConfig())
            result = oracle.check_invariants(report, a)
            self.assertAllPass(result)
            self.assertEqual(result["orthogonality"].evaluated, 0)
            self.assertEqual(result["correctness"].evaluated, 1)

    def test_complex_input_skips_symmetric_checks(self):
        a = generate_matrix(GeneratorSpec(GeneratorKind.RANDOM_COMPLEX, 6, seed=4))
        report = solver.run(a, MethodKind.SSHP2)
        result = oracle.check_invariants(report, a)
        self.assertAllPass(result)
        self.assertEqual(result["trace_identities"].evaluated, 0)
        self.assertEqual(result["complex_real_agreement"].evaluated, 0)

    def test_spectral_checks_can_be_skipped(self):
        a = generate_matrix(GeneratorSpec(GeneratorKind.SPD, 8, seed=2))
        report = solver.run(a, MethodKind.SSHP2, SolverConfig())
        result = oracle.check_invariants(report, a, spectral=False)
        self.assertEqual(result["recurrence_agreement"].evaluated, 0)
        self.assertGreater(result["orthogonality"].evaluated, 0)

    def test_requires_trace(self):
        a = generate_matrix(GeneratorSpec(GeneratorKind.SPD, 5, seed=2))
        report = solver.run(a, MethodKind.SSHP2, SolverConfig(record_trace=False))
        with self.assertRaises(ValueError):
            oracle.check_invariants(report, a)

    def test_report_lookup(self):
        a = dense.as_matrix(np.diag([1.0, 2.0]))
        result = oracle.check_invariants(solver.run(a, MethodKind.SSHP2, SolverConfig()), a)
        self.assertTrue(result.passed)
        with self.assertRaises(KeyError):
            result["no_such_check"]
