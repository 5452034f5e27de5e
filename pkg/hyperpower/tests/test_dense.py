import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from hyperpower import dense
from hyperpower.exceptions import NonFiniteError, ShapeError


def random_matrix(n, seed, complex_=False):
    rng = np.random.default_rng(seed)
    m = rng.uniform(-1.0, 1.0, size=(n, n))
    if complex_:
        m = m + 1j * rng.uniform(-1.0, 1.0, size=(n, n))
    return dense.as_matrix(m)


class MatrixConstructionTests(SimpleTestCase):

    def test_real_data_becomes_float64(self):
        m = dense.as_matrix([[1, 2], [3, 4]])
        self.assertEqual(m.dtype, np.float64)
        self.assertFalse(m.flags.writeable)

    def test_complex_flag_promotes(self):
        m = dense.as_matrix([[1.0]], complex_=True)
        self.assertTrue(dense.is_complex(m))

    def test_rejects_nan(self):
        with self.assertRaises(NonFiniteError):
            dense.as_matrix([[1.0, float("nan")], [0.0, 1.0]])

    def test_rejects_vector(self):
        with self.assertRaises(ShapeError):
            dense.as_matrix([1.0, 2.0])

    def test_rejects_ragged_rows(self):
        with self.assertRaises(ShapeError):
            dense.as_matrix([[1.0, 2.0], [3.0]])


class KernelExampleTests(SimpleTestCase):

    def test_matmul_identity(self):
        out = dense.matmul(dense.identity(2), dense.as_matrix(np.diag([3.0, 4.0])))
        np.testing.assert_array_equal(out, np.diag([3.0, 4.0]))

    def test_matmul_diagonal(self):
        out = dense.matmul(dense.as_matrix(np.diag([2.0, 3.0])), dense.as_matrix(np.diag([5.0, 7.0])))
        np.testing.assert_array_equal(out, np.diag([10.0, 21.0]))

    def test_matmul_by_hand(self):
        out = dense.matmul(dense.as_matrix([[1, 2], [3, 4]]), dense.as_matrix([[0, 1], [1, 0]]))
        np.testing.assert_array_equal(out, [[2, 1], [4, 3]])

    def test_matmul_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            dense.matmul(dense.as_matrix(np.ones((2, 3))), dense.as_matrix(np.ones((2, 3))))

    def test_matmul_rectangular(self):
        out = dense.matmul(dense.as_matrix(np.ones((2, 3))), dense.as_matrix(np.ones((3, 4))))
        self.assertEqual(out.shape, (2, 4))
        np.testing.assert_array_equal(out, np.full((2, 4), 3.0))

    def test_complex_matmul_matches_numpy(self):
        a = random_matrix(5, 1, complex_=True)
        b = random_matrix(5, 2, complex_=True)
        np.testing.assert_allclose(dense.matmul(a, b), a @ b, rtol=1e-13, atol=1e-13)

    def test_adjoint(self):
        np.testing.assert_array_equal(dense.adjoint(dense.as_matrix([[1, 2], [3, 4]])), [[1, 3], [2, 4]])
        self.assertEqual(dense.adjoint(dense.as_matrix([[1j]]))[0, 0], -1j)
        s = dense.as_matrix([[2.0, 1.0], [1.0, 5.0]])
        np.testing.assert_array_equal(dense.adjoint(s), s)

    def test_trace(self):
        self.assertEqual(dense.trace(dense.identity(3)), 3.0)
        self.assertAlmostEqual(dense.trace(dense.as_matrix(np.diag([0.9, 0.6]))), 1.5, delta=1e-15)
        self.assertEqual(dense.trace(dense.as_matrix(np.diag([0.5j, 0.2]))), complex(0.2, 0.5))

    def test_trace_requires_square(self):
        with self.assertRaises(ShapeError):
            dense.trace(dense.as_matrix(np.ones((2, 3))))

    def test_frob_norm(self):
        self.assertEqual(dense.frob_norm(dense.as_matrix([[3, 4], [0, 0]])), 5.0)
        self.assertAlmostEqual(dense.frob_norm(dense.identity(7)), math.sqrt(7), delta=1e-15)
        self.assertAlmostEqual(dense.frob_norm(dense.as_matrix([[1 + 1j]])), math.sqrt(2), delta=1e-15)

    def test_frob_inner(self):
        self.assertAlmostEqual(dense.frob_inner(dense.identity(2), dense.as_matrix(np.diag([0.9, 0.6]))),
                               1.5, delta=1e-15)
        self.assertAlmostEqual(dense.frob_inner(dense.as_matrix(np.diag([0.1, 0.4])),
                                                dense.as_matrix(np.diag([0.19, 0.64]))),
                               0.275, delta=1e-15)
        a = dense.as_matrix([[3, 4], [0, 0]])
        self.assertEqual(dense.frob_inner(a, a), 25.0)

    def test_frob_inner_conjugates_first_argument(self):
        a = dense.as_matrix([[1j]])
        b = dense.as_matrix([[1.0]], complex_=True)
        self.assertEqual(dense.frob_inner(a, b), -1j)

    def test_frob_inner_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            dense.frob_inner(dense.identity(2), dense.identity(3))

    def test_affine_combine(self):
        zero = dense.as_matrix(np.zeros((2, 2)))
        np.testing.assert_array_equal(dense.affine_combine(1.0, -1.0, 0.0, zero, zero), np.eye(2))
        f = dense.as_matrix(np.diag([0.9, 0.6]))
        f2 = dense.as_matrix(np.diag([0.81, 0.36]))
        np.testing.assert_allclose(dense.affine_combine(13.5, -37.5, 25.0, f, f2), np.zeros((2, 2)),
                                   atol=1e-13)
        np.testing.assert_array_equal(dense.affine_combine(0.0, 1.0, 0.0, f, f2), f)

    def test_affine_combine_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            dense.affine_combine(1.0, 1.0, 1.0, dense.identity(2), dense.identity(3))

    def test_results_are_read_only(self):
        out = dense.identity_minus(dense.identity(2))
        with self.assertRaises(ValueError):
            out[0, 0] = 1.0

    def test_zero_imaginary_part_reproduces_real_kernels(self):
        a = random_matrix(6, 3)
        b = random_matrix(6, 4)
        ac, bc = dense.to_complex(a), dense.to_complex(b)
        np.testing.assert_array_equal(dense.matmul(ac, bc).real, dense.matmul(a, b))
        self.assertEqual(dense.frob_inner(ac, bc).real, dense.frob_inner(a, b))
        self.assertEqual(dense.frob_norm(ac), dense.frob_norm(a))


class KernelPropertyTests(SimpleTestCase):

    @given(n=st.integers(1, 20), seed=st.integers(0, 2 ** 32 - 1), complex_=st.booleans())
    @settings(max_examples=50, deadline=None)
    def test_submultiplicative(self, n, seed, complex_):
        a = random_matrix(n, seed, complex_)
        b = random_matrix(n, seed + 1, complex_)
        bound = dense.frob_norm(a) * dense.frob_norm(b)
        self.assertLessEqual(dense.frob_norm(dense.matmul(a, b)), bound + 1e-10 * max(1.0, bound))

    @given(n=st.integers(1, 20), seed=st.integers(0, 2 ** 32 - 1), complex_=st.booleans())
    @settings(max_examples=50, deadline=None)
    def test_inner_with_self_is_norm_squared(self, n, seed, complex_):
        a = random_matrix(n, seed, complex_)
        inner = dense.frob_inner(a, a)
        self.assertAlmostEqual(abs(inner), dense.frob_norm(a) ** 2, delta=1e-14 * abs(inner))

    @given(n=st.integers(1, 20), seed=st.integers(0, 2 ** 32 - 1), complex_=st.booleans())
    @settings(max_examples=50, deadline=None)
    def test_adjoint_is_an_involution(self, n, seed, complex_):
        a = random_matrix(n, seed, complex_)
        np.testing.assert_array_equal(dense.adjoint(dense.adjoint(a)), a)

    @given(n=st.integers(1, 20), seed=st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_trace_is_cyclic(self, n, seed):
        a = random_matrix(n, seed)
        b = random_matrix(n, seed + 1)
        ab = dense.trace(dense.matmul(a, b))
        ba = dense.trace(dense.matmul(b, a))
        self.assertAlmostEqual(ab, ba, delta=1e-12 * max(1.0, abs(ab)))
