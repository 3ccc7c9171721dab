import math
import unittest

import numpy as np
from test_case_base import TestCaseBase

from ghoc.diff import (
    DualNumber,
    exp,
    jacobian,
    jvp,
    log,
    mean,
    power,
    sqrt,
    value_and_jacobian,
    value_of,
)
from ghoc.utils import DifferentiationError, ShapeError


def rosenbrock(v):
    return (1.0 - v[0]) ** 2 + 100.0 * (v[1] - v[0] ** 2) ** 2


def vector_field(v):
    return [exp(v[0]) * v[1], log(v[1] + 2.0) - v[2], sqrt(v[0] ** 2 + 1.0) / v[2]]


class TestArithmetic(TestCaseBase):
    def test_product_rule(self):
        x = DualNumber.seed(2.0, 0, 2)
        y = DualNumber.seed(3.0, 1, 2)
        z = x * y + x
        self.assertEqual(z.value, 8.0)
        self.assertEqual(z.derivs.tolist(), [4.0, 2.0])

    def test_quotient_and_reflected_operators(self):
        x = DualNumber.seed(4.0, 0, 1)
        self.assertEqual((1.0 / x).derivs[0], -1.0 / 16.0)
        self.assertEqual((3.0 - x).derivs[0], -1.0)
        self.assertEqual((x / 2).derivs[0], 0.5)
        self.assertEqual((-x).value, -4.0)
        self.assertEqual((2.0**x).derivs[0], 16.0 * math.log(2.0))

    def test_power_with_dual_exponent(self):
        x = DualNumber.seed(2.0, 0, 2)
        y = DualNumber.seed(3.0, 1, 2)
        z = x**y
        self.assertAlmostEqual(z.value, 8.0, places=12)
        self.assertAlmostEqual(z.derivs[0], 12.0, places=12)
        self.assertAlmostEqual(z.derivs[1], 8.0 * math.log(2.0), places=12)

    def test_ops_on_floats_and_duals(self):
        self.assertEqual(exp(0.0), 1.0)
        self.assertEqual(sqrt(9.0), 3.0)
        self.assertEqual(power(2.0, 10), 1024.0)
        x = DualNumber.seed(1.0, 0, 1)
        self.assertAlmostEqual(exp(x).derivs[0], math.e, places=15)
        self.assertEqual(log(x).derivs[0], 1.0)
        self.assertEqual(sqrt(DualNumber.seed(4.0, 0, 1)).derivs[0], 0.25)
        self.assertEqual(power(x, 3.0).derivs[0], 3.0)

    def test_numpy_ufuncs_on_object_arrays(self):
        x = DualNumber.seed(0.5, 0, 1)
        out = np.exp(np.array([x], dtype=object))[0]
        self.assertEqual(out.value, math.exp(0.5))
        self.assertEqual(out.derivs[0], math.exp(0.5))

    def test_mean(self):
        self.assertEqual(mean([0.1] * 24), 0.1)
        self.assertEqual(mean([1.0, 2.0, 3.0, 4.0]), 2.5)
        x = DualNumber.seed(1.0, 0, 1)
        m = mean([x, 3.0 * x])
        self.assertEqual(m.value, 2.0)
        self.assertEqual(m.derivs[0], 2.0)

    def test_value_of(self):
        self.assertEqual(value_of(DualNumber.constant(1.5, 3)), 1.5)
        self.assertEqual(value_of(2), 2.0)


class TestBranchFreeGuard(TestCaseBase):
    def setUp(self):
        self.x = DualNumber.seed(1.0, 0, 1)

    def test_comparisons_raise(self):
        with self.assertRaises(DifferentiationError):
            self.x < 2.0  # noqa: B015
        with self.assertRaises(DifferentiationError):
            bool(self.x)

    def test_math_module_raises(self):
        with self.assertRaises(DifferentiationError):
            math.exp(self.x)
        with self.assertRaises(DifferentiationError):
            abs(self.x)

    def test_unsupported_ufunc_names_the_primitive(self):
        with self.assertRaises(DifferentiationError) as ctx:
            np.sin(self.x)
        self.assertEqual(ctx.exception.primitive, "numpy.sin")

    def test_unregistered_type(self):
        with self.assertRaises(DifferentiationError):
            exp("1.0")


class TestJacobian(TestCaseBase):
    def test_identity_and_product(self):
        self.assertEqual(jacobian(lambda v: v, [1.0, 2.0]).tolist(), [[1.0, 0.0], [0.0, 1.0]])
        self.assertEqual(jacobian(lambda v: v[0] * v[1], [3.0, 4.0]).tolist(), [[4.0, 3.0]])

    def test_rosenbrock_gradient(self):
        x = np.array([-1.2, 1.0])
        value, jac = value_and_jacobian(rosenbrock, x)
        self.assertAlmostEqual(value[0], 24.2, places=12)
        expected = [
            -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] ** 2),
            200.0 * (x[1] - x[0] ** 2),
        ]
        np.testing.assert_allclose(jac[0], expected, rtol=1e-12)

    def test_batching_and_threads_do_not_change_the_result(self):
        x = np.array([0.3, 0.7, 1.9])
        reference = jacobian(vector_field, x)
        for batch_size in (1, 2, 3, 10):
            for threads in (1, 3):
                jac = jacobian(vector_field, x, batch_size=batch_size, threads=threads)
                np.testing.assert_array_equal(jac, reference)

    def test_jvp_matches_jacobian(self):
        x = np.array([0.3, 0.7, 1.9])
        v = np.array([1.0, -2.0, 0.5])
        expected = jacobian(vector_field, x) @ v
        np.testing.assert_allclose(jvp(vector_field, x, v), expected, rtol=1e-12, atol=1e-14)

    def test_constant_outputs_have_zero_rows(self):
        jac = jacobian(lambda v: [v[0], 2.0], [1.0])
        self.assertEqual(jac.tolist(), [[1.0], [0.0]])

    def test_shape_errors(self):
        with self.assertRaises(ShapeError):
            jacobian(lambda v: v, [])
        with self.assertRaises(ShapeError):
            jacobian(lambda v: v, [1.0, 2.0], batch_size=0)
        with self.assertRaises(ShapeError):
            jvp(lambda v: v, [1.0, 2.0], [1.0])


if __name__ == "__main__":
    unittest.main()
