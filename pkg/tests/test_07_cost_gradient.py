import dataclasses
import unittest

import numpy as np
from test_case_base import TestCaseBase, small_problem

from ghoc.coupling import flatten, initial_state, rollout
from ghoc.diff.gradcheck import combined_check, interior_point, zero_weights_check
from ghoc.diff.sensitivity import final_state_jacobian, gradient_of_cost, value_and_gradient
from ghoc.models import CropStateSimple, GhControl, GhState
from ghoc.ocp import CostWeights, Economics, cost, simulate, stage_cost, terminal_value
from ghoc.ocp.cost import trajectory_cost
from ghoc.utils import DomainError, ParameterError, ShapeError


class TestCostTerms(TestCaseBase):
    def test_stage_cost(self):
        U = [GhControl(0.2, 1.0, 0.4)] * 3
        self.assertAlmostEqual(stage_cost(U, np.array([1.0, 0.0, 0.5])), 1.2, places=12)
        self.assertEqual(stage_cost([], np.array([1.0, 0.0, 0.5])), 0.0)

    def test_terminal_value(self):
        crop = CropStateSimple(2.0, 900.0, 400.0)
        self.assertEqual(terminal_value(crop, np.array([3.0, 0.0, 0.0])), 6.0)
        self.assertEqual(terminal_value(crop, np.zeros(3)), 0.0)

    def test_weights_from_economics(self):
        problem = small_problem("simple")
        r, q = problem.weights.r, problem.weights.q
        self.assertAlmostEqual(r[0], 120.0 / 1000.0 * 24 * 0.02, places=15)
        self.assertEqual(r[1], 0.0)
        self.assertAlmostEqual(r[2], 1e-6 * 86400.0 * 0.15, places=15)
        self.assertAlmostEqual(q[0], 2.0 * 0.68 / 0.06, places=12)
        self.assertEqual(q[1:].tolist(), [0.0, 0.0])
        tomgro = small_problem("tomgro")
        self.assertAlmostEqual(tomgro.weights.q[3], 2.0 / 0.06, places=12)

    def test_cost_matches_simulated_trajectory(self):
        problem = small_problem("tomgro")
        U = interior_point(problem, seed=2)
        trajectory = simulate(U, problem)
        self.assertAlmostEqual(trajectory_cost(trajectory, problem), cost(U, problem), places=12)
        self.assertEqual(len(trajectory.crop_states), problem.N + 1)


class TestGradient(TestCaseBase):
    def test_simple_five_days(self):
        report = combined_check(small_problem("simple", horizon=5), seed=1)
        self.assertTrue(report.passed, msg=str(report.to_dict()))
        self.assertEqual(report.n_checked, 15)

    def test_tomgro_three_days(self):
        report = combined_check(small_problem("tomgro", horizon=3), seed=4)
        self.assertTrue(report.passed, msg=str(report.to_dict()))

    def test_zero_weights_give_zero_gradient(self):
        for model in ("simple", "tomgro"):
            report = zero_weights_check(small_problem(model), seed=3)
            self.assertTrue(report.passed)
            self.assertEqual(report.max_rel_error, 0.0)

    def test_value_matches_float_cost(self):
        problem = small_problem("simple", horizon=3)
        U = interior_point(problem, seed=5)
        J, g = value_and_gradient(U, problem)
        self.assertAlmostEqual(J, cost(U, problem), delta=1e-12 * max(1.0, abs(J)))
        self.assertEqual(g.shape, (problem.n_vars,))

    def test_batching_and_threads(self):
        problem = small_problem("simple", horizon=3)
        U = interior_point(problem, seed=6)
        reference = gradient_of_cost(U, problem)
        for batch_size, threads in ((1, 1), (4, 1), (4, 3), (2, 2)):
            g = gradient_of_cost(U, problem, batch_size=batch_size, threads=threads)
            np.testing.assert_allclose(g, reference, rtol=1e-10, atol=1e-15)

    def test_final_state_jacobian_shape(self):
        problem = small_problem("simple", horizon=2)
        jac = final_state_jacobian(interior_point(problem), problem)
        self.assertEqual(jac.shape, (3 + 24 * 5, 6))
        # the first day's hours are gone after day two, but the crop remembers them
        self.assertTrue(np.any(jac[0, :3] != 0.0))

    def test_final_state_jacobian_matches_finite_differences(self):
        problem = small_problem("simple", horizon=3)
        U = interior_point(problem, seed=8)
        jac = final_state_jacobian(U, problem)

        def final_state(u):
            states = rollout(problem.x_init, problem.controls(u), problem.days, problem.params)
            return flatten(states[-1])

        h = 1e-5
        numeric = np.zeros_like(jac)
        for k in range(U.size):
            up, down = U.copy(), U.copy()
            up[k] += h
            down[k] -= h
            numeric[:, k] = (final_state(up) - final_state(down)) / (2.0 * h)
        for k in range(U.size):
            error = np.linalg.norm(jac[:, k] - numeric[:, k])
            self.assertLessEqual(error, 1e-4 * np.linalg.norm(jac[:, k]), msg=f"control {k}")
        crop = jac[:3]
        np.testing.assert_allclose(crop, numeric[:3], rtol=1e-3, atol=1e-6 * np.abs(crop).max())


class TestProblemValidation(TestCaseBase):
    def setUp(self):
        self.problem = small_problem("simple", horizon=2)

    def test_horizon_and_disturbance_shape(self):
        with self.assertRaises(ShapeError):
            dataclasses.replace(self.problem, N=0)
        with self.assertRaises(ShapeError):
            dataclasses.replace(self.problem, N=3)

    def test_control_vector_length(self):
        with self.assertRaises(ShapeError):
            self.problem.controls(np.zeros(5))
        self.assertEqual(len(self.problem.controls(np.zeros((2, 3)))), 2)

    def test_weights(self):
        with self.assertRaises(ShapeError):
            CostWeights(np.zeros(2), np.zeros(3))
        with self.assertRaises(ShapeError):
            dataclasses.replace(self.problem, weights=CostWeights(np.zeros(3), np.zeros(5)))
        with self.assertRaises(ParameterError):
            Economics(tomato_price=0.0)

    def test_infeasible_initial_state(self):
        x = self.problem.x_init
        hot = initial_state(x.crop, GhState(120.0, 18.0, 30.0, 500.0, 0.01), "simple")
        with self.assertRaises(DomainError):
            dataclasses.replace(self.problem, x_init=hot)
        negative = initial_state(CropStateSimple(-1.0, 0.0, 400.0), x.gh_hours[-1], "simple")
        with self.assertRaises(DomainError):
            dataclasses.replace(self.problem, x_init=negative)


if __name__ == "__main__":
    unittest.main()
