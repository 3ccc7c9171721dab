import dataclasses
import unittest

import numpy as np
from test_case_base import TestCaseBase, central_difference

from ghoc.configs import default_simple_params
from ghoc.diff import jacobian
from ghoc.models import (
    CropInputSimple,
    CropStateSimple,
    biomass_gain,
    simple_fruit_yield,
    simple_step,
)
from ghoc.models.simple import response_factors
from ghoc.smoothing import SmoothingParams
from ghoc.utils import DomainError, NumericInputError, ParameterError


class TestSimpleStep(TestCaseBase):
    def setUp(self):
        self.p = default_simple_params()
        self.s = SmoothingParams()
        self.x = CropStateSimple(0.5, 600.0, 400.0)
        self.u = CropInputSimple(22.0, 0.2, 15.0, 500.0)

    def test_no_radiation_no_growth(self):
        y = simple_step(self.x, self.u._replace(R=0.0), self.p, self.s)
        self.assertEqual(y.m_B, self.x.m_B)
        self.assertGreater(y.tau, self.x.tau)

    def test_growth_is_positive_under_light(self):
        y = simple_step(self.x, self.u, self.p, self.s)
        self.assertGreater(y.m_B, self.x.m_B)
        self.assertGreaterEqual(y.I50B, self.x.I50B)

    def test_thermal_time_accumulates_above_base(self):
        y = simple_step(self.x, self.u, self.p, self.s)
        self.assertAlmostEqual(y.tau - self.x.tau, self.u.T - self.p.T_base, places=6)

    def test_drought_slows_growth(self):
        wet = biomass_gain(self.x, self.u._replace(D=0.0), self.p, self.s)
        dry = biomass_gain(self.x, self.u._replace(D=0.35), self.p, self.s)
        self.assertLess(dry, wet)

    def test_co2_factor_at_reference_and_saturation(self):
        at_ref = response_factors(self.x, self.u._replace(C_CO2=350.0), self.p, self.s)
        self.assertEqual(at_ref["f_co2"], 1.0)
        at_sat = response_factors(self.x, self.u._replace(C_CO2=700.0), self.p, self.s)
        self.assertAlmostEqual(at_sat["f_co2"], 1.0 + 0.0007 * 350.0, places=12)

    def test_co2_saturates_above_threshold(self):
        reference = biomass_gain(self.x, self.u._replace(C_CO2=700.0), self.p, self.s)
        for c in np.linspace(700.0, 1200.0, 51):
            gain = biomass_gain(self.x, self.u._replace(C_CO2=float(c)), self.p, self.s)
            self.assertLess(abs(gain - reference), 1e-9)

    def test_co2_factor_is_not_a_penalty_below_reference(self):
        at_ref = response_factors(self.x, self.u._replace(C_CO2=350.0), self.p, self.s)["f_co2"]
        for c in np.linspace(50.0, 350.0, 61):
            f = response_factors(self.x, self.u._replace(C_CO2=float(c)), self.p, self.s)
            self.assertLessEqual(f["f_co2"], at_ref)
            self.assertGreater(f["f_co2"], 1.0 - 1e-5)
        low = response_factors(self.x, self.u._replace(C_CO2=200.0), self.p, self.s)
        self.assertAlmostEqual(low["f_co2"], 1.0, places=12)

    def test_biomass_and_thermal_time_never_decrease(self):
        rng = np.random.default_rng(3)
        x = CropStateSimple(0.0, 0.0, self.p.I50B)
        for _ in range(120):
            T, D, R, C = rng.uniform([-5.0, 0.0, 0.0, 150.0], [40.0, 1.0, 30.0, 1200.0])
            u = CropInputSimple(float(T), float(D), float(R), float(C))
            y = simple_step(x, u, self.p, self.s)
            self.assertGreaterEqual(y.m_B, x.m_B)
            self.assertGreaterEqual(y.tau, x.tau)
            x = y
        self.assertGreater(x.m_B, 0.0)

    def test_input_domain(self):
        with self.assertRaises(DomainError):
            simple_step(self.x, self.u._replace(D=1.5), self.p, self.s)
        with self.assertRaises(DomainError):
            simple_step(self.x, self.u._replace(R=-1.0), self.p, self.s)
        with self.assertRaises(DomainError):
            simple_step(self.x, self.u._replace(C_CO2=0.0), self.p, self.s)
        with self.assertRaises(NumericInputError):
            simple_step(self.x, self.u._replace(T=float("nan")), self.p, self.s)

    def test_gradient_against_finite_differences(self):
        z = np.array([*self.x, *self.u])

        def next_biomass(v):
            x = CropStateSimple(*v[:3])
            u = CropInputSimple(*v[3:])
            return simple_step(x, u, self.p, self.s).m_B

        analytic = jacobian(lambda v: [next_biomass(v)], z)[0]
        numeric = central_difference(next_biomass, z)
        self.assert_gradient_close(analytic, numeric)


class TestSimpleYield(TestCaseBase):
    def test_harvest_index_identity(self):
        p = default_simple_params()
        rng = np.random.default_rng(11)
        for m_B in rng.uniform(0.0, 5.0, 100):
            self.assertEqual(simple_fruit_yield(float(m_B), p), p.HI * float(m_B))

    def test_negative_biomass(self):
        with self.assertRaises(DomainError):
            simple_fruit_yield(-0.1, default_simple_params())

    def test_parameter_validation(self):
        p = default_simple_params()
        with self.assertRaises(ParameterError):
            dataclasses.replace(p, HI=1.5)
        with self.assertRaises(ParameterError):
            dataclasses.replace(p, T_opt=p.T_base)
        with self.assertRaises(ParameterError):
            dataclasses.replace(p, RUE=float("inf"))


if __name__ == "__main__":
    unittest.main()
