"""Tests for the closed-form vacuum measurement results."""

import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import integrate

from quantum.exceptions import GridCoverageError, InvalidResolutionError, QNDError
from quantum.gaussian import (
    GaussianXYState,
    Resolution,
    analytic_correlation,
    conditional_second_moment,
    fluctuation_ratio,
    integrate_outcomes,
    integrated_jump_probability,
    jump_decomposition,
    jump_density,
    jump_peak_location,
    jump_probability,
    outcome_grid,
    outcome_moments,
    outcome_pdf,
    post_photon_expectation,
    post_state,
    post_wavefunction,
    zero_probability,
)

resolutions = st.floats(min_value=0.05, max_value=20.0)


class ResolutionTests(SimpleTestCase):

    def test_coupling_round_trip(self):
        res = Resolution.from_coupling(0.5)
        self.assertEqual(res.dx, 1.0)
        self.assertEqual(res.f, 0.5)

    def test_rejects_non_positive_and_non_finite(self):
        for bad in (0.0, -1.0, float('inf'), float('nan')):
            with self.assertRaises(InvalidResolutionError):
                Resolution(bad)

    def test_uncertainty_bound_enforced(self):
        with self.assertRaises(QNDError):
            GaussianXYState(0.0, 0.0, 0.1, 0.1)


class CorrelationTests(SimpleTestCase):

    def test_correlation_is_one_eighth_at_every_resolution(self):
        for dx in (0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0):
            with self.subTest(dx=dx):
                self.assertAlmostEqual(
                    analytic_correlation(Resolution(dx)), 0.125, delta=1e-9
                )

    def test_outcome_moments(self):
        res = Resolution(1.3)
        mean, second = outcome_moments(res)
        self.assertAlmostEqual(mean, 0.0, delta=1e-12)
        self.assertAlmostEqual(second, 1.3 ** 2 + 0.25, delta=1e-9)

    def test_average_photon_number_after_measurement(self):
        res = Resolution(0.7)
        photons = integrate_outcomes(
            lambda x: post_photon_expectation(res, x) * outcome_pdf(res, x),
            res,
        )
        self.assertAlmostEqual(photons, res.f ** 2 / 4.0, delta=1e-10)


class PostStateTests(SimpleTestCase):

    def test_squeezed_ellipse_after_strong_readout(self):
        state = post_state(Resolution(0.5), -0.5)
        self.assertEqual(state.mean_x, -0.25)
        self.assertEqual(state.mean_y, 0.0)
        self.assertAlmostEqual(state.std_x / 0.5, 1 / math.sqrt(2), delta=1e-12)
        self.assertAlmostEqual(state.std_y / 0.5, math.sqrt(2), delta=1e-12)

    def test_minimum_uncertainty(self):
        for dx in (0.1, 1.0, 7.0):
            state = post_state(Resolution(dx), 0.3)
            self.assertAlmostEqual(state.var_x * state.var_y, 1 / 16, delta=1e-15)

    def test_weak_limit_returns_vacuum(self):
        state = post_state(Resolution(1e6), 0.8)
        self.assertAlmostEqual(state.std_x, 0.5, delta=1e-9)
        self.assertAlmostEqual(state.std_y, 0.5, delta=1e-9)
        self.assertAlmostEqual(state.mean_x, 0.0, delta=1e-9)

    def test_wavefunction_is_normalized_with_matching_moments(self):
        res = Resolution(0.5)
        points = np.linspace(-6, 6, 4001)
        density = post_wavefunction(res, -0.5, points) ** 2
        state = post_state(res, -0.5)
        self.assertAlmostEqual(integrate.trapezoid(density, points), 1.0, delta=1e-10)
        mean = integrate.trapezoid(points * density, points)
        self.assertAlmostEqual(mean, state.mean_x, delta=1e-10)
        variance = integrate.trapezoid((points - mean) ** 2 * density, points)
        self.assertAlmostEqual(variance, state.var_x, delta=1e-10)


class JumpTests(SimpleTestCase):

    def test_jump_probability_at_unit_resolution(self):
        res = Resolution(1.0)
        self.assertAlmostEqual(jump_probability(res), 0.0572, delta=1e-4)
        self.assertAlmostEqual(
            integrated_jump_probability(res), jump_probability(res), delta=1e-9
        )

    def test_conditional_fluctuations(self):
        res = Resolution(1.0)
        self.assertAlmostEqual(conditional_second_moment(res), 3.3107, delta=1e-4)
        self.assertAlmostEqual(fluctuation_ratio(res), 2.6485, delta=1e-3)
        ratio = fluctuation_ratio(Resolution(5.0))
        self.assertGreaterEqual(ratio, 2.85)
        self.assertLessEqual(ratio, 3.0)

    def test_conditional_moment_by_integration(self):
        res = Resolution(1.0)
        second = integrate_outcomes(lambda x: x * x * jump_density(res, x), res)
        self.assertAlmostEqual(
            second / jump_probability(res),
            conditional_second_moment(res),
            delta=1e-8,
        )

    def test_peak_location_is_the_maximum(self):
        res = Resolution(1.0)
        peak = jump_peak_location(res)
        self.assertAlmostEqual(peak, 1.4937, delta=1e-3)
        grid = np.linspace(0, 6, 600001)
        brute = grid[np.argmax(jump_density(res, grid))]
        self.assertAlmostEqual(peak, brute, delta=1e-4)

    def test_peak_at_origin_for_strong_measurement(self):
        self.assertEqual(jump_peak_location(Resolution(1e-3)), 0.0)

    def test_decomposition_rows(self):
        res = Resolution(1.0)
        split = jump_decomposition(res, outcome_grid(res, step=0.01))
        assert_allclose(split.p_total, split.p_zero + split.p_jump)
        self.assertAlmostEqual(split.integrated_total, 1.0, delta=1e-8)
        self.assertAlmostEqual(split.integrated_zero, zero_probability(res), delta=1e-8)
        self.assertAlmostEqual(split.integrated_jump, split.jump_probability, delta=1e-8)

    def test_decomposition_requires_coverage(self):
        res = Resolution(1.0)
        with self.assertRaises(GridCoverageError):
            jump_decomposition(res, np.linspace(-3, 3, 101))

    @settings(max_examples=40, deadline=None)
    @given(resolutions)
    def test_probabilities_sum_to_one(self, dx):
        res = Resolution(dx)
        self.assertAlmostEqual(
            zero_probability(res) + jump_probability(res), 1.0, delta=1e-15
        )

    @settings(max_examples=40, deadline=None)
    @given(resolutions)
    def test_jump_density_is_non_negative(self, dx):
        res = Resolution(dx)
        grid = outcome_grid(res, step=math.sqrt(res.outcome_variance) / 20)
        self.assertGreaterEqual(float(np.min(jump_density(res, grid))), -1e-15)
