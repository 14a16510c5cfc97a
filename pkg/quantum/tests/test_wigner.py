"""Tests for Gaussian Wigner moments and the intensity correlation."""

import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from quantum.exceptions import QNDError, UnsupportedOrderError
from quantum.fock import coherent_state, squeezed_vacuum
from quantum.gaussian import Resolution, analytic_correlation, post_state
from quantum.measurement import correlation_operator_form
from quantum.wigner import (
    GaussianWigner,
    intensity_correlation,
    moments,
    numerical_moment,
    post_interaction_wigner,
    std_ellipse,
)


class MomentTests(SimpleTestCase):

    def test_vacuum_moments(self):
        vac = GaussianWigner.vacuum()
        self.assertEqual(moments(vac, 2, 0), 0.25)
        self.assertEqual(moments(vac, 4, 0), 3 / 16)
        self.assertEqual(moments(vac, 2, 2), 1 / 16)
        self.assertEqual(moments(vac, 3, 1), 0.0)
        self.assertEqual(
            moments(vac, 4, 0) - moments(vac, 2, 0) ** 2, 0.125
        )

    def test_shifted_moments(self):
        w = GaussianWigner(0.5, -1.0, 0.2, 0.3)
        self.assertAlmostEqual(moments(w, 1, 0), 0.5)
        self.assertAlmostEqual(moments(w, 2, 0), 0.45)
        self.assertAlmostEqual(moments(w, 0, 3), -1.0 - 3 * 0.3)

    def test_unsupported_orders(self):
        vac = GaussianWigner.vacuum()
        with self.assertRaises(UnsupportedOrderError):
            moments(vac, 5, 4)
        with self.assertRaises(UnsupportedOrderError):
            moments(vac, -1, 0)
        with self.assertRaises(QNDError):
            GaussianWigner(0.0, 0.0, 0.0, 0.25)

    def test_density_is_normalized(self):
        w = GaussianWigner(0.3, -0.2, 0.1, 0.6)
        self.assertAlmostEqual(numerical_moment(w, 0, 0), 1.0, delta=1e-10)

    @settings(max_examples=15, deadline=None)
    @given(
        st.floats(min_value=-1.0, max_value=1.0),
        st.floats(min_value=-1.0, max_value=1.0),
        st.floats(min_value=0.05, max_value=1.0),
        st.floats(min_value=0.05, max_value=1.0),
        st.integers(min_value=0, max_value=4),
        st.integers(min_value=0, max_value=4),
    )
    def test_closed_form_matches_quadrature(self, mx, my, vx, vy, i, j):
        w = GaussianWigner(mx, my, vx, vy)
        exact = moments(w, i, j)
        self.assertAlmostEqual(
            numerical_moment(w, i, j), exact,
            delta=1e-8 * max(1.0, abs(exact)),
        )


class IntensityCorrelationTests(SimpleTestCase):

    def test_vacuum_correlation_is_one_eighth(self):
        self.assertEqual(intensity_correlation(GaussianWigner.vacuum()), 0.125)

    def test_squeezed_correlation(self):
        w = GaussianWigner.squeezed(math.log(2.0) / 2)
        self.assertAlmostEqual(intensity_correlation(w), 0.03125, delta=1e-15)

    def test_coherent_correlation(self):
        for alpha in (0.0, 0.5, 1.0, 2.0):
            self.assertAlmostEqual(
                intensity_correlation(GaussianWigner.coherent(alpha)),
                0.125 + alpha ** 2,
                delta=1e-12,
            )

    def test_interaction_leaves_correlation_unchanged(self):
        for dx in (0.25, 1.0, 4.0):
            res = Resolution(dx)
            post = post_interaction_wigner(GaussianWigner.vacuum(), res)
            self.assertEqual(post.var_x, 0.25)
            self.assertAlmostEqual(post.var_y, 0.25 + res.f ** 2 / 4)
            self.assertAlmostEqual(
                intensity_correlation(post), analytic_correlation(res),
                delta=1e-9,
            )

    def test_post_state_wigner_moments(self):
        res = Resolution(0.5)
        w = GaussianWigner.from_state(post_state(res, -0.5))
        self.assertAlmostEqual(
            numerical_moment(w, 2, 0), 0.25 ** 2 + 0.125, delta=1e-10
        )
        self.assertAlmostEqual(
            numerical_moment(w, 0, 2), moments(w, 0, 2), delta=1e-10
        )

    def test_fock_path_agrees(self):
        res = Resolution(1.0)
        cases = (
            (coherent_state(1.0, 48), GaussianWigner.coherent(1.0)),
            (squeezed_vacuum(0.5, 48), GaussianWigner.squeezed(0.5)),
        )
        for state, w in cases:
            with self.subTest(w=w):
                self.assertAlmostEqual(
                    correlation_operator_form(state, res),
                    intensity_correlation(post_interaction_wigner(w, res)),
                    delta=1e-5,
                )


class EllipseTests(SimpleTestCase):

    def test_contour_lies_on_one_sigma(self):
        w = GaussianWigner(0.1, -0.2, 0.04, 0.3)
        xs, ys = std_ellipse(w, 61)
        self.assertEqual(len(xs), 61)
        assert_allclose(
            (xs - 0.1) ** 2 / w.var_x + (ys + 0.2) ** 2 / w.var_y,
            np.ones(61),
        )
        self.assertAlmostEqual(xs[0], xs[-1])
