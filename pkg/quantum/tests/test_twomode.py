"""Tests for the explicit signal-meter coupling."""

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose
from scipy import integrate

from quantum.exceptions import (
    GridRangeError,
    InvalidDimensionError,
    QNDError,
    TruncationError,
)
from quantum.fock import (
    build_operators,
    coherent_state,
    hermite_functions,
    vacuum,
)
from quantum.gaussian import Resolution, outcome_pdf
from quantum.measurement import apply_measurement, build_measurement_operator
from quantum.twomode import (
    TwoModeState,
    build_coupling_unitary,
    coupling_from_gain,
    entangle,
    fidelity,
    gain_from_coupling,
    heisenberg_residuals,
    meter_dimension,
    meter_projection,
)


class SizingTests(SimpleTestCase):

    def test_meter_dimension_rule(self):
        self.assertEqual(meter_dimension(0.5, 32), 34)
        self.assertEqual(meter_dimension(1.0, 32), 40)
        self.assertEqual(meter_dimension(0.0, 20), 20)

    def test_gain_round_trip(self):
        for f in (0.1, 0.7, 2.0):
            self.assertAlmostEqual(coupling_from_gain(gain_from_coupling(f)), f)
        self.assertEqual(coupling_from_gain(1.0), 0.0)
        with self.assertRaises(QNDError):
            coupling_from_gain(0.0)

    def test_undersized_meter_names_required_dim(self):
        with self.assertRaises(TruncationError) as ctx:
            build_coupling_unitary(2.0, 32, 48)
        self.assertEqual(ctx.exception.required_dim, 64)
        self.assertIn('>= 64', str(ctx.exception))

    def test_small_modes_rejected(self):
        with self.assertRaises(InvalidDimensionError):
            build_coupling_unitary(0.5, 8, 32)
        with self.assertRaises(InvalidDimensionError):
            TwoModeState(np.zeros(4))


class CouplingUnitaryTests(SimpleTestCase):

    def test_zero_coupling_is_identity(self):
        coupling = build_coupling_unitary(0.0, 16, 16)
        assert_allclose(coupling.matrix, np.eye(256), atol=1e-10)

    def test_unitarity(self):
        coupling = build_coupling_unitary(1.0, 32, 48)
        self.assertLessEqual(coupling.factor_residual(), 1e-8)
        self.assertLessEqual(coupling.unitarity_residual(), 1e-8)

    def test_apply_matches_full_matrix(self):
        coupling = build_coupling_unitary(0.5, 16, 20)
        rng = np.random.default_rng(7)
        amps = rng.normal(size=(16, 20)) + 1j * rng.normal(size=(16, 20))
        assert_allclose(
            coupling.apply(amps).ravel(), coupling.matrix @ amps.ravel(),
            atol=1e-10,
        )

    def test_heisenberg_transforms(self):
        coupling = build_coupling_unitary(1.0, 32, 48)
        residuals = heisenberg_residuals(coupling, signal_block=4, meter_block=4)
        self.assertEqual(set(residuals), {'x_S', 'y_S', 'x_M', 'y_M', 'n_S'})
        for name, value in residuals.items():
            with self.subTest(operator=name):
                self.assertLessEqual(value, 1e-6)
        self.assertLessEqual(residuals['x_S'], 1e-10)
        self.assertLessEqual(residuals['y_M'], 1e-10)


class ReductionTests(SimpleTestCase):

    def test_entangled_vacuum_moments(self):
        joint = entangle(vacuum(24), 1.0, 40)
        signal = build_operators(24)
        meter = build_operators(40)
        self.assertAlmostEqual(joint.norm_squared, 1.0, delta=1e-10)
        self.assertAlmostEqual(
            joint.signal_expectation(signal.x @ signal.x).real, 0.25, delta=1e-8
        )
        self.assertAlmostEqual(
            joint.signal_expectation(signal.y @ signal.y).real, 0.5, delta=1e-8
        )
        self.assertAlmostEqual(
            joint.signal_expectation(signal.n).real, 0.25, delta=1e-8
        )
        self.assertAlmostEqual(
            joint.meter_expectation(meter.x @ meter.x).real, 0.5, delta=1e-8
        )
        self.assertAlmostEqual(
            joint.joint_expectation(signal.x, meter.x).real, 0.25, delta=1e-8
        )
        self.assertAlmostEqual(
            np.trace(joint.reduced_signal()).real, 1.0, delta=1e-10
        )

    def test_joint_wavefunction_is_shifted_meter_vacuum(self):
        f = 1.0
        signal = coherent_state(0.5, 32)
        joint = entangle(signal, f, 48)
        xs = np.linspace(-3.0, 3.0, 61)
        xm = np.linspace(-4.0, 4.0, 81)
        signal_basis = hermite_functions(xs, 32)
        meter_basis = hermite_functions(xm, 48)
        sampled = signal_basis.T @ joint.amps @ meter_basis
        phi = signal_basis.T @ signal.amps
        shifted = xm[np.newaxis, :] - f * xs[:, np.newaxis]
        expected = (
            phi[:, np.newaxis] * (2 / np.pi) ** 0.25 * np.exp(-shifted ** 2)
        )
        assert_allclose(sampled, expected, atol=1e-6)

    def test_projected_signal_geometry(self):
        joint = entangle(vacuum(24), 1.0, 40)
        readout = meter_projection(joint, -0.5)
        ops = build_operators(24)
        state = readout.conditional_signal
        mean = (state.amps.conj() @ ops.x.entries @ state.amps).real
        second = (state.amps.conj() @ (ops.x @ ops.x).entries @ state.amps).real
        self.assertEqual(readout.x_m, -0.5)
        self.assertAlmostEqual(mean, -0.25, delta=1e-7)
        self.assertAlmostEqual(second - mean ** 2, 0.125, delta=1e-7)

    def test_reduction_matches_measurement_operator(self):
        signal = coherent_state(0.5, 32)
        for f in (0.5, 1.0):
            with self.subTest(f=f):
                joint = entangle(signal, f, 48)
                readout = meter_projection(joint, 0.3)
                mop = build_measurement_operator(
                    Resolution.from_coupling(f), readout.x_m, 32
                )
                reduced = apply_measurement(signal, mop).post
                self.assertGreaterEqual(
                    fidelity(readout.conditional_signal, reduced), 1 - 1e-6
                )

    def test_joint_density_is_scaled_outcome_density(self):
        f = 1.0
        joint = entangle(vacuum(24), f, 40)
        points = np.linspace(-5.0, 5.0, 1001)
        densities = np.array(
            [meter_projection(joint, x).joint_density for x in points]
        )
        self.assertAlmostEqual(
            integrate.trapezoid(densities, points), 1.0, delta=1e-8
        )
        res = Resolution.from_coupling(f)
        for x_M in (-1.0, 0.0, 0.7):
            self.assertAlmostEqual(
                f * meter_projection(joint, x_M).joint_density,
                outcome_pdf(res, x_M / f),
                delta=1e-8,
            )

    def test_readout_outside_meter_range(self):
        joint = entangle(vacuum(16), 0.5, 20)
        with self.assertRaises(GridRangeError):
            meter_projection(joint, 5.0)
