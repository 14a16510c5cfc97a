"""
Brute-force Fock-space measurement path.

Builds the Gaussian measurement operator of x as a matrix, applies
it to arbitrary input states, extracts outcome densities and photon
statistics, and evaluates the operator-ordering identities on the
interior block of the truncated basis.
"""

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .exceptions import (
    DimensionMismatchError,
    EdgeContaminationError,
    IntegrationError,
    InvalidDimensionError,
    UnnormalizableOutcomeError,
)
from .fock import (
    EDGE_WIDTH,
    FockVector,
    OperatorMatrix,
    build_operators,
    expectation,
    quadrature_eigensystem,
)
from .gaussian import INTEGRATION_SIGMAS, Resolution

logger = logging.getLogger(__name__)

MIN_MEASUREMENT_DIM = 16
MIN_DENSITY = 1e-300
CORRELATION_RTOL = 1e-8
# Largest amplitude, and probability, allowed in the excluded edge levels.
EDGE_AMPLITUDE = 1e-6
EDGE_LEAKAGE = 1e-8
PATH_AGREEMENT = 1e-6


@dataclass(frozen=True, eq=False)
class MeasurementOperator:
    """
    Kraus operator (2 pi dx²)^(-1/4) exp(-(x_m - x)² / (4 dx²)).

    ``warnings`` lists range problems found at construction, such as a
    readout beyond the largest resolvable eigenvalue of x.
    """

    res: Resolution
    x_m: float
    matrix: OperatorMatrix
    warnings: tuple = ()

    @property
    def dim(self):
        return self.matrix.dim


class MeasurementResult(NamedTuple):
    post: FockVector
    density: float


class OrderingExpectations(NamedTuple):
    xnx: float
    sym: float
    difference: float


def _kernel(res, offsets):
    """Gaussian weight of the measurement operator at x_m - lambda."""
    return (
        (2.0 * math.pi * res.dx ** 2) ** -0.25
        * np.exp(-offsets ** 2 / (4.0 * res.dx ** 2))
    )


def build_measurement_operator(res, x_m, dim):
    """
    Matrix of the measurement operator for readout ``x_m``.

    The Gaussian of x is formed in the eigenbasis of the truncated x
    matrix: V diag(g(x_m - lambda_k)) V^T.
    """
    if dim < MIN_MEASUREMENT_DIM:
        raise InvalidDimensionError(
            f'Measurement operators need dim >= {MIN_MEASUREMENT_DIM}, '
            f'got {dim}.'
        )
    eigenvalues, vectors = quadrature_eigensystem(dim)
    weights = _kernel(res, x_m - eigenvalues)
    entries = (vectors * weights) @ vectors.T
    notes = []
    reach = float(np.max(np.abs(eigenvalues)))
    if abs(x_m) > reach:
        notes.append(
            f'Readout x_m={x_m} lies beyond the largest resolvable '
            f'eigenvalue {reach:.4f} at dim={dim}.'
        )
        logger.warning(notes[-1])
    return MeasurementOperator(
        res=res,
        x_m=float(x_m),
        matrix=OperatorMatrix((entries + entries.T) / 2.0, hermitian=True),
        warnings=tuple(notes),
    )


def outcome_amplitudes(state, res, x_m_values):
    """
    Unnormalized post states P(x_m)|state> for many readouts at once.

    Returns a (len(x_m_values), dim) complex array; row norms squared
    are the outcome densities.
    """
    eigenvalues, vectors = quadrature_eigensystem(state.dim)
    coefficients = vectors.T @ state.amps
    x_m_values = np.atleast_1d(np.asarray(x_m_values, dtype=float))
    weights = _kernel(res, x_m_values[:, None] - eigenvalues[None, :])
    return (weights * coefficients) @ vectors.T


def outcome_density(state, res, x_m_values):
    """Outcome density <state|P(x_m)²|state> at each readout."""
    amplitudes = outcome_amplitudes(state, res, x_m_values)
    return np.sum(np.abs(amplitudes) ** 2, axis=1)


def apply_measurement(state, mop):
    """
    Post-measurement state and the outcome density.

    The post state is P|state> / sqrt(density).
    """
    if state.dim != mop.dim:
        raise DimensionMismatchError(
            f'State dim {state.dim} does not match operator dim {mop.dim}.'
        )
    projected = mop.matrix.entries @ state.amps
    density = float(np.vdot(projected, projected).real)
    if density <= MIN_DENSITY:
        raise UnnormalizableOutcomeError(
            f'Outcome x_m={mop.x_m} has vanishing density {density:.3e}.'
        )
    return MeasurementResult(
        post=FockVector(projected / math.sqrt(density), state.leakage),
        density=density,
    )


def photon_distribution(state):
    """Photon-number probabilities |amps[n]|²."""
    return np.abs(state.amps) ** 2


def jump_components(res, x_m_values, dim):
    """
    Fock-path P, P_0 and P_QJ for a vacuum signal.

    P_0 is the squared vacuum amplitude left after the measurement;
    P_QJ collects every level above it.
    """
    vacuum = np.zeros(dim, dtype=complex)
    vacuum[0] = 1.0
    amplitudes = outcome_amplitudes(FockVector(vacuum), res, x_m_values)
    probabilities = np.abs(amplitudes) ** 2
    total = probabilities.sum(axis=1)
    zero = probabilities[:, 0]
    return total, zero, total - zero


def povm_completeness_residual(res, dim, step=None):
    """
    Max deviation of sum_j w_j P(x_j)² from the identity.

    The outcome grid covers every eigenvalue of the truncated x with
    eight resolution widths to spare; residuals are read on the
    interior block.
    """
    eigenvalues, vectors = quadrature_eigensystem(dim)
    reach = float(np.max(np.abs(eigenvalues))) + INTEGRATION_SIGMAS * res.dx
    step = step or res.dx / 50.0
    grid = np.linspace(-reach, reach, int(math.ceil(2.0 * reach / step)) + 1)
    kernel = _kernel(res, grid[:, None] - eigenvalues[None, :]) ** 2
    totals = integrate.trapezoid(kernel, grid, axis=0)
    summed = (vectors * totals) @ vectors.T
    keep = dim - EDGE_WIDTH
    return float(np.max(np.abs(summed[:keep, :keep] - np.eye(keep))))


def outcome_moments_fock(state, res):
    """
    First and second moments of x_m for an arbitrary input state.

    Integrated numerically from the Fock-path outcome density; they
    equal <x> and <x²> + dx².
    """
    ops = build_operators(state.dim)
    mean = expectation(state, ops.x).real
    spread = math.sqrt(
        max(expectation(state, ops.x @ ops.x).real - mean ** 2, 0.0)
        + res.dx ** 2
    )
    lower = mean - INTEGRATION_SIGMAS * spread
    upper = mean + INTEGRATION_SIGMAS * spread

    def integrand(x_m):
        density = outcome_density(state, res, [x_m])[0]
        return np.array([x_m * density, x_m * x_m * density])

    values = _integrate_vector(integrand, lower, upper, res)
    return values[0], values[1]


# ── Operator ordering ───────────────────────────

def _check_edge(state, limit):
    weight = state.edge_weight(EDGE_WIDTH)
    if weight >= limit:
        raise EdgeContaminationError(
            f'State holds weight {weight:.3e} in the top {EDGE_WIDTH} '
            f'levels of dim={state.dim}; increase the dimension.'
        )


def ordering_expectations(state):
    """
    <x n x>, <(x² n + n x²)/2> and their difference.

    Operator products are evaluated on the interior block, which drops
    the top EDGE_WIDTH levels where truncation corrupts them. The
    difference equals <state|state>/4 for any state clear of the edge.
    """
    _check_edge(state, EDGE_AMPLITUDE ** 2)
    ops = build_operators(state.dim)
    x, n = ops.x, ops.n
    xnx = (x @ n @ x).interior()
    symmetric = ((x @ x @ n).interior() + (n @ x @ x).interior()) / 2.0
    inner = state.amps[:state.dim - EDGE_WIDTH]
    xnx_value = float(np.vdot(inner, xnx @ inner).real)
    sym_value = float(np.vdot(inner, symmetric @ inner).real)
    return OrderingExpectations(
        xnx=xnx_value,
        sym=sym_value,
        difference=xnx_value - sym_value,
    )


# ── Correlation of x_m² and photon number ───────

def _integrate_vector(integrand, lower, upper, res, rtol=CORRELATION_RTOL):
    values, error = integrate.quad_vec(
        integrand, lower, upper, epsrel=rtol, epsabs=1e-13, norm='max',
    )
    if not np.all(np.isfinite(values)) or error > rtol * max(
        float(np.max(np.abs(values))), 1.0
    ):
        raise IntegrationError(
            f'Outcome integration did not reach rtol={rtol} at '
            f'dx={res.dx} (error {error:.2e}).'
        )
    return values


def _outcome_averages(state, res):
    """
    Outcome integrals of the unnormalized post-state expectations.

    Columns: norm, x_m² norm, n, x_m² n, x², ordered product
    (x² n + 2 x n x + n x²)/4.
    """
    _check_edge(state, EDGE_LEAKAGE)
    ops = build_operators(state.dim)
    x, n = ops.x.entries, ops.n.entries
    square = x @ x
    ordered = (square @ n + 2.0 * x @ n @ x + n @ square) / 4.0
    mean = expectation(state, ops.x).real
    spread = math.sqrt(
        max(expectation(state, ops.x @ ops.x).real - mean ** 2, 0.0)
        + res.dx ** 2
    )

    def integrand(x_m):
        post = outcome_amplitudes(state, res, [x_m])[0]
        norm = float(np.vdot(post, post).real)
        photons = float(np.vdot(post, n @ post).real)
        return np.array([
            norm,
            x_m * x_m * norm,
            photons,
            x_m * x_m * photons,
            float(np.vdot(post, square @ post).real),
            float(np.vdot(post, ordered @ post).real),
        ])

    values = _integrate_vector(
        integrand,
        mean - INTEGRATION_SIGMAS * spread,
        mean + INTEGRATION_SIGMAS * spread,
        res,
    )
    return values / values[0]


def outcome_averaged_correlation(state, res):
    """Covariance of x_m² and <n>_{x_m} over the outcome distribution."""
    averages = _outcome_averages(state, res)
    return averages[3] - averages[1] * averages[2]


def correlation_operator_form(state, res):
    """
    Correlation from outcome-averaged operator expectations.

    Evaluates <(x² n + 2 x n x + n x²)/4>_av - <n>_av <x²>_av and checks
    it against the direct outcome average of x_m² <n>_{x_m}.
    """
    averages = _outcome_averages(state, res)
    direct = averages[3] - averages[1] * averages[2]
    operator_form = averages[5] - averages[2] * averages[4]
    if abs(direct - operator_form) > PATH_AGREEMENT:
        raise IntegrationError(
            f'Operator form {operator_form:.10f} and outcome average '
            f'{direct:.10f} disagree at dx={res.dx}.'
        )
    logger.debug(
        'Operator-form correlation at dx=%g: %.12f', res.dx, operator_form
    )
    return operator_form
