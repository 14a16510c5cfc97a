"""
Closed-form results for a vacuum signal.

Outcome distribution, post-measurement squeezed state, conditional
photon number, the field/photon-number correlation, and the split
of the outcome distribution into no-jump and quantum-jump parts.
These serve as the reference the Fock-space and two-mode paths are
checked against.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .exceptions import (
    GridCoverageError,
    IntegrationError,
    InvalidResolutionError,
    QNDError,
)

logger = logging.getLogger(__name__)

# Infinite coupling (projective limit) is not modelled.
MIN_RESOLUTION = 1e-6
VACUUM_VARIANCE = 0.25
INTEGRATION_RTOL = 1e-10
INTEGRATION_ATOL = 1e-13
INTEGRATION_SIGMAS = 8.0
COVERAGE_SIGMAS = 6.0
UNCERTAINTY_TOLERANCE = 1e-12


# ── Domain types ────────────────────────────────

@dataclass(frozen=True)
class Resolution:
    """
    Measurement resolution dx and the coupling f = 1/(2 dx).
    """

    dx: float

    def __post_init__(self):
        dx = float(self.dx)
        if not math.isfinite(dx) or dx < MIN_RESOLUTION:
            raise InvalidResolutionError(
                f'Resolution dx must be finite and >= {MIN_RESOLUTION}, '
                f'got {self.dx!r}.'
            )
        object.__setattr__(self, 'dx', dx)

    @classmethod
    def from_coupling(cls, f):
        return cls(1.0 / (2.0 * f))

    @property
    def f(self):
        return 1.0 / (2.0 * self.dx)

    @property
    def squeeze_factor(self):
        """1 + 4 dx², the denominator shared by the post-state formulas."""
        return 1.0 + 4.0 * self.dx ** 2

    @property
    def outcome_variance(self):
        """Variance dx² + 1/4 of the vacuum outcome distribution."""
        return self.dx ** 2 + VACUUM_VARIANCE


@dataclass(frozen=True)
class GaussianXYState:
    """Axis-aligned Gaussian state given by quadrature means and variances."""

    mean_x: float
    mean_y: float
    var_x: float
    var_y: float

    def __post_init__(self):
        if self.var_x <= 0 or self.var_y <= 0:
            raise QNDError('Quadrature variances must be positive.')
        if self.var_x * self.var_y < 1.0 / 16.0 - UNCERTAINTY_TOLERANCE:
            raise QNDError(
                f'var_x * var_y = {self.var_x * self.var_y:.6g} violates '
                f'the uncertainty bound 1/16.'
            )

    @property
    def std_x(self):
        return math.sqrt(self.var_x)

    @property
    def std_y(self):
        return math.sqrt(self.var_y)

    @property
    def photon_expectation(self):
        """<n> = <x²> + <y²> - 1/2."""
        return (
            self.var_x + self.mean_x ** 2
            + self.var_y + self.mean_y ** 2 - 0.5
        )


@dataclass(frozen=True, eq=False)
class JumpDecomposition:
    """
    Outcome density split into no-photon and quantum-jump parts.

    p_jump = p_total - p_zero pointwise on ``grid``; the scalar
    summaries are the closed-form integrals.
    """

    grid: np.ndarray
    p_total: np.ndarray
    p_zero: np.ndarray
    p_jump: np.ndarray
    jump_probability: float
    conditional_second_moment: float

    @property
    def integrated_total(self):
        return float(integrate.trapezoid(self.p_total, self.grid))

    @property
    def integrated_zero(self):
        return float(integrate.trapezoid(self.p_zero, self.grid))

    @property
    def integrated_jump(self):
        return float(integrate.trapezoid(self.p_jump, self.grid))


# ── Numerical integration ───────────────────────

def integrate_outcomes(func, res, center=0.0, rtol=INTEGRATION_RTOL):
    """
    Integrate ``func`` over x_m on [center - 8 sigma, center + 8 sigma].

    sigma is the vacuum outcome standard deviation. Raises
    IntegrationError when adaptive refinement misses the tolerance.
    """
    sigma = math.sqrt(res.outcome_variance)
    lower = center - INTEGRATION_SIGMAS * sigma
    upper = center + INTEGRATION_SIGMAS * sigma
    result = integrate.quad(
        func, lower, upper,
        epsabs=INTEGRATION_ATOL, epsrel=rtol, limit=200, full_output=1,
    )
    if len(result) > 3:
        raise IntegrationError(
            f'Outcome integration did not converge at dx={res.dx}: '
            f'{result[3]}'
        )
    return result[0]


# ── Outcome distribution and post state ─────────

def outcome_pdf(res, x_m):
    """Gaussian outcome density of variance dx² + 1/4 for a vacuum signal."""
    variance = res.outcome_variance
    x_m = np.asarray(x_m, dtype=float)
    density = (
        np.exp(-x_m ** 2 / (2.0 * variance))
        / np.sqrt(2.0 * np.pi * variance)
    )
    return density if density.ndim else float(density)


def outcome_grid(res, n_sigma=INTEGRATION_SIGMAS, step=None):
    """Uniform x_m grid covering +/- n_sigma outcome standard deviations."""
    sigma = math.sqrt(res.outcome_variance)
    step = step or sigma / 200.0
    count = int(math.ceil(2.0 * n_sigma * sigma / step)) + 1
    return np.linspace(-n_sigma * sigma, n_sigma * sigma, count)


def outcome_moments(res):
    """Mean and second moment of x_m under the vacuum outcome density."""
    mean = integrate_outcomes(lambda x: x * outcome_pdf(res, x), res)
    second = integrate_outcomes(lambda x: x * x * outcome_pdf(res, x), res)
    return mean, second


def post_state(res, x_m):
    """
    Squeezed state left behind by outcome x_m.

    The x quadrature is shifted by x_m / (1 + 4dx²) and squeezed;
    y is anti-squeezed so that var_x * var_y = 1/16.
    """
    factor = res.squeeze_factor
    return GaussianXYState(
        mean_x=x_m / factor,
        mean_y=0.0,
        var_x=res.dx ** 2 / factor,
        var_y=factor / (16.0 * res.dx ** 2),
    )


def post_wavefunction(res, x_m, points):
    """Position-space amplitude of the post-measurement squeezed state."""
    factor = res.squeeze_factor
    width = 4.0 * res.dx ** 2 / factor
    points = np.asarray(points, dtype=float)
    return (
        (math.pi * width) ** -0.25
        * np.exp(-(points - x_m / factor) ** 2 / width)
    )


def post_photon_expectation(res, x_m):
    """Photon number expected after outcome x_m."""
    factor = res.squeeze_factor
    return (
        1.0 / (16.0 * res.dx ** 2 * factor)
        + np.asarray(x_m) ** 2 / factor ** 2
    )


def analytic_correlation(res):
    """
    Correlation between x_m² and the conditional photon number.

    Integrates the covariance of x_m² and <n>_{x_m} over the outcome
    density; the result is 1/8 for every resolution.
    """
    def weighted(func):
        return integrate_outcomes(lambda x: func(x) * outcome_pdf(res, x), res)

    mean_square = weighted(lambda x: x * x)
    mean_photons = weighted(lambda x: post_photon_expectation(res, x))
    correlation = weighted(
        lambda x: (x * x - mean_square)
        * (post_photon_expectation(res, x) - mean_photons)
    )
    logger.debug('Analytic correlation at dx=%g: %.15f', res.dx, correlation)
    return correlation


# ── Quantum-jump decomposition ──────────────────

def zero_photon_density(res, x_m):
    """Outcome density jointly with no photon left in the signal."""
    spread = 1.0 + 8.0 * res.dx ** 2
    prefactor = math.sqrt(32.0 * res.dx ** 2 / (math.pi * spread ** 2))
    x_m = np.asarray(x_m, dtype=float)
    density = prefactor * np.exp(-4.0 * x_m ** 2 / spread)
    return density if density.ndim else float(density)


def jump_density(res, x_m):
    return outcome_pdf(res, x_m) - zero_photon_density(res, x_m)


def zero_probability(res):
    """Probability that the signal is still in the vacuum."""
    return math.sqrt(8.0 * res.dx ** 2 / (1.0 + 8.0 * res.dx ** 2))


def jump_probability(res):
    """Total probability of a jump to one or more photons."""
    return 1.0 - zero_probability(res)


def integrated_jump_probability(res):
    """Jump probability by adaptive integration of the jump density."""
    return integrate_outcomes(lambda x: jump_density(res, x), res)


def conditional_second_moment(res):
    """Mean of x_m² given a quantum jump."""
    dx2 = res.dx ** 2
    return VACUUM_VARIANCE + dx2 * (2.0 + math.sqrt(1.0 + 1.0 / (8.0 * dx2)))


def fluctuation_ratio(res):
    """Conditional second moment relative to the overall dx² + 1/4."""
    return conditional_second_moment(res) / res.outcome_variance


def jump_decomposition(res, grid):
    """Tabulate P, P_0 and P_QJ on ``grid`` with closed-form summaries."""
    grid = np.asarray(grid, dtype=float)
    reach = COVERAGE_SIGMAS * math.sqrt(res.outcome_variance)
    if grid.size < 2 or grid[0] > -reach or grid[-1] < reach:
        raise GridCoverageError(
            f'Outcome grid must cover [{-reach:.4f}, {reach:.4f}] '
            f'({COVERAGE_SIGMAS:g} standard deviations) at dx={res.dx}.'
        )
    p_total = outcome_pdf(res, grid)
    p_zero = zero_photon_density(res, grid)
    return JumpDecomposition(
        grid=grid,
        p_total=p_total,
        p_zero=p_zero,
        p_jump=p_total - p_zero,
        jump_probability=jump_probability(res),
        conditional_second_moment=conditional_second_moment(res),
    )


def jump_peak_location(res):
    """
    Location x_m >= 0 of the maximum of the jump density.

    Setting the derivative of the difference of two Gaussians to zero
    gives x² = ln(N0 b / (N a)) / (b - a); a non-positive logarithm
    puts the maximum at the origin.
    """
    variance = res.outcome_variance
    spread = 1.0 + 8.0 * res.dx ** 2
    total_rate = 1.0 / (2.0 * variance)
    zero_rate = 4.0 / spread
    total_norm = 1.0 / math.sqrt(2.0 * math.pi * variance)
    zero_norm = math.sqrt(32.0 * res.dx ** 2 / (math.pi * spread ** 2))
    try:
        log_ratio = math.log(
            (zero_norm * zero_rate) / (total_norm * total_rate)
        )
        peak_squared = log_ratio / (zero_rate - total_rate)
        if math.isfinite(peak_squared):
            return math.sqrt(peak_squared) if peak_squared > 0 else 0.0
    except (ValueError, ZeroDivisionError):
        pass
    logger.debug('Closed-form peak failed at dx=%g; searching', res.dx)
    reach = INTEGRATION_SIGMAS * math.sqrt(variance)
    found = optimize.minimize_scalar(
        lambda x: -jump_density(res, x),
        bounds=(0.0, reach), method='bounded',
        options={'xatol': 1e-12},
    )
    return float(found.x)
