"""
Phase-space view of Gaussian signal states.

Axis-aligned Gaussian Wigner functions, their closed-form moments,
and the classical-looking intensity correlation <x² I> - <x²><I>
with I = x² + y². Coupling to a vacuum meter only broadens y, so the
correlation is unchanged by the interaction and equals the quantum
measurement correlation.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .exceptions import IntegrationError, QNDError, UnsupportedOrderError
from .gaussian import VACUUM_VARIANCE, GaussianXYState

logger = logging.getLogger(__name__)

MAX_MOMENT_ORDER = 8
QUADRATURE_SIGMAS = 12.0
QUADRATURE_EPSABS = 1e-13
QUADRATURE_EPSREL = 1e-12


@dataclass(frozen=True)
class GaussianWigner:
    """
    W(x, y) for independent Gaussian quadratures.

    Normalized by construction. Vacuum has var_x = var_y = 1/4.
    """

    mean_x: float
    mean_y: float
    var_x: float
    var_y: float

    def __post_init__(self):
        if not (self.var_x > 0 and self.var_y > 0):
            raise QNDError(
                f'Wigner variances must be positive, got '
                f'({self.var_x}, {self.var_y}).'
            )

    @classmethod
    def vacuum(cls):
        return cls(0.0, 0.0, VACUUM_VARIANCE, VACUUM_VARIANCE)

    @classmethod
    def coherent(cls, alpha):
        alpha = complex(alpha)
        return cls(alpha.real, alpha.imag, VACUUM_VARIANCE, VACUUM_VARIANCE)

    @classmethod
    def squeezed(cls, r):
        return cls(
            0.0, 0.0,
            VACUUM_VARIANCE * math.exp(-2.0 * r),
            VACUUM_VARIANCE * math.exp(2.0 * r),
        )

    @classmethod
    def from_state(cls, state: GaussianXYState):
        return cls(state.mean_x, state.mean_y, state.var_x, state.var_y)

    @property
    def std_x(self):
        return math.sqrt(self.var_x)

    @property
    def std_y(self):
        return math.sqrt(self.var_y)

    def density(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        value = (
            np.exp(
                -(x - self.mean_x) ** 2 / (2.0 * self.var_x)
                - (y - self.mean_y) ** 2 / (2.0 * self.var_y)
            )
            / (2.0 * math.pi * math.sqrt(self.var_x * self.var_y))
        )
        return value if value.ndim else float(value)


def _double_factorial(k):
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def _raw_moment(mean, variance, order):
    """E[z^order] for z ~ N(mean, variance)."""
    return sum(
        math.comb(order, m)
        * mean ** (order - m)
        * variance ** (m // 2)
        * _double_factorial(m - 1)
        for m in range(0, order + 1, 2)
    )


def moments(w, i, j):
    """<x^i y^j> under W, exact for orders i + j <= 8."""
    if i < 0 or j < 0 or int(i) != i or int(j) != j:
        raise UnsupportedOrderError(
            f'Moment orders must be non-negative integers, got ({i}, {j}).'
        )
    if i + j > MAX_MOMENT_ORDER:
        raise UnsupportedOrderError(
            f'Moment order {i + j} exceeds the supported maximum '
            f'{MAX_MOMENT_ORDER}.'
        )
    return (
        _raw_moment(w.mean_x, w.var_x, int(i))
        * _raw_moment(w.mean_y, w.var_y, int(j))
    )


def intensity_correlation(w):
    """<x² I> - <x²><I> with I = x² + y²."""
    second_x = moments(w, 2, 0)
    intensity = second_x + moments(w, 0, 2)
    return moments(w, 4, 0) + moments(w, 2, 2) - second_x * intensity


def post_interaction_wigner(w, res):
    """
    Signal Wigner function after coupling to a vacuum meter.

    y picks up -f y_M, adding f²/4 to its variance; x is untouched.
    """
    return GaussianWigner(
        mean_x=w.mean_x,
        mean_y=w.mean_y,
        var_x=w.var_x,
        var_y=w.var_y + res.f ** 2 * VACUUM_VARIANCE,
    )


def numerical_moment(w, i, j):
    """<x^i y^j> by adaptive 2-D quadrature over +/- 12 sigma."""
    x_lo = w.mean_x - QUADRATURE_SIGMAS * w.std_x
    x_hi = w.mean_x + QUADRATURE_SIGMAS * w.std_x
    y_lo = w.mean_y - QUADRATURE_SIGMAS * w.std_y
    y_hi = w.mean_y + QUADRATURE_SIGMAS * w.std_y
    value, error = integrate.dblquad(
        lambda y, x: x ** i * y ** j * w.density(x, y),
        x_lo, x_hi, y_lo, y_hi,
        epsabs=QUADRATURE_EPSABS, epsrel=QUADRATURE_EPSREL,
    )
    if not math.isfinite(value):
        raise IntegrationError(f'Moment ({i}, {j}) quadrature diverged.')
    logger.debug('Numerical moment (%d, %d): %.15g +/- %.1e', i, j, value, error)
    return value


def std_ellipse(w, n_points=181):
    """Closed standard-deviation contour as (x, y) arrays."""
    theta = np.linspace(0.0, 2.0 * math.pi, n_points)
    return (
        w.mean_x + w.std_x * np.cos(theta),
        w.mean_y + w.std_y * np.sin(theta),
    )
