"""
Truncated Fock-space linear algebra.

Basis states, quadrature and photon-number operator matrices, and
the position-representation (Hermite function) transforms that the
analytic, brute-force and two-mode paths all build on.

Quadratures follow x = (a + a†)/2 and y = (a - a†)/(2i), so the
vacuum has <x²> = <y²> = 1/4 and n + 1/2 = x² + y².
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np
from scipy import linalg
from scipy.stats import poisson

from .exceptions import (
    DimensionMismatchError,
    EigendecompositionError,
    GridRangeError,
    InvalidDimensionError,
    QNDError,
    TruncationError,
)

logger = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-12
LEAKAGE_TOLERANCE = 1e-8
# Top levels excluded from operator-product checks.
EDGE_WIDTH = 2
GRID_MARGIN = 4.0
DEFAULT_GRID_STEP = 0.02


def _read_only(array):
    array.setflags(write=False)
    return array


def _check_dim(dim, minimum=2):
    if int(dim) != dim or dim < minimum:
        raise InvalidDimensionError(
            f'Truncation dimension must be an integer >= {minimum}, '
            f'got {dim!r}.'
        )
    return int(dim)


# ── Domain types ────────────────────────────────

@dataclass(frozen=True, eq=False)
class FockVector:
    """
    Pure state amplitudes over the photon-number basis.

    ``amps[n]`` is the amplitude of |n>, n < dim. ``leakage`` is
    the norm known to be lost past the top level when the state
    was built; it is reported alongside the state, never hidden.
    """

    amps: np.ndarray
    leakage: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.size < 2:
            raise InvalidDimensionError(
                f'Fock vectors need a 1-D amplitude array with dim >= 2, '
                f'got shape {amps.shape}.'
            )
        object.__setattr__(self, 'amps', _read_only(amps))

    @property
    def dim(self):
        return self.amps.size

    @property
    def norm_squared(self):
        return float(np.vdot(self.amps, self.amps).real)

    def normalized(self):
        """Return a unit-norm copy of this state."""
        norm = math.sqrt(self.norm_squared)
        if norm == 0.0:
            raise QNDError('Cannot normalize the zero vector.')
        return FockVector(self.amps / norm, self.leakage)

    def edge_weight(self, width=EDGE_WIDTH):
        """Probability held by the top ``width`` levels."""
        return float(np.sum(np.abs(self.amps[-width:]) ** 2))


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """
    Operator in the truncated Fock basis.

    When ``hermitian`` is set the entries are checked against
    their conjugate transpose on construction.
    """

    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(
                f'Operator matrices must be square, got {entries.shape}.'
            )
        _check_dim(entries.shape[0])
        if self.hermitian:
            residual = float(np.max(np.abs(entries - entries.conj().T)))
            if residual > HERMITIAN_TOLERANCE:
                raise QNDError(
                    f'Matrix flagged Hermitian has residual {residual:.3e}.'
                )
        object.__setattr__(self, 'entries', _read_only(entries))

    @property
    def dim(self):
        return self.entries.shape[0]

    def __matmul__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        _check_same_dim(self.dim, other.dim)
        return OperatorMatrix(self.entries @ other.entries)

    def apply(self, state):
        """Act on a state; the result is not renormalized."""
        _check_same_dim(self.dim, state.dim)
        return FockVector(self.entries @ state.amps, state.leakage)

    def interior(self, width=EDGE_WIDTH):
        """Block of rows and columns below ``dim - width``."""
        keep = self.dim - width
        return self.entries[:keep, :keep]

    @cached_property
    def eigensystem(self):
        """Eigenvalues and eigenvectors of a Hermitian operator."""
        if not self.hermitian:
            raise QNDError('Eigensystem requested for non-Hermitian operator.')
        try:
            values, vectors = linalg.eigh(self.entries)
        except linalg.LinAlgError as exc:
            raise EigendecompositionError(
                f'Eigendecomposition failed at dim={self.dim}: {exc}'
            ) from exc
        return _read_only(values), _read_only(vectors)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """
    Integration grid over a quadrature variable.

    Points are strictly increasing and weights positive; the
    reference construction is a uniform trapezoid rule.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if points.ndim != 1 or points.shape != weights.shape:
            raise QNDError('Grid points and weights must be 1-D and equal length.')
        if points.size < 2 or np.any(np.diff(points) <= 0):
            raise QNDError('Grid points must be strictly increasing.')
        if np.any(weights <= 0):
            raise QNDError('Grid weights must be positive.')
        object.__setattr__(self, 'points', _read_only(points))
        object.__setattr__(self, 'weights', _read_only(weights))

    @classmethod
    def uniform(cls, half_span, step=DEFAULT_GRID_STEP):
        """Trapezoid grid on [-half_span, half_span] with spacing <= step."""
        if half_span <= 0 or step <= 0:
            raise QNDError('Grid span and step must be positive.')
        count = int(math.ceil(2.0 * half_span / step)) + 1
        points = np.linspace(-half_span, half_span, count)
        spacing = points[1] - points[0]
        weights = np.full(count, spacing)
        weights[0] = weights[-1] = spacing / 2.0
        return cls(points, weights)

    @property
    def lower(self):
        return float(self.points[0])

    @property
    def upper(self):
        return float(self.points[-1])


class QuadratureOperators(NamedTuple):
    x: OperatorMatrix
    y: OperatorMatrix
    n: OperatorMatrix
    a: OperatorMatrix


def _check_same_dim(left, right):
    if left != right:
        raise DimensionMismatchError(
            f'Dimension mismatch: {left} vs {right}.'
        )


# ── Operators ───────────────────────────────────

def build_operators(dim):
    """
    Return the truncated x, y, n and annihilation matrices.

    a[k-1, k] = sqrt(k); x and y are Hermitian; n is diagonal.
    Results are cached per dimension and read-only.
    """
    return _build_operators(_check_dim(dim))


@lru_cache(maxsize=32)
def _build_operators(dim):
    logger.debug('Building quadrature operators at dim=%d', dim)
    levels = np.arange(dim)
    lowering = np.diag(np.sqrt(levels[1:]), k=1).astype(complex)
    raising = lowering.conj().T
    return QuadratureOperators(
        x=OperatorMatrix((lowering + raising) / 2.0, hermitian=True),
        y=OperatorMatrix((lowering - raising) / 2.0j, hermitian=True),
        n=OperatorMatrix(np.diag(levels), hermitian=True),
        a=OperatorMatrix(lowering),
    )


def quadrature_eigensystem(dim):
    """
    Eigenvalues and real eigenvectors of the truncated x matrix.

    The matrix is tridiagonal with zero diagonal, so the dedicated
    tridiagonal solver is used. Cached per dimension.
    """
    return _quadrature_eigensystem(_check_dim(dim))


@lru_cache(maxsize=32)
def _quadrature_eigensystem(dim):
    logger.debug('Diagonalizing truncated x at dim=%d', dim)
    try:
        values, vectors = linalg.eigh_tridiagonal(
            np.zeros(dim), np.sqrt(np.arange(1, dim)) / 2.0
        )
    except linalg.LinAlgError as exc:
        raise EigendecompositionError(
            f'Tridiagonal eigensolver failed at dim={dim}: {exc}'
        ) from exc
    return _read_only(values), _read_only(vectors)


def hermitian_function(op, func):
    """Apply a scalar function to a Hermitian operator through its eigensystem."""
    values, vectors = op.eigensystem
    mapped = np.asarray(func(values))
    entries = (vectors * mapped) @ vectors.conj().T
    if np.isrealobj(mapped):
        entries = (entries + entries.conj().T) / 2.0
        return OperatorMatrix(entries, hermitian=True)
    return OperatorMatrix(entries)


def expectation(state, op):
    """Return <state|op|state> as a complex number."""
    _check_same_dim(state.dim, op.dim)
    return complex(np.vdot(state.amps, op.entries @ state.amps))


# ── States ──────────────────────────────────────

def vacuum(dim):
    return fock_state(0, dim)


def fock_state(level, dim):
    """Photon-number eigenstate |level> in a basis of size ``dim``."""
    dim = _check_dim(dim)
    if not 0 <= level < dim:
        raise InvalidDimensionError(
            f'Level {level} does not fit in dim={dim}.'
        )
    amps = np.zeros(dim, dtype=complex)
    amps[level] = 1.0
    return FockVector(amps)


def coherent_state(alpha, dim):
    """
    Truncated coherent state |alpha>.

    Raises TruncationError when the Poisson tail past ``dim`` exceeds
    the leakage tolerance, with the dimension that would suffice.
    """
    dim = _check_dim(dim)
    alpha = complex(alpha)
    mean = abs(alpha) ** 2
    steps = alpha / np.sqrt(np.arange(1, dim))
    amps = math.exp(-mean / 2.0) * np.concatenate(([1.0], np.cumprod(steps)))
    leakage = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    if leakage > LEAKAGE_TOLERANCE:
        required = int(poisson.isf(LEAKAGE_TOLERANCE, mean)) + 2
        raise TruncationError(
            f'Coherent state alpha={alpha} leaks {leakage:.2e} past '
            f'dim={dim}; use dim >= {required}.',
            required_dim=required,
        )
    return FockVector(amps, leakage)


def _squeezed_amplitudes(r, dim):
    amps = np.zeros(dim)
    ratio = -math.tanh(r)
    amps[0] = 1.0 / math.sqrt(math.cosh(r))
    for level in range(2, dim, 2):
        amps[level] = (
            amps[level - 2] * ratio
            * math.sqrt((level - 1) / level)
        )
    return amps


def squeezed_vacuum(r, dim):
    """
    Squeezed vacuum with <x²> = exp(-2r)/4 and <y²> = exp(2r)/4.

    Only even levels are populated. Raises TruncationError when the
    tail past ``dim`` exceeds the leakage tolerance.
    """
    dim = _check_dim(dim)
    amps = _squeezed_amplitudes(float(r), dim)
    leakage = max(0.0, 1.0 - float(np.sum(amps ** 2)))
    if leakage > LEAKAGE_TOLERANCE:
        required = dim
        while required < 1 << 16:
            required *= 2
            tail = 1.0 - float(np.sum(_squeezed_amplitudes(r, required) ** 2))
            if tail <= LEAKAGE_TOLERANCE:
                break
        raise TruncationError(
            f'Squeezed vacuum r={r} leaks {leakage:.2e} past dim={dim}; '
            f'use dim >= {required}.',
            required_dim=required,
        )
    return FockVector(amps, leakage)


# ── Position representation ─────────────────────

def default_grid(dim, step=DEFAULT_GRID_STEP):
    """Reference uniform grid on [-(sqrt(dim) + 4), sqrt(dim) + 4]."""
    return QuadratureGrid.uniform(math.sqrt(dim) + GRID_MARGIN, step)


def hermite_functions(points, dim):
    """
    Position wavefunctions <x|n> for n < dim at arbitrary points.

    psi_n(x) = 2^(1/4) phi_n(sqrt(2) x), with phi_n the unit-oscillator
    Hermite function, evaluated through the normalized three-term
    recurrence so high levels do not overflow.
    """
    dim = _check_dim(dim, minimum=1)
    u = math.sqrt(2.0) * np.atleast_1d(np.asarray(points, dtype=float))
    table = np.empty((dim, u.size))
    table[0] = np.pi ** -0.25 * np.exp(-u ** 2 / 2.0)
    if dim > 1:
        table[1] = math.sqrt(2.0) * u * table[0]
    for level in range(1, dim - 1):
        table[level + 1] = (
            math.sqrt(2.0 / (level + 1)) * u * table[level]
            - math.sqrt(level / (level + 1)) * table[level - 1]
        )
    return table * 2.0 ** 0.25


def hermite_wavefunctions(grid, dim):
    """
    Hermite functions sampled on a grid wide enough for level dim-1.

    Returns a (dim, len(grid)) real matrix whose rows are orthonormal
    under the grid weights.
    """
    dim = _check_dim(dim)
    required = math.sqrt(dim) + GRID_MARGIN
    if grid.lower > -required + 1e-9 or grid.upper < required - 1e-9:
        raise GridRangeError(
            f'Grid [{grid.lower:.4f}, {grid.upper:.4f}] too narrow for '
            f'dim={dim}; it must span at least '
            f'[{-required:.4f}, {required:.4f}].'
        )
    return hermite_functions(grid.points, dim)


def to_grid(state, grid):
    """Position-space wavefunction of ``state`` sampled on ``grid``."""
    return state.amps @ hermite_wavefunctions(grid, state.dim)


def from_grid(values, grid, dim):
    """Project a sampled wavefunction back onto the first ``dim`` levels."""
    basis = hermite_wavefunctions(grid, dim)
    return FockVector(basis @ (grid.weights * np.asarray(values)))
