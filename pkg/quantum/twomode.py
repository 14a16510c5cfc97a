"""
Explicit signal–meter coupling.

Builds exp(-i 2f x_S y_M) from the separate eigensystems of x_S and
y_M, entangles a vacuum meter with a signal, and projects the meter
onto a quadrature readout. The conditional signal states must equal
the ones the Gaussian measurement operator produces; this module is
the ground truth for that reduction.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np

from .exceptions import (
    GridRangeError,
    InvalidDimensionError,
    QNDError,
    TruncationError,
    UnnormalizableOutcomeError,
)
from .fock import (
    EDGE_WIDTH,
    LEAKAGE_TOLERANCE,
    FockVector,
    build_operators,
    hermite_functions,
    quadrature_eigensystem,
)

logger = logging.getLogger(__name__)

MIN_MODE_DIM = 16
UNITARITY_TOLERANCE = 1e-8
MIN_DENSITY = 1e-300


def meter_dimension(f, dim_s):
    """Smallest meter dimension with headroom for the shift f x_S."""
    return dim_s + int(math.ceil(8.0 * f ** 2))


def coupling_from_gain(a):
    """Coupling f = (a² - 1)/a of an amplifier pair with gain a."""
    if a <= 0:
        raise QNDError(f'Amplifier gain must be positive, got {a}.')
    return (a ** 2 - 1.0) / a


def gain_from_coupling(f):
    """Positive gain a solving (a² - 1)/a = f."""
    return (f + math.sqrt(f ** 2 + 4.0)) / 2.0


def fidelity(first, second):
    """|<first|second>|² of two normalized states."""
    return float(abs(np.vdot(first.amps, second.amps)) ** 2)


# ── Domain types ────────────────────────────────

@dataclass(frozen=True, eq=False)
class TwoModeState:
    """
    Joint signal–meter amplitudes; amps[s, m] multiplies |s>|m>.

    ``f`` is the coupling factor that produced the state.
    """

    amps: np.ndarray
    f: float = 0.0
    leakage: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        if amps.ndim != 2:
            raise InvalidDimensionError('Two-mode amplitudes must be 2-D.')
        amps.setflags(write=False)
        object.__setattr__(self, 'amps', amps)

    @property
    def dim_s(self):
        return self.amps.shape[0]

    @property
    def dim_m(self):
        return self.amps.shape[1]

    @property
    def norm_squared(self):
        return float(np.sum(np.abs(self.amps) ** 2))

    def reduced_signal(self):
        """Signal density matrix with the meter traced out."""
        return self.amps @ self.amps.conj().T

    def signal_expectation(self, op):
        return complex(np.einsum(
            'sm,st,tm->', self.amps.conj(), op.entries, self.amps
        ))

    def meter_expectation(self, op):
        return complex(np.einsum(
            'sm,mk,sk->', self.amps.conj(), op.entries, self.amps
        ))

    def joint_expectation(self, signal_op, meter_op):
        """<signal_op ⊗ meter_op>."""
        return complex(np.einsum(
            'sm,st,mk,tk->',
            self.amps.conj(), signal_op.entries, meter_op.entries, self.amps,
        ))


class MeterReadout(NamedTuple):
    conditional_signal: FockVector
    joint_density: float
    x_m: float


@dataclass(frozen=True, eq=False)
class CouplingUnitary:
    """
    exp(-i 2f x_S ⊗ y_M) held in factored form.

    U = (V_x ⊗ V_y) diag(exp(-i 2f lambda_k mu_l)) (V_x ⊗ V_y)†,
    applied to a state without forming the full matrix; ``matrix``
    builds it on demand.
    """

    f: float
    dim_s: int
    dim_m: int
    signal_values: np.ndarray
    signal_vectors: np.ndarray
    meter_values: np.ndarray
    meter_vectors: np.ndarray

    @cached_property
    def phases(self):
        return np.exp(
            -2j * self.f
            * np.outer(self.signal_values, self.meter_values)
        )

    def apply(self, amps):
        """Apply U to a (dim_s, dim_m) amplitude array."""
        vx, vy = self.signal_vectors, self.meter_vectors
        rotated = vx.conj().T @ amps @ vy.conj()
        return vx @ (self.phases * rotated) @ vy.T

    @cached_property
    def matrix(self):
        basis = np.kron(self.signal_vectors, self.meter_vectors)
        return (basis * self.phases.ravel()) @ basis.conj().T

    def factor_residual(self):
        """Unitarity defect of the eigenvector factors."""
        return max(
            float(np.max(np.abs(
                vectors.conj().T @ vectors - np.eye(vectors.shape[0])
            )))
            for vectors in (self.signal_vectors, self.meter_vectors)
        )

    def unitarity_residual(self):
        """Max |U†U - I| on the interior block of the full matrix."""
        product = self.matrix.conj().T @ self.matrix
        keep = _interior_indices(self.dim_s, self.dim_m)
        block = product[np.ix_(keep, keep)]
        return float(np.max(np.abs(block - np.eye(keep.size))))


def _interior_indices(dim_s, dim_m, width=EDGE_WIDTH):
    signal = np.arange(dim_s - width)
    meter = np.arange(dim_m - width)
    return (signal[:, None] * dim_m + meter[None, :]).ravel()


# ── Operations ──────────────────────────────────

def build_coupling_unitary(f, dim_s, dim_m):
    """
    Coupling unitary for factor ``f`` on dim_s × dim_m levels.

    The meter must satisfy the sizing rule dim_m >= dim_s + ceil(8 f²);
    undersized meters raise TruncationError naming the dimension to use.
    Results are cached per (f, dim_s, dim_m).
    """
    if f < 0:
        raise QNDError(f'Coupling factor must be non-negative, got {f}.')
    if dim_s < MIN_MODE_DIM or dim_m < MIN_MODE_DIM:
        raise InvalidDimensionError(
            f'Two-mode dims must be >= {MIN_MODE_DIM}, got {dim_s}×{dim_m}.'
        )
    required = meter_dimension(f, dim_s)
    if dim_m < required:
        raise TruncationError(
            f'Meter dimension {dim_m} cannot absorb the shift at f={f:g} '
            f'with dim_s={dim_s}; use a meter dimension >= {required}.',
            required_dim=required,
        )
    return _build_coupling_unitary(float(f), int(dim_s), int(dim_m))


@lru_cache(maxsize=8)
def _build_coupling_unitary(f, dim_s, dim_m):
    logger.debug('Building coupling unitary f=%g at %d×%d', f, dim_s, dim_m)
    signal_values, signal_vectors = quadrature_eigensystem(dim_s)
    meter_values, meter_vectors = build_operators(dim_m).y.eigensystem
    coupling = CouplingUnitary(
        f=f,
        dim_s=dim_s,
        dim_m=dim_m,
        signal_values=signal_values,
        signal_vectors=signal_vectors.astype(complex),
        meter_values=meter_values,
        meter_vectors=meter_vectors,
    )
    residual = coupling.factor_residual()
    if residual > UNITARITY_TOLERANCE:
        raise TruncationError(
            f'Coupling unitary residual {residual:.2e} exceeds '
            f'{UNITARITY_TOLERANCE:g}; increase the meter dimension.',
            required_dim=meter_dimension(f, dim_s),
        )
    return coupling


def entangle(signal, f, dim_m):
    """
    Couple ``signal`` to a vacuum meter of ``dim_m`` levels.

    Raises TruncationError when the joint state pushes more than the
    leakage tolerance into the top levels of either mode.
    """
    coupling = build_coupling_unitary(f, signal.dim, dim_m)
    initial = np.zeros((signal.dim, dim_m), dtype=complex)
    initial[:, 0] = signal.amps
    joint = coupling.apply(initial)
    probabilities = np.abs(joint) ** 2
    leakage = max(
        float(probabilities[-EDGE_WIDTH:, :].sum()),
        float(probabilities[:, -EDGE_WIDTH:].sum()),
    )
    if leakage > LEAKAGE_TOLERANCE:
        raise TruncationError(
            f'Joint state leaks {leakage:.2e} into the edge levels at '
            f'{signal.dim}×{dim_m}; use a meter dimension >= '
            f'{meter_dimension(f, signal.dim) + 8}.',
            required_dim=meter_dimension(f, signal.dim) + 8,
        )
    return TwoModeState(joint, f=float(f), leakage=signal.leakage + leakage)


def meter_projection(joint, x_M):
    """
    Project the meter on the quadrature eigenvalue ``x_M``.

    Returns the normalized conditional signal state, the joint
    density in x_M, and the scaled readout x_m = x_M / f.
    """
    reach = math.sqrt(joint.dim_m)
    if abs(x_M) > reach:
        raise GridRangeError(
            f'Meter readout {x_M} outside the resolvable range '
            f'[{-reach:.4f}, {reach:.4f}] for dim_m={joint.dim_m}.'
        )
    wavefunctions = hermite_functions([x_M], joint.dim_m)[:, 0]
    conditional = joint.amps @ wavefunctions
    density = float(np.vdot(conditional, conditional).real)
    if density <= MIN_DENSITY:
        raise UnnormalizableOutcomeError(
            f'Meter readout x_M={x_M} has vanishing density.'
        )
    return MeterReadout(
        conditional_signal=FockVector(conditional / math.sqrt(density)),
        joint_density=density,
        x_m=x_M / joint.f if joint.f else math.nan,
    )


def heisenberg_residuals(coupling, signal_block=None, meter_block=None):
    """
    Max deviations of U† A U from the expected transforms.

    Checks x_S, y_S - f y_M, x_M + f x_S, y_M and the photon number
    n_S - 2f y_S y_M + f² y_M² on the low-lying block of signal levels
    below ``signal_block`` and meter levels below ``meter_block``
    (default: a quarter of each dimension).
    """
    f = coupling.f
    signal_ops = build_operators(coupling.dim_s)
    meter_ops = build_operators(coupling.dim_m)
    eye_s = np.eye(coupling.dim_s)
    eye_m = np.eye(coupling.dim_m)
    xs, ys, ns = (
        signal_ops.x.entries, signal_ops.y.entries, signal_ops.n.entries
    )
    xm, ym = meter_ops.x.entries, meter_ops.y.entries
    expected = {
        'x_S': (np.kron(xs, eye_m), np.kron(xs, eye_m)),
        'y_S': (np.kron(ys, eye_m), np.kron(ys, eye_m) - f * np.kron(eye_s, ym)),
        'x_M': (np.kron(eye_s, xm), np.kron(eye_s, xm) + f * np.kron(xs, eye_m)),
        'y_M': (np.kron(eye_s, ym), np.kron(eye_s, ym)),
        'n_S': (
            np.kron(ns, eye_m),
            np.kron(ns, eye_m)
            - 2.0 * f * np.kron(ys, ym)
            + f ** 2 * np.kron(eye_s, ym @ ym),
        ),
    }
    signal = np.arange(signal_block or coupling.dim_s // 4)
    meter = np.arange(meter_block or coupling.dim_m // 4)
    keep = (signal[:, None] * coupling.dim_m + meter[None, :]).ravel()
    columns = coupling.matrix[:, keep]
    residuals = {}
    for name, (operator, target) in expected.items():
        transformed = columns.conj().T @ operator @ columns
        residuals[name] = float(np.max(np.abs(
            transformed - target[np.ix_(keep, keep)]
        )))
    return residuals
