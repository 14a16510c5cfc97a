"""
Per-trial sampling of readouts and induced photon numbers.

One trial is one measured mode: a readout x_m drawn from the outcome
density, a photon number n drawn from the conditional post state, and
a detector click thinned by the counting efficiency. Sub-streams are
counter-based Philox generators spawned from one SeedSequence, so a
run split across streams or threads replays bit for bit.
"""

import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from quantum.exceptions import (
    QNDError,
    TruncationError,
    UnnormalizableOutcomeError,
)
from quantum.fock import coherent_state, squeezed_vacuum, vacuum
from quantum.gaussian import (
    INTEGRATION_SIGMAS,
    GaussianXYState,
    outcome_pdf,
    zero_photon_density,
)
from quantum.measurement import outcome_amplitudes, outcome_density
from quantum.wigner import GaussianWigner

from .exceptions import InsufficientTrialsError, InvalidStateDescriptorError

logger = logging.getLogger(__name__)

RNG_ALGORITHM = 'numpy.random.Philox'
CHUNK_SIZE = 16384
MIN_SAMPLING_DIM = 32
MAX_SAMPLING_DIM = 1024
# Vacuum post states at finer dx need more than MAX_SAMPLING_DIM levels.
MIN_SAMPLING_RESOLUTION = 0.05
# Probability allowed in the top levels of any post state.
POST_EDGE_TOLERANCE = 1e-10
EDGE_LEVELS = 4
CDF_STEP = 0.005

_DESCRIPTOR = re.compile(
    r'^\s*(?P<kind>vacuum|coherent|squeezed)\s*(?::\s*(?P<value>[^\s]+))?\s*$',
    re.IGNORECASE,
)


# ── Domain types ────────────────────────────────

@dataclass(frozen=True)
class DetectorModel:
    """Photon-counting efficiency eta and readout efficiency xi."""

    eta: float = 1.0
    xi: float = 1.0

    def __post_init__(self):
        for name in ('eta', 'xi'):
            value = getattr(self, name)
            if not (0.0 < value <= 1.0):
                raise QNDError(
                    f'Detector {name} must lie in (0, 1], got {value}.'
                )


class TrialRecord(NamedTuple):
    x_m: float
    n: int
    detected: bool


@dataclass(frozen=True, eq=False)
class TrialBatch:
    """
    Columnar trials with the seed and generator that produced them.

    Iterating yields TrialRecord tuples.
    """

    x_m: np.ndarray
    n: np.ndarray
    detected: np.ndarray
    seed: int
    rng_algorithm: str = RNG_ALGORITHM

    def __post_init__(self):
        if not (self.x_m.shape == self.n.shape == self.detected.shape):
            raise QNDError('Trial columns differ in length.')
        if np.any(self.detected & (self.n < 1)):
            raise QNDError(
                'A detected trial must carry at least one photon.'
            )

    def __len__(self):
        return self.x_m.size

    def __iter__(self):
        for x_m, n, detected in zip(self.x_m, self.n, self.detected):
            yield TrialRecord(float(x_m), int(n), bool(detected))

    @classmethod
    def merge(cls, batches, seed):
        """Concatenate sub-stream batches in stream order."""
        batches = list(batches)
        return cls(
            x_m=np.concatenate([b.x_m for b in batches]),
            n=np.concatenate([b.n for b in batches]),
            detected=np.concatenate([b.detected for b in batches]),
            seed=seed,
        )


@dataclass(frozen=True, eq=False)
class JumpBatch:
    """Readouts with jump flags only; photon numbers are not resolved."""

    x_m: np.ndarray
    jumped: np.ndarray
    detected: np.ndarray
    seed: int
    rng_algorithm: str = RNG_ALGORITHM

    def __len__(self):
        return self.x_m.size


@dataclass(frozen=True)
class StateDescriptor:
    """
    Signal input named on the command line.

    ``vacuum``, ``coherent:<alpha>`` (real or complex, e.g. ``1+0.5j``)
    or ``squeezed:<r>``.
    """

    kind: str
    value: complex = 0.0

    @classmethod
    def parse(cls, text):
        match = _DESCRIPTOR.match(str(text))
        if not match:
            raise InvalidStateDescriptorError(
                f'Unknown state descriptor {text!r}; expected vacuum, '
                f'coherent:<alpha> or squeezed:<r>.'
            )
        kind = match['kind'].lower()
        raw = match['value']
        if kind == 'vacuum':
            if raw is not None:
                raise InvalidStateDescriptorError(
                    'The vacuum descriptor takes no parameter.'
                )
            return cls('vacuum')
        if raw is None:
            raise InvalidStateDescriptorError(
                f'State {kind!r} needs a parameter, e.g. {kind}:0.5.'
            )
        try:
            value = complex(raw)
        except ValueError as exc:
            raise InvalidStateDescriptorError(
                f'Cannot read {raw!r} as a {kind} parameter.'
            ) from exc
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise InvalidStateDescriptorError(f'Parameter {raw!r} is not finite.')
        if kind == 'squeezed':
            if value.imag:
                raise InvalidStateDescriptorError(
                    'Squeezing parameters must be real.'
                )
            value = complex(value.real)
        return cls(kind, value)

    @property
    def is_vacuum(self):
        return self.kind == 'vacuum'

    @property
    def label(self):
        if self.is_vacuum:
            return 'vacuum'
        value = self.value.real if not self.value.imag else self.value
        return f'{self.kind}:{value:g}'

    def to_fock(self, dim):
        if self.kind == 'coherent':
            return coherent_state(self.value, dim)
        if self.kind == 'squeezed':
            return squeezed_vacuum(self.value.real, dim)
        return vacuum(dim)

    def to_wigner(self):
        if self.kind == 'coherent':
            return GaussianWigner.coherent(self.value)
        if self.kind == 'squeezed':
            return GaussianWigner.squeezed(self.value.real)
        return GaussianWigner.vacuum()

    def to_gaussian(self):
        w = self.to_wigner()
        return GaussianXYState(w.mean_x, w.mean_y, w.var_x, w.var_y)


# ── Seeds and streams ───────────────────────────

def _generators(seed, n_streams):
    children = np.random.SeedSequence(seed).spawn(n_streams)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def derive_seed(seed, index):
    """Independent 63-bit seed for row ``index`` of a sweep."""
    child = np.random.SeedSequence(seed, spawn_key=(int(index),))
    return int(child.generate_state(1, np.uint64)[0] >> np.uint64(1))


def _split(n_trials, n_streams):
    base, extra = divmod(n_trials, n_streams)
    return [base + (1 if k < extra else 0) for k in range(n_streams)]


def _post_edge_weight(state, res, x_values):
    amplitudes = outcome_amplitudes(state, res, x_values)
    probabilities = np.abs(amplitudes) ** 2
    totals = probabilities.sum(axis=1)
    return float(np.max(probabilities[:, -EDGE_LEVELS:].sum(axis=1) / totals))


def sampling_dim(source, res, minimum=MIN_SAMPLING_DIM):
    """
    Smallest doubling of ``minimum`` that holds the input state and
    every post state within the edge tolerance.
    """
    dim = minimum
    while dim <= MAX_SAMPLING_DIM:
        try:
            state = source.to_fock(dim)
        except TruncationError:
            dim *= 2
            continue
        _, spread = _outcome_window(source, res)
        center = source.to_gaussian().mean_x
        readouts = center + spread * np.array([-6.0, -3.0, 0.0, 3.0, 6.0])
        if _post_edge_weight(state, res, readouts) < POST_EDGE_TOLERANCE:
            logger.debug('Sampling %s at dx=%g with dim=%d',
                         source.label, res.dx, dim)
            return dim
        dim *= 2
    raise TruncationError(
        f'No Fock dimension up to {MAX_SAMPLING_DIM} holds the post states '
        f'of {source.label} at dx={res.dx}.',
        required_dim=MAX_SAMPLING_DIM * 2,
    )


def _outcome_window(source, res):
    gaussian = source.to_gaussian()
    spread = math.sqrt(gaussian.var_x + res.dx ** 2)
    return gaussian.mean_x, spread


class _OutcomeSampler:
    """Inverse-CDF sampler of x_m from the gridded Fock-path density."""

    def __init__(self, state, source, res, step=CDF_STEP):
        center, spread = _outcome_window(source, res)
        reach = INTEGRATION_SIGMAS * spread
        count = int(math.ceil(2.0 * reach / min(step, spread / 50.0))) + 1
        self.grid = np.linspace(center - reach, center + reach, count)
        density = outcome_density(state, res, self.grid)
        cdf = integrate.cumulative_trapezoid(density, self.grid, initial=0.0)
        if cdf[-1] <= 0.0:
            raise UnnormalizableOutcomeError(
                f'Outcome density of {source.label} vanishes at dx={res.dx}.'
            )
        self.cdf = cdf / cdf[-1]

    def __call__(self, uniforms):
        return np.interp(uniforms, self.cdf, self.grid)


def _photon_numbers(state, res, x_m, uniforms):
    amplitudes = outcome_amplitudes(state, res, x_m)
    probabilities = np.abs(amplitudes) ** 2
    cumulative = np.cumsum(probabilities, axis=1)
    totals = cumulative[:, -1]
    if np.any(totals <= 0.0):
        raise UnnormalizableOutcomeError(
            'A sampled readout has vanishing outcome density.'
        )
    targets = uniforms * totals
    n = np.sum(cumulative < targets[:, None], axis=1)
    return np.minimum(n, state.dim - 1)


def _generate_stream(rng, count, state, source, res, detector, sampler):
    x_parts, n_parts, det_parts = [], [], []
    sigma = math.sqrt(res.outcome_variance)
    for start in range(0, count, CHUNK_SIZE):
        size = min(CHUNK_SIZE, count - start)
        if source.is_vacuum:
            x_m = sigma * rng.standard_normal(size)
        else:
            x_m = sampler(rng.random(size))
        n = _photon_numbers(state, res, x_m, rng.random(size))
        detected = (n >= 1) & (rng.random(size) < detector.eta)
        x_parts.append(x_m)
        n_parts.append(n)
        det_parts.append(detected)
    return (
        np.concatenate(x_parts) if x_parts else np.empty(0),
        np.concatenate(n_parts) if n_parts else np.empty(0, dtype=int),
        np.concatenate(det_parts) if det_parts else np.empty(0, dtype=bool),
    )


def stream_trials(source, res, n_trials, seed, detector,
                  dim=None, n_streams=1):
    """
    Yield one TrialBatch per sub-stream, in stream order.

    Sub-stream k draws its share of ``n_trials`` from the k-th Philox
    generator spawned from ``seed``.
    """
    state, sampler = _prepare(source, res, dim)
    for rng, count in zip(_generators(seed, n_streams),
                          _split(n_trials, n_streams)):
        x_m, n, detected = _generate_stream(
            rng, count, state, source, res, detector, sampler
        )
        yield TrialBatch(x_m, n, detected, seed)


def _prepare(source, res, dim):
    dim = dim or sampling_dim(source, res)
    state = source.to_fock(dim)
    sampler = None if source.is_vacuum else _OutcomeSampler(state, source, res)
    return state, sampler


def sample_trials(source, res, n_trials, seed, detector,
                  dim=None, n_streams=1, workers=None):
    """
    Draw ``n_trials`` trials for the input ``source`` at resolution ``res``.

    Vacuum readouts are Gaussian draws of variance dx² + 1/4; other
    inputs use the inverse CDF of the Fock-path outcome density. The
    photon number comes from the conditional post state and a click
    needs n >= 1 and a Bernoulli(eta) success. ``workers`` runs the
    sub-streams on a thread pool; the result does not depend on it.
    """
    if n_trials < 1:
        raise InsufficientTrialsError(f'n_trials must be >= 1, got {n_trials}.')
    if n_streams < 1:
        raise InsufficientTrialsError(f'n_streams must be >= 1, got {n_streams}.')
    state, sampler = _prepare(source, res, dim)
    jobs = list(zip(_generators(seed, n_streams), _split(n_trials, n_streams)))

    def run(job):
        rng, count = job
        return _generate_stream(rng, count, state, source, res, detector, sampler)

    if workers and workers > 1 and n_streams > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]
    logger.debug('Sampled %d trials of %s at dx=%g over %d stream(s)',
                  n_trials, source.label, res.dx, n_streams)
    return TrialBatch.merge(
        (TrialBatch(x_m, n, detected, seed) for x_m, n, detected in parts),
        seed,
    )


def sample_jump_flags(res, n_trials, seed, detector):
    """
    Vacuum-only fast path: readouts and jump flags without photon numbers.

    A trial jumps with probability 1 - P_0(x_m)/P(x_m), the weight of
    the non-vacuum part of its post state.
    """
    if n_trials < 1:
        raise InsufficientTrialsError(f'n_trials must be >= 1, got {n_trials}.')
    rng = _generators(seed, 1)[0]
    sigma = math.sqrt(res.outcome_variance)
    x_parts, jump_parts, det_parts = [], [], []
    for start in range(0, n_trials, CHUNK_SIZE):
        size = min(CHUNK_SIZE, n_trials - start)
        x_m = sigma * rng.standard_normal(size)
        stay = zero_photon_density(res, x_m) / outcome_pdf(res, x_m)
        jumped = rng.random(size) >= stay
        detected = jumped & (rng.random(size) < detector.eta)
        x_parts.append(x_m)
        jump_parts.append(jumped)
        det_parts.append(detected)
    return JumpBatch(
        x_m=np.concatenate(x_parts),
        jumped=np.concatenate(jump_parts),
        detected=np.concatenate(det_parts),
        seed=seed,
    )
