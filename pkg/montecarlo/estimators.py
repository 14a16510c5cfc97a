"""
Estimators over sampled trials.

All estimators reduce trials to TrialSums, an associative sum/count
record, so sub-streams can be reduced in any order. Standard errors
come from BATCH_COUNT contiguous batches: batch means for plain
fractions, delete-one-batch jackknife for ratios and covariances.
"""

import logging
import math
from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np

from .exceptions import InsufficientEventsError, InsufficientTrialsError

logger = logging.getLogger(__name__)

BATCH_COUNT = 32
MIN_CORRELATION_TRIALS = 1000
MIN_DETECTED_EVENTS = 30


class EstimatorReport(NamedTuple):
    estimate: float
    std_error: float
    n_trials: int
    seed: int
    method: str

    def within(self, expected, n_se=3.0):
        """True when ``expected`` lies within n_se standard errors."""
        return abs(self.estimate - expected) <= n_se * self.std_error

    def as_dict(self):
        return self._asdict()


class JumpStatistics(NamedTuple):
    jump_fraction: EstimatorReport
    conditional_ratio: EstimatorReport


@dataclass(frozen=True)
class TrialSums:
    """Sums over a set of trials; ``+`` merges two disjoint sets."""

    count: int = 0
    sum_x2: float = 0.0
    sum_n: float = 0.0
    sum_x2n: float = 0.0
    detected: int = 0
    sum_x2_detected: float = 0.0

    @classmethod
    def from_arrays(cls, x_m, detected, n=None):
        x2 = np.asarray(x_m, dtype=float) ** 2
        detected = np.asarray(detected, dtype=bool)
        photons = np.zeros_like(x2) if n is None else np.asarray(n, dtype=float)
        return cls(
            count=int(x2.size),
            sum_x2=float(x2.sum()),
            sum_n=float(photons.sum()),
            sum_x2n=float((x2 * photons).sum()),
            detected=int(detected.sum()),
            sum_x2_detected=float(x2[detected].sum()),
        )

    def __add__(self, other):
        if not isinstance(other, TrialSums):
            return NotImplemented
        return TrialSums(*(
            getattr(self, f.name) + getattr(other, f.name)
            for f in fields(self)
        ))

    def __sub__(self, other):
        if not isinstance(other, TrialSums):
            return NotImplemented
        return TrialSums(*(
            getattr(self, f.name) - getattr(other, f.name)
            for f in fields(self)
        ))

    @property
    def correlation(self):
        """mean(x_m² n) - mean(x_m²) mean(n)."""
        if self.sum_n == 0:
            return 0.0
        mean_x2 = self.sum_x2 / self.count
        return self.sum_x2n / self.count - mean_x2 * (self.sum_n / self.count)

    @property
    def detected_fraction(self):
        return self.detected / self.count

    @property
    def conditional_ratio(self):
        """mean(x_m² | detected) / mean(x_m²)."""
        return (
            (self.sum_x2_detected / self.detected)
            / (self.sum_x2 / self.count)
        )


def batch_sums(trials, batches=BATCH_COUNT):
    """TrialSums of ``batches`` contiguous slices of a trial batch."""
    n = getattr(trials, 'n', None)
    slices = np.array_split(np.arange(len(trials)), batches)
    return [
        TrialSums.from_arrays(
            trials.x_m[index],
            trials.detected[index],
            None if n is None else n[index],
        )
        for index in slices
    ]


def _jackknife(parts, statistic):
    total = sum(parts, TrialSums())
    estimate = statistic(total)
    leave_out = np.array([statistic(total - part) for part in parts])
    count = len(parts)
    spread = leave_out - leave_out.mean()
    return estimate, math.sqrt((count - 1) / count * float(spread @ spread))


def _batch_means(parts, statistic):
    total = sum(parts, TrialSums())
    values = np.array([statistic(part) for part in parts])
    return statistic(total), float(np.std(values, ddof=1) / math.sqrt(values.size))


def estimate_correlation(trials):
    """
    Plug-in estimate of mean(x_m² n) - mean(x_m²) mean(n).

    The standard error is the delete-one-batch jackknife over
    BATCH_COUNT batches. A stream with no photons returns exactly 0.
    """
    if len(trials) < MIN_CORRELATION_TRIALS:
        raise InsufficientTrialsError(
            f'Correlation needs >= {MIN_CORRELATION_TRIALS} trials, '
            f'got {len(trials)}.'
        )
    parts = batch_sums(trials)
    estimate, error = _jackknife(parts, lambda sums: sums.correlation)
    return EstimatorReport(
        estimate=float(estimate),
        std_error=error,
        n_trials=len(trials),
        seed=trials.seed,
        method=f'jackknife-{BATCH_COUNT}',
    )


def jump_statistics(trials, detector):
    """
    Jump fraction and conditional fluctuation ratio from detected events.

    The fraction counts clicks and divides by the counting efficiency;
    the ratio is mean(x_m² | click) / mean(x_m²) and needs no
    efficiency correction.
    """
    if len(trials) < 2 * BATCH_COUNT:
        raise InsufficientTrialsError(
            f'Jump statistics need >= {2 * BATCH_COUNT} trials, '
            f'got {len(trials)}.'
        )
    parts = batch_sums(trials)
    total = sum(parts, TrialSums())
    if total.detected < MIN_DETECTED_EVENTS:
        raise InsufficientEventsError(
            f'Jump statistics need >= {MIN_DETECTED_EVENTS} detected events, '
            f'got {total.detected} in {total.count} trials.'
        )
    if any(total.detected - part.detected == 0 for part in parts):
        raise InsufficientEventsError(
            'All detected events fall in one batch; run more trials.'
        )
    fraction, fraction_error = _batch_means(
        parts, lambda sums: sums.detected_fraction
    )
    ratio, ratio_error = _jackknife(parts, lambda sums: sums.conditional_ratio)
    logger.debug(
        'Jump statistics: %d clicks in %d trials, ratio %.4f +/- %.4f',
        total.detected, total.count, ratio, ratio_error,
    )
    return JumpStatistics(
        jump_fraction=EstimatorReport(
            estimate=fraction / detector.eta,
            std_error=fraction_error / detector.eta,
            n_trials=total.count,
            seed=trials.seed,
            method=f'batch-means-{BATCH_COUNT}',
        ),
        conditional_ratio=EstimatorReport(
            estimate=float(ratio),
            std_error=ratio_error,
            n_trials=total.count,
            seed=trials.seed,
            method=f'jackknife-{BATCH_COUNT}',
        ),
    )


def scaled_correlation(report, detector):
    """Correlation as seen through the readout efficiency xi."""
    return report._replace(
        estimate=detector.xi * report.estimate,
        std_error=detector.xi * report.std_error,
        method=f'{report.method}+xi',
    )
