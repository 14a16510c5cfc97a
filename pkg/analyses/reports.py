"""
Dataset builders, one per command.

Each builder takes a validated RunConfig and returns a Dataset; the
command layer handles writing, the ledger and exit codes. Library
errors propagate as QNDError subclasses.
"""

import logging
import math

import numpy as np

from montecarlo.estimators import (
    estimate_correlation,
    jump_statistics,
    scaled_correlation,
)
from montecarlo.exceptions import InsufficientEventsError
from montecarlo.sampling import StateDescriptor, derive_seed, sample_trials
from quantum import gaussian, measurement, wigner
from quantum.exceptions import GridCoverageError
from quantum.fock import build_operators, expectation, fock_state, vacuum

from .datasets import Dataset
from .verification import run_checks

logger = logging.getLogger(__name__)

CONTOUR_POINTS = 181
VACUUM_STD = 0.5
ORDERING_MARGIN = 8
ORDERING_TOLERANCE = 1e-10
VACUUM_ORDERING_TOLERANCE = 1e-12


def _dataset(cfg, columns):
    return Dataset(
        command=cfg.command,
        parameters=cfg.parameters(),
        columns=columns,
    )


def _report_fields(report, prefix):
    return {
        prefix: report.estimate,
        f'{prefix}_std_error': report.std_error,
        f'{prefix}_method': report.method,
    }


# ── distributions ───────────────────────────────

def outcome_axis(cfg):
    """x_m grid from grid_span/grid_step, or +/- 8 outcome std devs."""
    res = cfg.res
    span = cfg.grid_span or gaussian.INTEGRATION_SIGMAS * math.sqrt(
        res.outcome_variance
    )
    count = int(math.ceil(2.0 * span / cfg.grid_step)) + 1
    if count > 2_000_001:
        raise GridCoverageError(
            f'grid_span {span} with grid_step {cfg.grid_step} needs '
            f'{count} points; increase grid_step.'
        )
    return np.linspace(-span, span, count)


def build_distributions(cfg):
    """P, P_0 and P_QJ over the outcome grid."""
    res = cfg.res
    split = gaussian.jump_decomposition(res, outcome_axis(cfg))
    dataset = _dataset(cfg, ['x_m', 'P', 'P0', 'PQJ'])
    dataset.rows = [
        [x, p, p0, pqj]
        for x, p, p0, pqj in zip(
            split.grid, split.p_total, split.p_zero, split.p_jump
        )
    ]
    grid_peak = float(abs(split.grid[int(np.argmax(split.p_jump))]))
    dataset.results = {
        'dx': res.dx,
        'jump_probability': split.jump_probability,
        'zero_probability': gaussian.zero_probability(res),
        'integrated_jump_probability': split.integrated_jump,
        'peak_location': gaussian.jump_peak_location(res),
        'grid_peak_location': grid_peak,
        'conditional_second_moment': split.conditional_second_moment,
        'outcome_variance': res.outcome_variance,
        'fluctuation_ratio': gaussian.fluctuation_ratio(res),
    }
    return dataset


# ── poststate ───────────────────────────────────

def _ellipse_summary(w):
    return {
        'center_x': w.mean_x,
        'center_y': w.mean_y,
        'std_x': w.std_x,
        'std_y': w.std_y,
    }


def build_poststate(cfg):
    """Standard-deviation contours before and after outcome x_m."""
    res = cfg.res
    pre = wigner.GaussianWigner.vacuum()
    post = wigner.GaussianWigner.from_state(gaussian.post_state(res, cfg.x_m))
    mop = measurement.build_measurement_operator(res, cfg.x_m, cfg.dim)
    fock_post = measurement.apply_measurement(vacuum(cfg.dim), mop).post
    ops = build_operators(cfg.dim)
    fock_mean = expectation(fock_post, ops.x).real
    fock_var = expectation(fock_post, ops.x @ ops.x).real - fock_mean ** 2
    dataset = _dataset(cfg, ['curve', 'index', 'x', 'y'])
    for name, w in (('pre', pre), ('post', post)):
        xs, ys = wigner.std_ellipse(w, CONTOUR_POINTS)
        dataset.rows.extend(
            [name, index, x, y]
            for index, (x, y) in enumerate(zip(xs, ys))
        )
    dataset.results = {
        'pre': _ellipse_summary(pre),
        'post': _ellipse_summary(post),
        'squeeze_ratio_x': post.std_x / VACUUM_STD,
        'squeeze_ratio_y': post.std_y / VACUUM_STD,
        'post_photon_expectation': float(
            gaussian.post_photon_expectation(res, cfg.x_m)
        ),
        'fock_post_mean_x': fock_mean,
        'fock_post_var_x': fock_var,
        'operator_warnings': list(mop.warnings),
    }
    return dataset


# ── correlation sweep ───────────────────────────

def build_correlation(cfg):
    """Analytic, Fock-path and Monte Carlo correlation per resolution."""
    dataset = _dataset(cfg, [
        'dx', 'analytic_C', 'fock_C', 'mc_C', 'mc_C_std_error',
        'jump_probability', 'conditional_ratio',
    ])
    source = StateDescriptor.parse('vacuum')
    state = vacuum(cfg.dim)
    for index, dx in enumerate(cfg.sweep):
        res = gaussian.Resolution(dx)
        seed = derive_seed(cfg.seed, index)
        trials = sample_trials(
            source, res, cfg.trials, seed, cfg.detector,
            n_streams=cfg.streams, workers=cfg.workers,
        )
        report = estimate_correlation(trials)
        dataset.rows.append([
            dx,
            gaussian.analytic_correlation(res),
            measurement.outcome_averaged_correlation(state, res),
            report.estimate,
            report.std_error,
            gaussian.jump_probability(res),
            gaussian.fluctuation_ratio(res),
        ])
        logger.info('Correlation row dx=%g: MC %.5f +/- %.5f',
                    dx, report.estimate, report.std_error)
    dataset.results = {
        'rows': len(dataset.rows),
        'max_analytic_deviation': max(
            abs(row[1] - 0.125) for row in dataset.rows
        ),
    }
    return dataset


# ── Monte Carlo jump statistics ─────────────────

def build_jump_stats(cfg):
    """Jump fraction and conditional ratio next to their closed forms."""
    res = cfg.res
    detector = cfg.detector
    trials = sample_trials(
        StateDescriptor.parse('vacuum'), res, cfg.trials, cfg.seed, detector,
        n_streams=cfg.streams, workers=cfg.workers,
    )
    stats = jump_statistics(trials, detector)
    correlation = estimate_correlation(trials)
    scaled = scaled_correlation(correlation, detector)
    dataset = _dataset(cfg, [
        'quantity', 'estimate', 'std_error', 'closed_form', 'within_3se',
    ])
    for name, report, expected in (
        ('jump_fraction', stats.jump_fraction, gaussian.jump_probability(res)),
        ('conditional_ratio', stats.conditional_ratio,
         gaussian.fluctuation_ratio(res)),
        ('correlation', correlation, 0.125),
        ('scaled_correlation', scaled, detector.xi * 0.125),
    ):
        dataset.rows.append([
            name, report.estimate, report.std_error, expected,
            report.within(expected),
        ])
    dataset.results = {
        'detected_events': int(np.sum(trials.detected)),
        **_report_fields(stats.jump_fraction, 'jump_fraction'),
        **_report_fields(stats.conditional_ratio, 'conditional_ratio'),
    }
    return dataset


# ── operator ordering ───────────────────────────

def build_ordering(cfg):
    """<x n x>, its symmetric counterpart and the difference on |n>."""
    dataset = _dataset(cfg, ['n', 'xnx', 'sym', 'difference'])
    for level in range(cfg.dim - ORDERING_MARGIN + 1):
        values = measurement.ordering_expectations(fock_state(level, cfg.dim))
        dataset.rows.append(
            [level, values.xnx, values.sym, values.difference]
        )
    deviation = max(abs(row[3] - 0.25) for row in dataset.rows)
    vacuum_xnx = dataset.rows[0][1]
    dataset.results = {
        'vacuum_xnx': vacuum_xnx,
        'max_identity_deviation': deviation,
        'passed': (
            deviation <= ORDERING_TOLERANCE
            and abs(vacuum_xnx - 0.25) <= VACUUM_ORDERING_TOLERANCE
        ),
    }
    return dataset


# ── Monte Carlo summary for an input state ──────

def build_mc(cfg):
    """Sampled correlation and jump statistics for ``cfg.state``."""
    res = cfg.res
    detector = cfg.detector
    source = cfg.state
    trials = sample_trials(
        source, res, cfg.trials, cfg.seed, detector,
        n_streams=cfg.streams, workers=cfg.workers,
    )
    correlation = estimate_correlation(trials)
    scaled = scaled_correlation(correlation, detector)
    phase_space = wigner.intensity_correlation(
        wigner.post_interaction_wigner(source.to_wigner(), res)
    )
    dataset = _dataset(cfg, ['quantity', 'estimate', 'std_error', 'reference'])
    dataset.rows = [
        ['correlation', correlation.estimate, correlation.std_error,
         phase_space],
        ['scaled_correlation', scaled.estimate, scaled.std_error,
         detector.xi * phase_space],
    ]
    results = {
        'state': source.label,
        'phase_space_correlation': phase_space,
        'mean_x_m': float(np.mean(trials.x_m)),
        'mean_x_m_squared': float(np.mean(trials.x_m ** 2)),
        'mean_photons': float(np.mean(trials.n)),
    }
    try:
        stats = jump_statistics(trials, detector)
    except InsufficientEventsError as exc:
        results['jump_statistics'] = str(exc)
    else:
        dataset.rows.append([
            'jump_fraction', stats.jump_fraction.estimate,
            stats.jump_fraction.std_error,
            gaussian.jump_probability(res) if source.is_vacuum else None,
        ])
        dataset.rows.append([
            'conditional_ratio', stats.conditional_ratio.estimate,
            stats.conditional_ratio.std_error,
            gaussian.fluctuation_ratio(res) if source.is_vacuum else None,
        ])
    dataset.results = results
    return dataset


# ── cross-path verification ─────────────────────

def build_oracle_check(cfg):
    """Run the verification suite; ``results['passed']`` gates the exit code."""
    checks = run_checks(cfg)
    dataset = _dataset(cfg, ['check', 'value', 'threshold', 'passed', 'detail'])
    dataset.rows = [list(check) for check in checks]
    failed = [check.name for check in checks if not check.passed]
    dataset.results = {
        'passed': not failed,
        'failed_checks': failed,
        'checks': len(checks),
    }
    return dataset


BUILDERS = {
    'distributions': build_distributions,
    'poststate': build_poststate,
    'correlation': build_correlation,
    'jump-stats': build_jump_stats,
    'ordering': build_ordering,
    'mc': build_mc,
    'oracle-check': build_oracle_check,
}
