"""
Shared base for the analysis management commands.

Parses the common flags, merges the configuration, runs the
builder, writes the dataset and records the run. Failures map to
the exit codes 1 (validation), 2 (verification) and 3 (I/O).
"""

import logging
import sys
from functools import partial

from django.core.management.base import BaseCommand, CommandError
from django.db import DatabaseError

from quantum.exceptions import QNDError

from .config import ConfigFileError, load_config
from .datasets import DatasetWriteError, write_dataset
from .models import RunRecord
from .reports import BUILDERS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_VERIFICATION = 2
EXIT_IO = 3

STATUS_BY_EXIT = {
    EXIT_OK: 'success',
    EXIT_VALIDATION: 'invalid',
    EXIT_VERIFICATION: 'failed',
    EXIT_IO: 'io_error',
}

# (flag, dest, help); values stay strings until the form validates them.
COMMON_FLAGS = [
    ('--dx', 'dx', 'Measurement resolution dx (> 0).'),
    ('--x-m', 'x_m', 'Scaled readout x_m.'),
    ('--dim', 'dim', 'Fock truncation dimension.'),
    ('--signal-dim', 'signal_dim', 'Signal dimension for the two-mode path.'),
    ('--meter-dim', 'meter_dim', 'Meter dimension for the two-mode path.'),
    ('--trials', 'trials', 'Monte Carlo trial count.'),
    ('--seed', 'seed', 'Root seed of the trial streams.'),
    ('--eta', 'eta', 'Photon-counting efficiency in (0, 1].'),
    ('--xi', 'xi', 'Readout efficiency in (0, 1].'),
    ('--grid-span', 'grid_span', 'Half-width of the x_m grid.'),
    ('--grid-step', 'grid_step', 'Spacing of the x_m grid.'),
    ('--format', 'format', 'Output format: csv or json.'),
    ('--state', 'state', 'Input state: vacuum, coherent:<a>, squeezed:<r>.'),
    ('--sweep', 'sweep', 'Comma-separated dx values for the sweep.'),
    ('--streams', 'streams', 'Number of independent sub-streams.'),
    ('--workers', 'workers', 'Threads used to generate sub-streams.'),
    ('--out', 'out', 'Output file (default: QNDLAB_OUTPUT_DIR/<command>.<format>).'),
    ('--config', 'config', 'Flat JSON file of configuration values.'),
]


def record_run(command, parameters, exit_code, output_path='',
               checksum='', message=''):
    """Create a ledger entry; an unavailable database only logs."""
    try:
        RunRecord.objects.create(
            command=command,
            parameters=parameters,
            output_path=str(output_path),
            checksum=checksum,
            status=STATUS_BY_EXIT[exit_code],
            exit_code=exit_code,
            message=message,
        )
    except DatabaseError as exc:
        logger.warning('Run ledger unavailable, %s not recorded: %s',
                       command, exc)


def usage_error(parser, message):
    """Report a malformed command line as a validation failure."""
    if parser.called_from_command_line:
        parser.print_usage(sys.stderr)
        parser.exit(EXIT_VALIDATION, f'{parser.prog}: error: {message}\n')
    raise CommandError(f'Error: {message}', returncode=EXIT_VALIDATION)


class AnalysisCommand(BaseCommand):
    """
    Base for commands that emit one dataset.

    Subclasses set ``analysis`` to a key of reports.BUILDERS.
    """

    analysis = None

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = partial(usage_error, parser)
        return parser

    def add_arguments(self, parser):
        for flag, dest, text in COMMON_FLAGS:
            parser.add_argument(flag, dest=dest, default=None, help=text)

    def fail(self, exit_code, message, parameters=None, path=''):
        record_run(self.analysis, parameters or {}, exit_code,
                   output_path=path, message=message)
        raise CommandError(message, returncode=exit_code)

    def handle(self, *args, **options):
        flags = {dest: options.get(dest) for _, dest, _ in COMMON_FLAGS}
        try:
            cfg = load_config(self.analysis, flags)
        except ConfigFileError as exc:
            self.fail(EXIT_IO, str(exc))
        except QNDError as exc:
            self.fail(EXIT_VALIDATION, str(exc))

        parameters = cfg.parameters()
        logger.info('Running %s', self.analysis)
        try:
            dataset = BUILDERS[self.analysis](cfg)
        except QNDError as exc:
            self.fail(EXIT_VALIDATION, f'{type(exc).__name__}: {exc}',
                      parameters)

        path = cfg.output_path()
        try:
            checksum = write_dataset(dataset, path, cfg.format)
        except DatasetWriteError as exc:
            self.fail(EXIT_IO, str(exc), parameters, path)
        logger.info('Wrote %s (%s)', path, checksum[:12])

        if not dataset.results.get('passed', True):
            failed = dataset.results.get('failed_checks') or [self.analysis]
            message = f'Verification failed: {", ".join(failed)}.'
            record_run(self.analysis, parameters, EXIT_VERIFICATION,
                       path, checksum, message)
            self.stderr.write(self.style.ERROR(message))
            raise CommandError(message, returncode=EXIT_VERIFICATION)

        record_run(self.analysis, parameters, EXIT_OK, path, checksum)
        self.stdout.write(self.style.SUCCESS(f'Wrote {path}'))
