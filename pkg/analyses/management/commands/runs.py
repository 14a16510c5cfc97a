"""
Management command listing recent entries of the run ledger.
"""

from functools import partial

from django.core.management.base import BaseCommand

from analyses.models import RunRecord
from analyses.runner import usage_error


class Command(BaseCommand):
    help = 'List recent analysis runs, newest first'

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = partial(usage_error, parser)
        return parser

    def add_arguments(self, parser):
        parser.add_argument('--limit', type=int, default=20)
        parser.add_argument('--command', dest='run_command', default=None,
                            help='Only show runs of this command.')

    def handle(self, *args, **options):
        records = RunRecord.objects.all()
        if options['run_command']:
            records = records.filter(command=options['run_command'])
        records = records[:max(options['limit'], 0)]
        if not records:
            self.stdout.write(self.style.WARNING('No runs recorded.'))
            return
        for record in records:
            line = (
                f'{record.created_at:%Y-%m-%d %H:%M:%S}  {record.command:<14}'
                f'{record.exit_code}  {record.output_path or record.message}'
            )
            style = self.style.SUCCESS if record.exit_code == 0 else self.style.ERROR
            self.stdout.write(style(line))
