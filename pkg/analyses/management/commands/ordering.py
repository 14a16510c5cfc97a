"""Operator-ordering table on photon-number states."""

from analyses.runner import AnalysisCommand


class Command(AnalysisCommand):
    help = 'Tabulate <x n x>, the symmetric product and their difference'
    analysis = 'ordering'
