"""Outcome distribution split into no-jump and quantum-jump parts."""

from analyses.runner import AnalysisCommand


class Command(AnalysisCommand):
    help = 'Tabulate P, P0 and PQJ over an x_m grid'
    analysis = 'distributions'
