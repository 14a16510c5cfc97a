"""Monte Carlo summary for a chosen input state."""

from analyses.runner import AnalysisCommand


class Command(AnalysisCommand):
    help = 'Sampled correlation and jump statistics for --state'
    analysis = 'mc'
