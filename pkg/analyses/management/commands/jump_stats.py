"""Monte Carlo quantum-jump statistics."""

from analyses.runner import AnalysisCommand


class Command(AnalysisCommand):
    help = 'Jump fraction and conditional fluctuation ratio with standard errors'
    analysis = 'jump-stats'
