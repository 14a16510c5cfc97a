"""Field/photon-number correlation over a sweep of resolutions."""

from analyses.runner import AnalysisCommand


class Command(AnalysisCommand):
    help = 'Analytic, Fock-path and Monte Carlo correlation per dx'
    analysis = 'correlation'
