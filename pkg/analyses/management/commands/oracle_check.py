"""Cross-path verification suite; exits 2 on any failed check."""

from analyses.runner import AnalysisCommand


class Command(AnalysisCommand):
    help = 'Check analytic, Fock and two-mode paths against each other'
    analysis = 'oracle-check'
