"""Standard-deviation ellipses before and after a readout."""

from analyses.runner import AnalysisCommand


class Command(AnalysisCommand):
    help = 'Emit pre/post measurement ellipse contours'
    analysis = 'poststate'
