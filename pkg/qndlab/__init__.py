"""qndlab: finite-resolution QND measurement laboratory."""

__version__ = '1.0.0'
