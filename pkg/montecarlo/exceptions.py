"""Exceptions raised by trial sampling and the estimators."""

from quantum.exceptions import QNDError


class InvalidStateDescriptorError(QNDError):
    """Input state descriptor could not be parsed or is unsupported."""


class InsufficientTrialsError(QNDError):
    """Too few trials for the requested estimator."""


class InsufficientEventsError(QNDError):
    """Too few detected photon events for jump statistics."""
