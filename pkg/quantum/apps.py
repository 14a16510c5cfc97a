"""App configuration for the quantum app."""

from django.apps import AppConfig


class QuantumConfig(AppConfig):
    """Configuration for the numerical core application."""
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'quantum'
    verbose_name = 'Quantum Measurement Core'
