"""App configuration for the analyses app."""

from django.apps import AppConfig


class AnalysesConfig(AppConfig):
    """Configuration for the command-line analyses and run ledger."""
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'analyses'
    verbose_name = 'Analyses and Run Ledger'
