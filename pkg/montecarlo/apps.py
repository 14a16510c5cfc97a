"""App configuration for the montecarlo app."""

from django.apps import AppConfig


class MontecarloConfig(AppConfig):
    """Configuration for the trial sampling application."""
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'montecarlo'
    verbose_name = 'Monte Carlo Trials'
