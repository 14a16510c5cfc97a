"""
Models for the analyses app.

The run ledger records every command invocation the way an audit
log records administrative actions. Emitted files never depend on it.
"""

from django.db import models


class RunRecord(models.Model):
    """
    One command invocation: what ran, with which parameters,
    where the output went and how it ended.
    """

    STATUS_CHOICES = [
        ('success', 'Succeeded'),
        ('invalid', 'Validation Error'),
        ('failed', 'Verification Failed'),
        ('io_error', 'I/O Error'),
    ]

    command = models.CharField(max_length=30)
    parameters = models.JSONField(default=dict)
    output_path = models.CharField(max_length=500, blank=True)
    checksum = models.CharField(
        max_length=64,
        blank=True,
        help_text='SHA-256 of the emitted file'
    )
    status = models.CharField(max_length=10, choices=STATUS_CHOICES)
    exit_code = models.PositiveSmallIntegerField(default=0)
    message = models.TextField(blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at', '-id']
        verbose_name = 'Run Record'
        verbose_name_plural = 'Run Records'

    def __str__(self):
        return (
            f"{self.command} | {self.get_status_display()} | "
            f"{self.output_path or self.message[:50]}"
        )
