"""
Forms for the analyses app.

RunConfigForm validates a merged command configuration field by
field, so every error names the offending parameter before any
numerical work starts.
"""

from django import forms
from django.core.exceptions import ValidationError

from montecarlo.exceptions import InvalidStateDescriptorError
from montecarlo.sampling import MIN_SAMPLING_RESOLUTION, StateDescriptor
from quantum.gaussian import MIN_RESOLUTION
from quantum.measurement import MIN_MEASUREMENT_DIM
from quantum.twomode import MIN_MODE_DIM

COMMAND_CHOICES = [
    ('distributions', 'Outcome distributions and jump split'),
    ('poststate', 'Pre/post measurement ellipses'),
    ('correlation', 'Correlation sweep over resolutions'),
    ('jump-stats', 'Monte Carlo jump statistics'),
    ('oracle-check', 'Cross-path verification'),
    ('ordering', 'Operator ordering table'),
    ('mc', 'Monte Carlo summary for an input state'),
]

MONTE_CARLO_COMMANDS = ('mc', 'jump-stats')

FORMAT_CHOICES = [
    ('csv', 'CSV with JSON metadata line'),
    ('json', 'JSON document'),
]

MAX_DIM = 1024
MAX_TRIALS = 10 ** 8
MAX_STREAMS = 256


def _efficiency(value, name):
    if not (0.0 < value <= 1.0):
        raise ValidationError(f'{name} must lie in (0, 1], got {value}.')
    return value


class RunConfigForm(forms.Form):
    """
    Validation of a command's effective configuration.

    Fields mirror RunConfig; values arrive as strings from the
    command line or as JSON values from a config file.
    """

    command = forms.ChoiceField(choices=COMMAND_CHOICES)
    dx = forms.FloatField(min_value=MIN_RESOLUTION)
    x_m = forms.FloatField()
    dim = forms.IntegerField(min_value=MIN_MEASUREMENT_DIM, max_value=MAX_DIM)
    signal_dim = forms.IntegerField(min_value=MIN_MODE_DIM, max_value=MAX_DIM)
    meter_dim = forms.IntegerField(min_value=MIN_MODE_DIM, max_value=MAX_DIM)
    trials = forms.IntegerField(min_value=1, max_value=MAX_TRIALS)
    seed = forms.IntegerField(min_value=0)
    eta = forms.FloatField()
    xi = forms.FloatField()
    grid_span = forms.FloatField(required=False)
    grid_step = forms.FloatField(min_value=1e-6)
    format = forms.ChoiceField(choices=FORMAT_CHOICES)
    state = forms.CharField(max_length=100)
    sweep = forms.CharField(max_length=500)
    streams = forms.IntegerField(min_value=1, max_value=MAX_STREAMS)
    workers = forms.IntegerField(required=False, min_value=1, max_value=64)
    out = forms.CharField(required=False, max_length=500)

    def clean_eta(self):
        return _efficiency(self.cleaned_data['eta'], 'eta')

    def clean_xi(self):
        return _efficiency(self.cleaned_data['xi'], 'xi')

    def clean_grid_span(self):
        span = self.cleaned_data.get('grid_span')
        if span is not None and span <= 0:
            raise ValidationError('grid_span must be positive when given.')
        return span

    def clean_state(self):
        """Parse the input state descriptor."""
        try:
            return StateDescriptor.parse(self.cleaned_data['state'])
        except InvalidStateDescriptorError as exc:
            raise ValidationError(str(exc)) from exc

    def clean_sweep(self):
        """Comma-separated list of positive resolutions."""
        raw = self.cleaned_data['sweep']
        try:
            values = [float(item) for item in raw.split(',') if item.strip()]
        except ValueError as exc:
            raise ValidationError(
                f'sweep must be comma-separated numbers, got {raw!r}.'
            ) from exc
        if not values:
            raise ValidationError('sweep needs at least one resolution.')
        for value in values:
            if not value >= MIN_RESOLUTION:
                raise ValidationError(
                    f'Every sweep resolution must be >= {MIN_RESOLUTION}, '
                    f'got {value}.'
                )
        return tuple(values)

    def clean(self):
        """Monte Carlo commands need resolutions the sampler can hold."""
        cleaned = super().clean()
        command = cleaned.get('command')
        dx = cleaned.get('dx')
        if (command in MONTE_CARLO_COMMANDS and dx is not None
                and dx < MIN_SAMPLING_RESOLUTION):
            self.add_error('dx', (
                f'Monte Carlo runs need dx >= {MIN_SAMPLING_RESOLUTION}, '
                f'got {dx}.'
            ))
        sweep = cleaned.get('sweep')
        if (command == 'correlation' and sweep
                and min(sweep) < MIN_SAMPLING_RESOLUTION):
            self.add_error('sweep', (
                f'Monte Carlo sweep resolutions must be >= '
                f'{MIN_SAMPLING_RESOLUTION}, got {min(sweep)}.'
            ))
        return cleaned
