"""
Effective run configuration.

Precedence: command-line flags > flat JSON config file > the
QNDLAB_DEFAULTS setting. The merged values go through RunConfigForm
and come out as a frozen RunConfig.
"""

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

from django.conf import settings

from montecarlo.sampling import DetectorModel, StateDescriptor
from quantum.exceptions import QNDError
from quantum.gaussian import Resolution

from .forms import RunConfigForm

logger = logging.getLogger(__name__)


class ConfigValidationError(QNDError):
    """Merged configuration failed validation; the message names fields."""


class ConfigFileError(OSError):
    """Config file missing or unreadable."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    dx: float
    x_m: float
    dim: int
    signal_dim: int
    meter_dim: int
    trials: int
    seed: int
    eta: float
    xi: float
    grid_span: float | None
    grid_step: float
    format: str
    state: StateDescriptor
    sweep: tuple
    streams: int
    workers: int | None = None
    out: str = ''

    @property
    def res(self):
        return Resolution(self.dx)

    @property
    def detector(self):
        return DetectorModel(self.eta, self.xi)

    def parameters(self):
        """Plain, JSON-ready parameters echoed into every emitted file."""
        values = asdict(self)
        values['state'] = self.state.label
        values['sweep'] = list(self.sweep)
        # Output location and thread count do not change the content.
        values.pop('out')
        values.pop('workers')
        return values

    def output_path(self):
        if self.out:
            return Path(self.out)
        name = self.command.replace('-', '_')
        return Path(settings.QNDLAB_OUTPUT_DIR) / f'{name}.{self.format}'


def read_config_file(path):
    """Flat key/value JSON; kebab-case keys are accepted."""
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigFileError(f'Cannot read config file {path}: {exc}') from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigValidationError(
            f'Config file {path} is not valid JSON: {exc}'
        ) from exc
    if not isinstance(data, dict):
        raise ConfigValidationError(
            f'Config file {path} must hold a flat JSON object.'
        )
    values = {}
    for key, value in data.items():
        if isinstance(value, (dict, list)):
            raise ConfigValidationError(
                f'Config key {key!r} must be a scalar value.'
            )
        values[key.replace('-', '_')] = value
    return values


def load_config(command, flags):
    """
    Merge defaults, the optional ``config`` file and flags, then validate.

    ``flags`` maps field names to values; None means not given.
    """
    merged = dict(settings.QNDLAB_DEFAULTS)
    merged.update({'workers': None, 'out': ''})
    config_path = flags.get('config')
    if config_path:
        from_file = read_config_file(config_path)
        unknown = sorted(set(from_file) - set(RunConfigForm.base_fields))
        if unknown:
            raise ConfigValidationError(
                f'Unknown config key(s): {", ".join(unknown)}.'
            )
        merged.update(from_file)
    merged.update({
        key: value for key, value in flags.items()
        if key in RunConfigForm.base_fields and value is not None
    })
    merged['command'] = command
    form = RunConfigForm(data={
        key: '' if value is None else value for key, value in merged.items()
    })
    if not form.is_valid():
        problems = '; '.join(
            f'{field}: {" ".join(messages)}'
            for field, messages in form.errors.items()
        )
        raise ConfigValidationError(f'Invalid configuration. {problems}')
    cleaned = form.cleaned_data
    logger.debug('Effective configuration for %s: %s', command, cleaned)
    return RunConfig(
        command=cleaned['command'],
        dx=cleaned['dx'],
        x_m=cleaned['x_m'],
        dim=cleaned['dim'],
        signal_dim=cleaned['signal_dim'],
        meter_dim=cleaned['meter_dim'],
        trials=cleaned['trials'],
        seed=cleaned['seed'],
        eta=cleaned['eta'],
        xi=cleaned['xi'],
        grid_span=cleaned['grid_span'],
        grid_step=cleaned['grid_step'],
        format=cleaned['format'],
        state=cleaned['state'],
        sweep=cleaned['sweep'],
        streams=cleaned['streams'],
        workers=cleaned['workers'],
        out=cleaned['out'] or '',
    )
