"""
Plot-ready dataset files.

CSV: one '# '-prefixed JSON metadata line with sorted keys, then a
header row and the data rows. JSON: {"metadata": {...}, "rows":
[{column: value}, ...]}. Nothing time-dependent is written, so the
same configuration always yields the same bytes.
"""

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

import qndlab
from montecarlo.sampling import RNG_ALGORITHM

METADATA_PREFIX = '# '


class DatasetWriteError(OSError):
    """Output path could not be created or written."""


@dataclass
class Dataset:
    command: str
    parameters: dict
    columns: list
    rows: list = field(default_factory=list)
    results: dict = field(default_factory=dict)

    def metadata(self):
        """Provenance block embedded in every file."""
        return {
            'command': self.command,
            'parameters': self.parameters,
            'seed': self.parameters.get('seed'),
            'version': qndlab.__version__,
            'rng_algorithm': RNG_ALGORITHM,
            'numpy_version': np.__version__,
            'scipy_version': scipy.__version__,
            'results': self.results,
        }


def _plain(value):
    """Convert numpy scalars and non-finite floats to JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def _cell(value):
    value = _plain(value)
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return value


def render_csv(dataset):
    buffer = io.StringIO()
    buffer.write(METADATA_PREFIX)
    buffer.write(json.dumps(_plain(dataset.metadata()), sort_keys=True))
    buffer.write('\n')
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(dataset.columns)
    for row in dataset.rows:
        writer.writerow([_cell(value) for value in row])
    return buffer.getvalue()


def render_json(dataset):
    document = {
        'metadata': dataset.metadata(),
        'rows': [dict(zip(dataset.columns, row)) for row in dataset.rows],
    }
    return json.dumps(_plain(document), sort_keys=True, indent=2) + '\n'


RENDERERS = {
    'csv': render_csv,
    'json': render_json,
}


def write_dataset(dataset, path, fmt):
    """Write ``dataset`` to ``path``; returns the SHA-256 of the bytes."""
    payload = RENDERERS[fmt](dataset).encode('utf-8')
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as exc:
        raise DatasetWriteError(f'Cannot write {path}: {exc}') from exc
    return hashlib.sha256(payload).hexdigest()


def read_dataset(path):
    """
    Load a file written by write_dataset.

    Returns (metadata, columns, rows); CSV cells come back as strings.
    """
    text = Path(path).read_text(encoding='utf-8')
    if text.startswith(METADATA_PREFIX):
        first, _, body = text.partition('\n')
        metadata = json.loads(first[len(METADATA_PREFIX):])
        reader = csv.reader(io.StringIO(body))
        columns = next(reader)
        return metadata, columns, [row for row in reader]
    document = json.loads(text)
    rows = document['rows']
    columns = list(rows[0]) if rows else []
    return document['metadata'], columns, rows
