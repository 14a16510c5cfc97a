"""
Django settings for the qndlab project.

qndlab: finite-resolution QND measurement laboratory.
Numerical engine and command-line front end for quadrature
QND measurements of a single light-field mode.
"""

import os
from pathlib import Path
import dj_database_url

if os.path.isfile('env.py'):
    import env  # noqa: F401

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('SECRET_KEY', 'qndlab-local-only')

DEBUG = os.environ.get('DEBUG', 'False').lower() == 'true'

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'quantum',
    'montecarlo',
    'analyses',
]

# Database: holds the run ledger only
# Uses DATABASE_URL environment variable for all environments
DATABASES = {
    'default': dj_database_url.parse(
        os.environ.get(
            'DATABASE_URL',
            f'sqlite:///{BASE_DIR / "db.sqlite3"}'
        )
    )
}

# Internationalization
LANGUAGE_CODE = 'en-gb'
TIME_ZONE = 'Europe/London'
USE_I18N = False
USE_TZ = True

# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Output location for emitted datasets when --out is not given
QNDLAB_OUTPUT_DIR = Path(
    os.environ.get('QNDLAB_OUTPUT_DIR', BASE_DIR / 'output')
)

# Default run configuration, overridden by --config files and flags
QNDLAB_DEFAULTS = {
    'dx': 1.0,
    'x_m': -0.5,
    'dim': 64,
    'signal_dim': 32,
    'meter_dim': 48,
    'trials': 100000,
    'seed': 20240601,
    'eta': 1.0,
    'xi': 1.0,
    'grid_span': None,
    'grid_step': 0.01,
    'format': 'csv',
    'state': 'vacuum',
    'sweep': '0.25,0.5,1,2,5',
    'streams': 1,
}

# Logging: one console handler, one logger per app
QNDLAB_LOG_LEVEL = os.environ.get('QNDLAB_LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'quantum': {
            'handlers': ['console'],
            'level': QNDLAB_LOG_LEVEL,
        },
        'montecarlo': {
            'handlers': ['console'],
            'level': QNDLAB_LOG_LEVEL,
        },
        'analyses': {
            'handlers': ['console'],
            'level': QNDLAB_LOG_LEVEL,
        },
    },
}
