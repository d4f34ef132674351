"""
Django settings for the padic_spectral project.

The project has no web surface and no database: Django provides the settings
layer, the management commands and the test runner, DRF the JobSpec
validation and the exception contract.
"""

from pathlib import Path
from dotenv import load_dotenv
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv()

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'padic-spectral-insecure-local-key')

DEBUG = os.getenv('DJANGO_DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Django Rest Framework
    'rest_framework',

    # My Apps
    'apps.core.apps.CoreConfig',
    'apps.scalars.apps.ScalarsConfig',
    'apps.geometry.apps.GeometryConfig',
    'apps.analytic.apps.AnalyticConfig',
    'apps.shnirelman.apps.ShnirelmanConfig',
    'apps.linalg.apps.LinalgConfig',
    'apps.calculus.apps.CalculusConfig',
    'apps.jobs.apps.JobsConfig',
]

# No models anywhere: every test case is a SimpleTestCase.
DATABASES = {}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'UNAUTHENTICATED_USER': None,
}

# p-adic library settings
PADIC = {
    'PRECISION': int(os.getenv('PADIC_PRECISION', '24')),
    'GUARD_DIGITS': int(os.getenv('PADIC_GUARD_DIGITS', '4')),
    'DEGREE_CAP': int(os.getenv('PADIC_DEGREE_CAP', '8')),
    'SCHEDULE_START': int(os.getenv('PADIC_SCHEDULE_START', '2')),
    'SCHEDULE_COUNT': int(os.getenv('PADIC_SCHEDULE_COUNT', '4')),
    'WORKERS': int(os.getenv('PADIC_WORKERS', '1')),  # > 1 evaluates Shnirelman sums on a thread pool
    'FCALC_CROSS_CHECK': os.getenv('PADIC_FCALC_CROSS_CHECK', 'True') == 'True',
    'DEFAULT_SEED': int(os.getenv('PADIC_DEFAULT_SEED', str(0x5EED5EED5EED5EED))),
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'apps': {
            'handlers': ['console'],
            'level': os.getenv('PADIC_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}
