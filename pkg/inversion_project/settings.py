"""
Django settings for inversion_project project.

The project has no database and no templates: it hosts the hyperpower
library, its management commands (gen, run, compare) and a small JSON API.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Solver defaults; CLI flags and API fields override them per run
HYPERPOWER_EPSILON = 1e-10
HYPERPOWER_MAX_ITER = 1000
HYPERPOWER_DENOM_TOL_REAL = 1e-12
HYPERPOWER_DENOM_TOL_COMPLEX = 1e-5
HYPERPOWER_STAGNATION_WINDOW = 25
HYPERPOWER_STAGNATION_FACTOR = 0.999
HYPERPOWER_JACOBI_MAX_SWEEPS = 100
HYPERPOWER_HILBERT_WARN_N = 12
HYPERPOWER_FALLBACK_WARN_RATIO = 0.5
HYPERPOWER_FALLBACK_WARN_MIN_ITER = 4
HYPERPOWER_API_MAX_N = 500
HYPERPOWER_LOG_LEVEL = 'WARNING'

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = 'django-insecure-5v!h0q2r8m#k3t_w7x@z1p(c9n$e4b&y6u^a*d-j+l=f%g)s'

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = True

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'hyperpower',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
]

ROOT_URLCONF = 'inversion_project.urls'

WSGI_APPLICATION = 'inversion_project.wsgi.application'


# Database
# Nothing is persisted; every request and command works in memory.

DATABASES = {}


REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': ['rest_framework.renderers.JSONRenderer'],
    'DEFAULT_PARSER_CLASSES': ['rest_framework.parsers.JSONParser'],
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': ['rest_framework.permissions.AllowAny'],
    'UNAUTHENTICATED_USER': None,
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
        'hyperpower': {
            'handlers': ['console'],
            'level': HYPERPOWER_LOG_LEVEL,
            'propagate': False,
        },
    },
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
