import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "inversion_project.settings")
django.setup()

# Mirror what Django's test runner does before running tests
# (e.g. permits the 'testserver' host used by the test client).
from django.test.utils import setup_test_environment  # noqa: E402

setup_test_environment()
