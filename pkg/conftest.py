import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'padic_spectral.settings')
django.setup()
