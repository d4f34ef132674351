from django.apps import AppConfig


class ScalarsConfig(AppConfig):
    name = 'apps.scalars'
    verbose_name = 'Scalar tower'
