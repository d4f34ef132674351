from django.apps import AppConfig


class CalculusConfig(AppConfig):
    name = 'apps.calculus'
    verbose_name = 'Spectral functional calculus'
