from django.apps import AppConfig


class AnalyticConfig(AppConfig):
    name = 'apps.analytic'
    verbose_name = 'Analytic functions'
