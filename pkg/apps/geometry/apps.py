from django.apps import AppConfig


class GeometryConfig(AppConfig):
    name = 'apps.geometry'
    verbose_name = 'Ultrametric geometry'
