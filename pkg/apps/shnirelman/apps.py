from django.apps import AppConfig


class ShnirelmanConfig(AppConfig):
    name = 'apps.shnirelman'
    verbose_name = 'Shnirelman integral'
