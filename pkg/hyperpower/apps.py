from django.apps import AppConfig


class HyperpowerConfig(AppConfig):
    name = 'hyperpower'
    verbose_name = 'Hyper-power matrix inversion'
