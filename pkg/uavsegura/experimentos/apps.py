from django.apps import AppConfig


class ExperimentosConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'experimentos'
    verbose_name = "Experimentos y CLI"
