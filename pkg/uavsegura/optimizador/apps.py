from django.apps import AppConfig


class OptimizadorConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'optimizador'
    verbose_name = "Optimizador BCD/SPCA"
