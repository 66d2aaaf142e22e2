from django.apps import AppConfig


class AnaliticaConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'analitica'
    verbose_name = "Analitica de outage"
