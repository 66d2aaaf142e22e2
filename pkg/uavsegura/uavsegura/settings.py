"""
Django settings for uavsegura project.

El proyecto no sirve paginas ni usa base de datos: Django aporta los
comandos de gestion (run, validate, presets), la validacion de
configuraciones con formularios y el logging.
"""
import os
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent


SECRET_KEY = os.environ.get("SECRET_KEY", "uavsegura-simulacion-local")

DEBUG = os.environ.get("DEBUG", "0") == "1"

ALLOWED_HOSTS = os.environ.get("ALLOWED_HOSTS", "localhost,127.0.0.1").split(",")


INSTALLED_APPS = [
    'nucleo',
    'red',
    'analitica',
    'optimizador',
    'referencias',
    'experimentos',
]

MIDDLEWARE = []

# Sin base de datos: las pruebas usan SimpleTestCase
DATABASES = {}


LANGUAGE_CODE = 'es-ar'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Parametros del simulador (sobrescribibles por entorno)
SIMULADOR = {
    'SEMILLA': int(os.environ.get("SIMULADOR_SEMILLA", "20240501")),
    'HILOS': int(os.environ.get("SIMULADOR_HILOS", "1")),
    'SOLVER': os.environ.get("SIMULADOR_SOLVER", "CLARABEL"),
    'DIRECTORIO_PRESETS': BASE_DIR / 'experimentos' / 'presets',
    'TAMANO_BLOQUE_MC': int(os.environ.get("SIMULADOR_BLOQUE_MC", "65536")),
}


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'detallado': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'consola': {
            'class': 'logging.StreamHandler',
            'formatter': 'detallado',
        },
    },
    'root': {
        'handlers': ['consola'],
        'level': 'WARNING',
    },
    'loggers': {
        app: {
            'handlers': ['consola'],
            'level': os.environ.get("SIMULADOR_LOG_LEVEL", "INFO"),
            'propagate': False,
        }
        for app in INSTALLED_APPS
    },
}
