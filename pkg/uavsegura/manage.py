#!/usr/bin/env python
"""Comandos del simulador: run, validate, presets y test."""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'uavsegura.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "No se pudo importar Django. Instalar requirements.txt en el entorno activo."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
