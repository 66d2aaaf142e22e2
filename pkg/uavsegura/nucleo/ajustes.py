from pathlib import Path

from django.conf import settings

VALORES_POR_DEFECTO = {
    'SEMILLA': 20240501,
    'HILOS': 1,
    'SOLVER': 'CLARABEL',
    'TAMANO_BLOQUE_MC': 65536,
    'DIRECTORIO_PRESETS': Path(__file__).resolve().parent.parent / 'experimentos' / 'presets',
}


def parametro(nombre):
    """Lee settings.SIMULADOR[nombre]; sin settings configurados usa el valor por defecto."""
    if settings.configured:
        return getattr(settings, 'SIMULADOR', {}).get(nombre, VALORES_POR_DEFECTO.get(nombre))
    return VALORES_POR_DEFECTO.get(nombre)
