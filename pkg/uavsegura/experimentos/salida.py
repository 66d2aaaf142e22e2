import csv
import logging

from nucleo.excepciones import DominioError

logger = logging.getLogger(__name__)

COLUMNAS = ("scheme", "parameter", "value", "enst_mean", "enst_stderr", "trials")
COLUMNAS_TRAZAS = ("valor", "bucle", "iteracion", "metrica")


def _texto(valor):
    # repr da la representacion mas corta que se relee exacta
    return repr(float(valor)) if isinstance(valor, float) else str(valor)


def _escribir(ruta, columnas, filas):
    with open(ruta, "w", newline="", encoding="utf-8") as archivo:
        escritor = csv.writer(archivo, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        escritor.writerow(columnas)
        for fila in filas:
            escritor.writerow([_texto(valor) for valor in fila])


def emit_csv(resultado, ruta):
    """Una fila por (esquema, valor) con columnas fijas."""
    filas = resultado.filas if hasattr(resultado, "filas") else resultado
    if not filas:
        raise DominioError("La tabla de resultados esta vacia")
    _escribir(ruta, COLUMNAS, [
        (f.esquema, f.parametro, f.valor, f.enst_media, f.enst_error, f.ensayos) for f in filas
    ])
    logger.info("Escritas %d filas en %s", len(filas), ruta)


def emitir_trazas_csv(trazas, ruta):
    if not trazas:
        raise DominioError("No hay trazas de convergencia para escribir")
    _escribir(ruta, COLUMNAS_TRAZAS, [(f.valor, f.bucle, f.iteracion, f.metrica) for f in trazas])
    logger.info("Escritas %d trazas en %s", len(trazas), ruta)
