"""
Ejecucion de barridos sobre varios ensayos.

El ensayo t usa RngStream(semilla, t) para todos los valores del barrido y
todos los esquemas, asi las comparaciones quedan emparejadas. Los ensayos
pueden repartirse en hilos; la reduccion se hace en orden de ensayo.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from analitica.problema import construir_problema
from nucleo.ajustes import parametro
from nucleo.aleatorio import RngStream
from nucleo.excepciones import InfactibleError
from optimizador.bcd import search_decoding_orders
from red.escenario import generar_escenario
from referencias.esquemas import evaluar_esquemas

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FilaResultado:
    esquema: str
    parametro: str
    valor: float
    enst_media: float
    enst_error: float
    ensayos: int


@dataclass(frozen=True)
class FilaTraza:
    valor: float
    bucle: str
    iteracion: int
    metrica: float


@dataclass
class ResultadoExperimento:
    filas: list = field(default_factory=list)
    trazas: list = field(default_factory=list)


def media_y_error(muestras):
    muestras = np.asarray(muestras, dtype=float)
    if muestras.size < 2:
        return float(muestras.mean()), 0.0
    return float(muestras.mean()), float(muestras.std(ddof=1) / math.sqrt(muestras.size))


def ejecutar_ensayo(config, esquemas, t):
    """ENST de red por esquema en el ensayo t."""
    escenario = generar_escenario(config.red, RngStream(config.semilla, t))
    return evaluar_esquemas(esquemas, escenario, config.spec, config.budget_por_usuario, config.solver)


def ejecutar_ensayos(config, esquemas, hilos=1):
    """Totales por esquema de los ensayos 0..config.ensayos-1, en orden de ensayo."""
    ensayos = range(config.ensayos)
    if hilos > 1:
        with ThreadPoolExecutor(max_workers=hilos) as pool:
            return list(pool.map(lambda t: ejecutar_ensayo(config, esquemas, t), ensayos))
    return [ejecutar_ensayo(config, esquemas, t) for t in ensayos]


def trazas_convergencia(config, valor, t=0):
    """
    Trazas del primer cluster activo del ensayo t: F_j por iteracion
    interna y suma de tasas por iteracion externa.
    """
    escenario = generar_escenario(config.red, RngStream(config.semilla, t))
    activos = escenario.plan.active_clusters
    if not activos:
        return []
    problema = construir_problema(escenario, activos[0], config.spec, config.budget_por_usuario)
    try:
        solucion = search_decoding_orders(problema, config.solver)
    except InfactibleError as exc:
        logger.warning("Sin trazas para P=%s: %s", valor, exc)
        return []
    filas = []
    iteracion = 0
    for traza in solucion.report.traza_objetivo:
        for metrica in traza:
            filas.append(FilaTraza(valor, "interno", iteracion, float(metrica)))
            iteracion += 1
    for q, tasas in enumerate(solucion.report.traza_tasas, start=1):
        filas.append(FilaTraza(valor, "externo", q, float(sum(tasas))))
    return filas


def run_experiment(config, sweep, hilos=None):
    """Media y error estandar del ENST por esquema y valor del barrido."""
    hilos = hilos or parametro("HILOS")
    esquemas = sweep.esquemas_para(config)
    resultado = ResultadoExperimento()
    for valor in sweep.valores:
        config_valor = sweep.aplicar(config, valor)
        logger.info("Barrido %s = %s: %d ensayos", sweep.parametro, valor, config_valor.ensayos)
        totales = ejecutar_ensayos(config_valor, esquemas, hilos)
        for kind in esquemas:
            media, error = media_y_error([total[kind] for total in totales])
            resultado.filas.append(
                FilaResultado(kind.value, sweep.parametro, float(valor), media, error, config_valor.ensayos)
            )
            logger.info("  %s: ENST %.6g +- %.3g", kind.label, media, error)
        if sweep.trazas:
            resultado.trazas.extend(trazas_convergencia(config_valor, float(valor)))
    return resultado
