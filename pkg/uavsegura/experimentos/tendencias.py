"""
Verificacion de tendencias del ENST sobre ensayos emparejados.

Las dominancias se miden ensayo a ensayo: todos los esquemas ven el mismo
escenario. Las de RSMA frente a sus propias variantes valen por
construccion y se exigen en todos los ensayos; las de RSMA frente a
PD-NOMA y TDMA se exigen en una fraccion. Las monotonias se comparan
entre valores vecinos de un barrido con una tolerancia de dos errores
estandar.
"""
import logging
import math
from dataclasses import dataclass, field

from referencias.esquemas import BaselineKind

from .barridos import PRESETS
from .ejecucion import ejecutar_ensayos, run_experiment

logger = logging.getLogger(__name__)

FRACCION_BASELINES = 0.9
SIGMAS = 2.0

# (mayor, menor, fraccion minima de ensayos)
DOMINANCIAS = (
    (BaselineKind.RSMA, BaselineKind.PD_NOMA, FRACCION_BASELINES),
    (BaselineKind.RSMA, BaselineKind.TDMA, FRACCION_BASELINES),
    (BaselineKind.RSMA, BaselineKind.RSMA_SSIC, 1.0),
    (BaselineKind.RSMA, BaselineKind.RSMA_EVE_SIC, 1.0),
)

MONOTONIAS = {
    "potencia": "creciente",
    "eps_sop": "creciente",
    "espias": "decreciente",
    "antenas_espia": "decreciente",
}


@dataclass(frozen=True)
class Dominancia:
    mayor: str
    menor: str
    fraccion: float
    minima: float

    @property
    def aprobada(self):
        return self.fraccion >= self.minima


@dataclass(frozen=True)
class Monotonia:
    esquema: str
    parametro: str
    sentido: str
    violaciones: tuple = ()

    @property
    def aprobada(self):
        return not self.violaciones


@dataclass
class ReporteTendencias:
    dominancias: list = field(default_factory=list)
    monotonias: list = field(default_factory=list)

    @property
    def fallas(self):
        return [d for d in self.dominancias if not d.aprobada] + [m for m in self.monotonias if not m.aprobada]

    @property
    def aprobado(self):
        return not self.fallas

    def como_texto(self):
        lineas = []
        for d in self.dominancias:
            estado = "ok" if d.aprobada else "FALLA"
            lineas.append(f"{d.mayor} >= {d.menor}: {d.fraccion:.2%} de los ensayos (minimo {d.minima:.0%})  {estado}")
        for m in self.monotonias:
            estado = "ok" if m.aprobada else "FALLA en " + ", ".join(f"{a:g}->{b:g}" for a, b in m.violaciones)
            lineas.append(f"{m.esquema} {m.sentido} en {m.parametro}  {estado}")
        lineas.append("APROBADO" if self.aprobado else f"FALLAN {len(self.fallas)} tendencias")
        return "\n".join(lineas)


def fraccion_dominante(totales, mayor, menor, tolerancia=1e-9):
    """Fraccion de ensayos en los que mayor no queda por debajo de menor."""
    if not totales:
        return 0.0
    cumple = sum(
        1 for total in totales if total[mayor] >= total[menor] - tolerancia * max(1.0, abs(total[menor]))
    )
    return cumple / len(totales)


def violaciones_de_monotonia(filas, esquema, sentido, sigmas=SIGMAS):
    """
    Pares de valores vecinos (ordenados) donde la media se mueve contra
    sentido por mas de sigmas errores estandar combinados.
    """
    propias = sorted((f for f in filas if f.esquema == esquema), key=lambda f: f.valor)
    signo = 1.0 if sentido == "creciente" else -1.0
    violaciones = []
    for anterior, siguiente in zip(propias, propias[1:]):
        holgura = sigmas * math.hypot(anterior.enst_error, siguiente.enst_error)
        if signo * (siguiente.enst_media - anterior.enst_media) < -holgura:
            violaciones.append((anterior.valor, siguiente.valor))
    return tuple(violaciones)


def verificar_tendencias(config, hilos=1, barridos=None):
    """
    Corre config.ensayos ensayos emparejados y los barridos pedidos (por
    defecto todos los de MONOTONIAS) y arma el reporte.
    """
    reporte = ReporteTendencias()
    esquemas = sorted({kind for par in DOMINANCIAS for kind in par[:2]}, key=list(BaselineKind).index)
    totales = ejecutar_ensayos(config, esquemas, hilos)
    for mayor, menor, minima in DOMINANCIAS:
        fraccion = fraccion_dominante(totales, mayor, menor)
        reporte.dominancias.append(Dominancia(mayor.value, menor.value, fraccion, minima))
        logger.info("%s >= %s en %.1f%% de %d ensayos", mayor.value, menor.value, 100 * fraccion, len(totales))

    for parametro in MONOTONIAS if barridos is None else barridos:
        sweep = PRESETS[parametro].con_esquemas([BaselineKind.RSMA])
        filas = run_experiment(config, sweep, hilos).filas
        violaciones = violaciones_de_monotonia(filas, BaselineKind.RSMA.value, MONOTONIAS[parametro])
        reporte.monotonias.append(
            Monotonia(BaselineKind.RSMA.value, parametro, MONOTONIAS[parametro], violaciones)
        )
    logger.info("Tendencias: %d fallas", len(reporte.fallas))
    return reporte
