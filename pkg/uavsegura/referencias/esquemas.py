"""
Esquemas de comparacion: RSMA con busqueda de orden, RSMA con orden fijo,
PD-NOMA, TDMA, RSMA disenado con CSIT perfecta y RSMA frente a un espia
que aplica SIC.
"""
import logging
import math

import numpy as np
from django.db import models

from analitica.cerradas import cotas_redundancia, enst, probabilidades_cop
from analitica.orden import DecodingOrder
from analitica.problema import construir_problema
from nucleo.excepciones import DominioError, InfactibleError
from optimizador.bcd import optimizar_orden, search_decoding_orders
from optimizador.tipos import SolverConfig

logger = logging.getLogger(__name__)


class BaselineKind(models.TextChoices):
    RSMA = "RSMA", "RSMA (orden optimo)"
    RSMA_SSIC = "RSMA-SSIC", "RSMA (orden SIC fijo)"
    TDMA = "TDMA", "TDMA"
    PD_NOMA = "PD-NOMA", "NOMA en el dominio de potencia"
    RSMA_CSIT_PERFECTA = "RSMA-perfect-CSIT", "RSMA con CSIT perfecta"
    RSMA_EVE_SIC = "RSMA-eve-SIC", "RSMA con espia SIC"


def tdma_rate(k, powers, problema):
    """alpha log2(1 + p PL |w^H f|^2 / sigma^2) con alpha = 1/K y sin interferencia."""
    p = float(np.asarray(powers, dtype=float)[k])
    if p < 0:
        raise DominioError("La potencia no puede ser negativa")
    if p == 0:
        return 0.0
    alpha = 1.0 / problema.K
    senal = p * problema.pl_uav[k] * problema.ganancias[k]
    if problema.spec.sigma_m_sq == 0:
        return math.inf
    return alpha * math.log2(1.0 + senal / problema.spec.sigma_m_sq)


def tdma_enst(problema):
    """
    ENST de TDMA con el presupuesto completo de cada usuario.

    La redundancia es la del espia sin interferentes:
    kappa = ln(1/eps) * media / sigma_e^2.
    """
    alpha = 1.0 / problema.K
    tasas = np.array([tdma_rate(k, problema.budgets, problema) for k in range(problema.K)])
    if problema.J == 0:
        return float(np.sum(tasas))
    netos = []
    for j in range(problema.J):
        medias = problema.budgets * problema.pl_eve[j] * problema.lambda_max[j]
        if problema.spec.sigma_e_sq == 0:
            redundancia = np.full(problema.K, math.inf)
        else:
            kappa = math.log(1.0 / problema.spec.eps_sop) * medias / problema.spec.sigma_e_sq
            redundancia = np.log2(1.0 + kappa)
        netos.append(float(np.sum(np.maximum(tasas - alpha * redundancia, 0.0))))
    return min(netos)


def orden_pd_noma(problema):
    """Orden por ganancia efectiva |w^H f|^2 PL descendente; empates por indice."""
    efectiva = problema.ganancias * problema.pl_uav
    usuarios = sorted(range(problema.K), key=lambda k: (-efectiva[k], k))
    return DecodingOrder(tuple((k, 0) for k in usuarios))


def pd_noma_solution(problema, config=None):
    """Un mensaje por usuario y orden fijo, con el mismo optimizador."""
    if problema.parts != 1:
        raise DominioError("PD-NOMA necesita un problema con una parte por usuario")
    return optimizar_orden(problema, orden_pd_noma(problema), config)


def eve_sic_variant(solution, problema):
    """
    Reevalua una asignacion frente a espias que decodifican con SIC.

    Cada espia ya quito los mensajes decodificados antes del objetivo, asi
    que solo interfieren los de Phi. Con las potencias y tasas de la
    asignacion la redundancia pasa a ser max(D, D_sic) para cada espia.
    Devuelve (redundancia (J, mensajes), ENST).
    """
    if problema.J == 0:
        return np.zeros((0, problema.n_mensajes)), solution.objective
    con_sic = cotas_redundancia(problema, solution.powers, order=solution.order)
    redundancia = np.maximum(np.asarray(solution.redundancy, dtype=float), con_sic)
    return redundancia, enst(solution.rates, solution.cop, redundancia)


def evaluar_csit_perfecta(problema, config=None):
    """Disena sin ICI y evalua la COP con el modelo imperfecto real."""
    diseno = search_decoding_orders(problema.sin_ici(), config)
    cop = probabilidades_cop(problema, diseno.order, diseno.powers, diseno.rates)
    return enst(diseno.rates, cop, diseno.redundancy)


def _evaluar_cluster(kinds, escenario, m, spec, budget_por_usuario, config):
    """ENST del cluster m por esquema; la solucion RSMA se comparte con la variante SIC."""
    problema = construir_problema(escenario, m, spec, budget_por_usuario, parts=2)
    soluciones = {}
    por_orden = {}

    def rsma():
        if "rsma" not in soluciones:
            soluciones["rsma"] = search_decoding_orders(problema, config, resultados=por_orden)
        return soluciones["rsma"]

    def ssic():
        natural = DecodingOrder.natural(problema.K)
        if BaselineKind.RSMA in kinds or BaselineKind.RSMA_EVE_SIC in kinds:
            try:
                rsma()
            except InfactibleError:
                pass
            if str(natural) in por_orden:
                return por_orden[str(natural)].objective
        return optimizar_orden(problema, natural, config).objective

    calculos = {
        BaselineKind.RSMA: lambda: rsma().objective,
        BaselineKind.RSMA_EVE_SIC: lambda: eve_sic_variant(rsma(), problema)[1],
        BaselineKind.RSMA_SSIC: ssic,
        BaselineKind.RSMA_CSIT_PERFECTA: lambda: evaluar_csit_perfecta(problema, config),
        BaselineKind.PD_NOMA: lambda: pd_noma_solution(
            construir_problema(escenario, m, spec, budget_por_usuario, parts=1), config
        ).objective,
        BaselineKind.TDMA: lambda: tdma_enst(problema),
    }
    valores = {}
    for kind in kinds:
        try:
            valores[kind] = calculos[kind]()
        except InfactibleError as exc:
            logger.warning("Cluster %d infactible para %s: %s", m, kind.label, exc)
            valores[kind] = 0.0
    return valores


def evaluar_esquemas(kinds, escenario, spec, budget_por_usuario, config=None):
    """
    ENST de red (suma sobre clusters) de cada esquema en un ensayo.

    Un cluster infactible aporta 0 al esquema que fallo.
    """
    config = config or SolverConfig()
    kinds = [BaselineKind(kind) for kind in kinds]
    totales = {kind: 0.0 for kind in kinds}
    for m in escenario.plan.active_clusters:
        for kind, valor in _evaluar_cluster(kinds, escenario, m, spec, budget_por_usuario, config).items():
            totales[kind] += valor
    return totales


def evaluar_esquema(kind, escenario, spec, budget_por_usuario, config=None):
    return evaluar_esquemas([kind], escenario, spec, budget_por_usuario, config)[BaselineKind(kind)]
