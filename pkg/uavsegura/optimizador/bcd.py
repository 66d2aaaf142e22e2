"""
Descenso por bloques en dos niveles.

El bucle externo fija las potencias y actualiza las tasas en forma
cerrada; el interno fija las tasas y mejora potencias y redundancias con
subproblemas SPCA. Cada espia se resuelve por separado; la asignacion del
cluster es una sola, evaluada frente a todos los espias a la vez.
"""
import logging
import math
import time

import numpy as np

from analitica.cerradas import (
    cotas_cop_log,
    cotas_redundancia,
    enst,
    probabilidades_cop,
    sop_closed_form,
    tasas_optimas,
)
from analitica.orden import DecodingOrder, enumerate_orders, numero_de_ordenes
from nucleo.excepciones import DominioError, InfactibleError, OrdenDemasiadoGrandeError

from .kkt import kkt_residual
from .subproblema import estado_ajustado, objetivo_sustituto, solve_subproblem
from .tipos import AllocationSolution, SolucionEspia, SolverConfig, SolverReport

logger = logging.getLogger(__name__)

MAX_USUARIOS_BUSQUEDA = 4
MARGEN_TASA = 1e-6
ESCALA_MINIMA = 1e-9
PASOS_BISECCION = 40


def _factible(problema, order, powers, eves):
    tasas = tasas_optimas(problema, order, powers)
    redundancias = cotas_redundancia(problema, powers, eves=eves)
    return bool(np.all(tasas[None, :] > redundancias + MARGEN_TASA))


def reparar_potencias(problema, order, powers, eves=None):
    """
    Reescala powers por el mayor c en (0, 1] con r*(c p) > D_min(c p).

    Primero busca un c factible dividiendo a la mitad y luego lo afina por
    biseccion entre c y 2c.
    """
    p = np.asarray(powers, dtype=float)
    if np.any(p <= 0):
        raise DominioError("Las potencias a reparar deben ser positivas")
    if _factible(problema, order, p, eves):
        return p.copy()
    escala = 0.5
    while not _factible(problema, order, escala * p, eves):
        escala /= 2.0
        if escala < ESCALA_MINIMA:
            raise InfactibleError(
                "Ninguna escala de potencia deja la tasa por encima de la redundancia",
                {"cluster": problema.cluster, "orden": str(order), "espias": list(eves or range(problema.J))},
            )
    inferior, superior = escala, min(2.0 * escala, 1.0)
    for _ in range(PASOS_BISECCION):
        medio = 0.5 * (inferior + superior)
        if _factible(problema, order, medio * p, eves):
            inferior = medio
        else:
            superior = medio
    logger.info("Cluster %d: potencias reescaladas por %.4g", problema.cluster, inferior)
    return inferior * p


def auditar(problema, order, eve, powers, rates, redundancy, config):
    """Restricciones originales que el punto viola (lista vacia si es factible)."""
    p = np.asarray(powers, dtype=float)
    violaciones = []
    usado = p.reshape(problema.K, problema.parts).sum(axis=1)
    if np.any(usado > problema.budgets * (1.0 + 1e-9)):
        violaciones.append("presupuesto")
    if np.any(np.asarray(redundancy) >= np.asarray(rates)):
        violaciones.append("tasa")
    sop = [
        sop_closed_form(eve, k, n, redundancy[problema.indice(k, n)], p, problema)
        for k, n in problema.mensajes
    ]
    if max(sop) > problema.spec.eps_sop + 1e-9:
        violaciones.append("sop")
    if np.any(cotas_cop_log(problema, order, p, rates) > config.tolerancia):
        violaciones.append("cop")
    return violaciones


def inner_loop(problema, order, eve, estado, rates, config, report=None):
    """
    Iteraciones SPCA con tasas fijas.

    Un paso se acepta si F_j no baja y el punto cumple las restricciones
    originales; si no, se acerca a la iteracion previa a la mitad, hasta
    config.max_reducciones veces.
    """
    report = report if report is not None else SolverReport()
    rates = np.asarray(rates, dtype=float)
    p_ref = np.asarray(estado.powers, dtype=float).copy()
    valor = objetivo_sustituto(problema, order, rates, estado.powers, estado.redundancy, p_ref)
    traza = [valor]
    for t in range(1, config.t_max + 1):
        try:
            candidato, _ = solve_subproblem(estado, rates, order, problema, eve, config, p_ref)
        except InfactibleError as exc:
            logger.warning("Espia %d, iteracion %d: %s; se conserva el ultimo punto", eve, t, exc)
            break

        aceptado = None
        paso = 1.0
        for reduccion in range(config.max_reducciones + 1):
            if reduccion:
                p_paso = estado.powers + paso * (candidato.powers - estado.powers)
                nuevo = estado_ajustado(problema, eve, p_paso, candidato.iteracion, estado.traza)
            else:
                nuevo = candidato
            F = objetivo_sustituto(problema, order, rates, nuevo.powers, nuevo.redundancy, p_ref)
            factible = not auditar(problema, order, eve, nuevo.powers, rates, nuevo.redundancy, config)
            if factible and F >= valor - 1e-12 * max(1.0, abs(valor)):
                aceptado = (nuevo, F)
                break
            paso /= 2.0
            report.pasos_reducidos += 1
        if aceptado is None:
            logger.warning("Espia %d, iteracion %d: ningun paso mejora F; se detiene el bucle interno", eve, t)
            break
        if paso < 1.0:
            logger.warning("Espia %d, iteracion %d: paso reducido a %.3g", eve, t, paso)

        nuevo, F = aceptado
        cambio = abs(F - valor)
        estado, valor = nuevo, F
        traza.append(F)
        logger.debug("Espia %d, iteracion interna %d: F=%.6g", eve, t, F)
        if cambio < config.delta_i:
            break

    estado.traza = traza
    report.iteraciones_internas.append(len(traza) - 1)
    report.traza_objetivo.append([float(valor_t) for valor_t in traza])
    return estado, valor


def outer_loop(problema, order, eve, config, powers=None):
    """
    Alterna potencias (bucle interno) y tasas r*(p) para el espia eve.

    Devuelve el mejor iterado por ENST; si las tasas no se estabilizan en
    config.q_max rondas el reporte queda con convergio=False.
    """
    inicio = time.perf_counter()
    report = SolverReport()
    p = problema.presupuesto_mensaje() / problema.parts if powers is None else np.asarray(powers, dtype=float)
    p = reparar_potencias(problema, order, p, eves=[eve])
    rates = tasas_optimas(problema, order, p)
    mejor = None
    convergio = False
    for q in range(1, config.q_max + 1):
        estado = estado_ajustado(problema, eve, p)
        estado, _ = inner_loop(problema, order, eve, estado, rates, config, report)
        p = estado.powers
        nuevas = tasas_optimas(problema, order, p)
        redundancia = estado.redundancy
        if np.any(nuevas <= redundancia + MARGEN_TASA):
            p = reparar_potencias(problema, order, p, eves=[eve])
            nuevas = tasas_optimas(problema, order, p)
            redundancia = cotas_redundancia(problema, p, eves=[eve])[0]
        cop = probabilidades_cop(problema, order, p, nuevas)
        valor = enst(nuevas, cop, redundancia[None, :])
        report.iteraciones_externas = q
        report.traza_tasas.append([float(r) for r in nuevas])
        if mejor is None or valor > mejor.enst:
            mejor = SolucionEspia(
                eve=eve,
                powers=p.copy(),
                rates=nuevas,
                redundancy=redundancia,
                cop=cop,
                enst=valor,
                surrogate_objective=objetivo_sustituto(problema, order, nuevas, p, redundancia, p),
                report=report,
            )
        cambio = float(np.max(np.abs(nuevas - rates)))
        rates = nuevas
        logger.debug("Espia %d, iteracion externa %d: ENST=%.6g, max|dr|=%.3g", eve, q, valor, cambio)
        if cambio < config.epsilon:
            convergio = True
            break
    if not convergio:
        logger.warning(
            "Cluster %d, espia %d: las tasas no convergieron en %d iteraciones externas",
            problema.cluster, eve, config.q_max,
        )
    report.convergio = convergio
    report.tiempo = time.perf_counter() - inicio
    return mejor


def _sin_espias(problema, order):
    p = problema.presupuesto_mensaje() / problema.parts
    rates = tasas_optimas(problema, order, p)
    cop = probabilidades_cop(problema, order, p, rates)
    vacia = np.zeros((0, problema.n_mensajes))
    valor = enst(rates, cop, vacia)
    return AllocationSolution(
        powers=p, rates=rates, redundancy=vacia, order=order, objective=valor, surrogate_objective=valor, cop=cop
    )


def asignacion_conjunta(problema, order, powers, config):
    """
    Evalua unas potencias frente a todos los espias a la vez.

    Repara la escala para que r* supere la redundancia minima de cada
    espia, recalcula D para los J espias y audita cada uno. El objetivo es
    el ENST real min_j de esa unica asignacion.
    """
    p = reparar_potencias(problema, order, powers)
    rates = tasas_optimas(problema, order, p)
    redundancia = cotas_redundancia(problema, p)
    violaciones = {
        j: faltas
        for j in range(problema.J)
        if (faltas := auditar(problema, order, j, p, rates, redundancia[j], config))
    }
    if violaciones:
        raise InfactibleError(
            "La asignacion no cumple las restricciones de todos los espias",
            {"cluster": problema.cluster, "orden": str(order), "violaciones": violaciones},
        )
    cop = probabilidades_cop(problema, order, p, rates)
    netos = [enst(rates, cop, redundancia[j][None, :]) for j in range(problema.J)]
    critico = int(np.argmin(netos))
    return AllocationSolution(
        powers=p,
        rates=rates,
        redundancy=redundancia,
        order=order,
        objective=enst(rates, cop, redundancia),
        surrogate_objective=objetivo_sustituto(problema, order, rates, p, redundancia[critico], p),
        cop=cop,
        eve_critico=critico,
    )


def optimizar_orden(problema, order, config=None):
    """
    Asignacion del cluster con un orden fijo.

    Cada espia se optimiza por separado; las potencias de cada uno y el
    punto inicial son candidatos que se reevaluan frente a los J espias, y
    gana el de mayor ENST real. Sin espias reparte el presupuesto a partes
    iguales.
    """
    config = config or SolverConfig()
    if problema.J == 0:
        return _sin_espias(problema, order)
    por_espia = [outer_loop(problema, order, j, config) for j in range(problema.J)]
    candidatos = [(s.report, s.powers) for s in por_espia]
    candidatos.append((por_espia[0].report, problema.presupuesto_mensaje() / problema.parts))
    mejor, report = None, None
    for origen, p in candidatos:
        try:
            solucion = asignacion_conjunta(problema, order, p, config)
        except InfactibleError as exc:
            logger.debug("Cluster %d, orden %s: candidato descartado (%s)", problema.cluster, order, exc)
            continue
        if mejor is None or solucion.objective > mejor.objective:
            mejor, report = solucion, origen
    if mejor is None:
        raise InfactibleError(
            "Ninguna asignacion cumple a la vez con todos los espias",
            {"cluster": problema.cluster, "orden": str(order)},
        )
    report.tiempo = sum(s.report.tiempo for s in por_espia)
    report.convergio = all(s.report.convergio for s in por_espia)
    try:
        report.residuo_kkt = kkt_residual(mejor, problema)
    except DominioError as exc:
        logger.warning("Cluster %d: sin residuo KKT (%s)", problema.cluster, exc)
    mejor.por_espia = por_espia
    mejor.report = report
    return mejor


def search_decoding_orders(problema, config=None, ordenes=None, resultados=None):
    """
    Busqueda exhaustiva del orden SIC: resuelve cada orden y se queda con
    el de mayor objetivo. Los ordenes infactibles se saltean.

    Si se pasa el diccionario resultados, se completa con str(orden) ->
    solucion para reutilizar las soluciones por orden.
    """
    config = config or SolverConfig()
    if ordenes is None:
        if problema.K > MAX_USUARIOS_BUSQUEDA:
            raise OrdenDemasiadoGrandeError(
                f"La busqueda exhaustiva admite hasta {MAX_USUARIOS_BUSQUEDA} usuarios por cluster, "
                f"se pidieron {problema.K} ({numero_de_ordenes(problema.K, problema.parts)} ordenes)"
            )
        ordenes = enumerate_orders(problema.K, problema.parts)
    mejor = None
    candidatos = []
    evaluados = 0
    for order in ordenes:
        evaluados += 1
        try:
            solucion = optimizar_orden(problema, order, config)
        except InfactibleError as exc:
            logger.warning("Cluster %d, orden %s infactible: %s", problema.cluster, order, exc)
            continue
        candidatos.append((str(order), solucion.objective))
        if resultados is not None:
            resultados[str(order)] = solucion
        if mejor is None or solucion.objective > mejor.objective:
            mejor = solucion
    if mejor is None:
        raise InfactibleError("Ningun orden SIC es factible", {"cluster": problema.cluster, "ordenes": evaluados})
    mejor.candidatos = candidatos
    mejor.report.ordenes_evaluados = evaluados
    logger.info("Cluster %d: mejor orden %s con ENST %.6g", problema.cluster, mejor.order, mejor.objective)
    return mejor


def optimizar_orden_natural(problema, config=None):
    return optimizar_orden(problema, DecodingOrder.natural(problema.K, problema.parts), config)


def complexity_profile(K, J, N=1):
    """Conteos de la busqueda exhaustiva para K usuarios, J espias y N puntos iniciales."""
    if K < 1 or J < 0 or N < 1:
        raise DominioError("K y N deben ser positivos y J no negativo")
    ordenes = numero_de_ordenes(K, 2)
    dimension = 5 * (1 + J) * K
    return {
        "ordenes": ordenes,
        "dimension": dimension,
        "costo_por_iteracion": ((dimension - 1) / 2.0) ** 3 * ordenes,
        "costo_busqueda": 2 ** K + N * K ** 3 * math.factorial(2 * K) // 2 ** K,
    }
