"""
Residuo de estacionariedad KKT sobre el problema original de un espia.

Las variables son z = (x, D) con x = p / P_k; las tasas quedan fijas.
"""
import logging

import numpy as np
from scipy import optimize

from analitica.cerradas import cotas_cop_log, cotas_redundancia
from nucleo.excepciones import DominioError

from .subproblema import coeficientes_objetivo

logger = logging.getLogger(__name__)

TOLERANCIA_FACTIBLE = 1e-6


def residuo_estacionario(gradiente, activos):
    """min_{gamma >= 0} || sum gamma_i grad g_i - grad F || via NNLS."""
    gradiente = np.asarray(gradiente, dtype=float)
    if len(activos) == 0:
        return float(np.linalg.norm(gradiente))
    G = np.column_stack([np.asarray(g, dtype=float) for g in activos])
    _, residuo = optimize.nnls(G, gradiente)
    return float(residuo)


def _diferencias_centrales(funcion, z):
    base = np.asarray(funcion(z), dtype=float)
    jacobiano = np.zeros((np.atleast_1d(base).size, z.size))
    for i in range(z.size):
        h = 1e-5 * max(abs(z[i]), 1e-3)
        arriba, abajo = z.copy(), z.copy()
        arriba[i] += h
        abajo[i] -= h
        jacobiano[:, i] = (np.atleast_1d(funcion(arriba)) - np.atleast_1d(funcion(abajo))) / (2.0 * h)
    return base, jacobiano


def kkt_residual(solution, problema, eve=None, tol_activo=1e-6):
    """
    Residuo KKT de la asignacion frente al espia eve (por defecto el que
    limita), con las potencias, tasas y redundancias de la propia solucion.

    Restricciones: cota COP (<= 0), redundancia minima - D, D - r,
    presupuesto por usuario y x >= 0. Lanza DominioError si el punto no es
    factible.
    """
    if problema.J == 0:
        raise DominioError("Sin espias no hay restricciones de secreto que verificar")
    eve = solution.eve_critico if eve is None else eve
    if eve is None or not 0 <= eve < problema.J:
        raise DominioError(f"La solucion no tiene resultado para el espia {eve}")

    order = solution.order
    n = problema.n_mensajes
    presupuestos = problema.presupuesto_mensaje()
    rates = np.asarray(solution.rates, dtype=float)
    p_ref = np.asarray(solution.powers, dtype=float)
    coeficientes = coeficientes_objetivo(problema, order, rates, p_ref)

    def objetivo(z):
        return -(coeficientes @ z[:n] + np.sum(np.log(np.maximum(rates - z[n:], 1e-300))))

    def restricciones(z):
        x, D = z[:n], z[n:]
        p = presupuestos * np.maximum(x, 1e-300)
        return np.concatenate([
            cotas_cop_log(problema, order, p, rates),
            cotas_redundancia(problema, p, eves=[eve])[0] - D,
            D - rates,
            x.reshape(problema.K, problema.parts).sum(axis=1) - 1.0,
            -x,
        ])

    z = np.concatenate([p_ref / presupuestos, np.asarray(solution.redundancy, dtype=float)[eve]])
    valores = restricciones(z)
    if np.any(valores > TOLERANCIA_FACTIBLE):
        peor = int(np.argmax(valores))
        raise DominioError(f"El punto no es factible: restriccion {peor} vale {valores[peor]:.3g}")

    _, gradiente = _diferencias_centrales(objetivo, z)
    _, jacobiano = _diferencias_centrales(restricciones, z)
    activos = [jacobiano[i] for i in np.flatnonzero(np.abs(valores) <= tol_activo)]
    residuo = residuo_estacionario(-gradiente[0], activos)
    logger.debug("KKT espia %d: %d activas, residuo %.3g", eve, len(activos), residuo)
    return residuo
