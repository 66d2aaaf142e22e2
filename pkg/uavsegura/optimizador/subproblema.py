"""
Subproblema convexo de una iteracion SPCA para un espia.

Las variables van escaladas para que el solver trabaje con magnitudes de
orden uno: x = p / P_k y, para la cadena de secreto, w = theta / theta_t,
y = rho / rho_t, u = nu / nu_t, v = vartheta / vartheta_t. En el punto de
expansion todas valen 1 y el subproblema es factible.
"""
import logging
import math

import cvxpy as cp
import numpy as np

from analitica.cerradas import cop_bound_log, cotas_redundancia
from nucleo.especiales import lambert_w0_exp
from nucleo.excepciones import DominioError, InfactibleError

from .sustitutos import surrogate_Gamma, surrogate_Lambda, surrogate_Theta, surrogate_W0_linearization
from .tipos import SpcaState

logger = logging.getLogger(__name__)

ESTADOS_ACEPTABLES = (cp.OPTIMAL, cp.OPTIMAL_INACCURATE)
LOG_MAXIMO = 700.0


def _medias_espia(problema, eve, powers):
    return np.asarray(powers, dtype=float) * problema.pl_eve_mensaje(eve) * problema.lambda_max[eve]


def estado_ajustado(problema, eve, powers, iteracion=0, traza=None):
    """
    SpcaState con las auxiliares tight en powers.

    D es la redundancia minima del espia y theta = 2^D - 1; rho, nu y
    vartheta son los valores exactos de la cadena de secreto.
    """
    p = np.asarray(powers, dtype=float)
    if np.any(p <= 0):
        raise DominioError("El punto de expansion necesita potencias positivas")
    medias = _medias_espia(problema, eve, p)
    n = problema.n_mensajes
    L = n - 1
    eps = problema.spec.eps_sop
    sigma2 = problema.spec.sigma_e_sq

    redundancy = cotas_redundancia(problema, p, eves=[eve])[0]
    theta = 2.0 ** redundancy - 1.0
    log_vartheta = np.zeros(n)
    rho = np.zeros(n)
    nu = np.zeros(n)
    if L > 0:
        for i in range(n):
            otras = np.delete(medias, i)
            log_vartheta[i] = (float(np.sum(-np.log(otras))) - math.log(eps)) / L
            if sigma2 > 0:
                log_nu = math.log(sigma2 / L) + log_vartheta[i]
                nu[i] = math.exp(min(log_nu, LOG_MAXIMO))
                rho[i] = lambert_w0_exp(log_nu)
            else:
                rho[i] = math.exp(min(log_vartheta[i], LOG_MAXIMO))
    return SpcaState(
        powers=p,
        redundancy=redundancy,
        theta=theta,
        rho=rho,
        nu=nu,
        vartheta=np.exp(np.minimum(log_vartheta, LOG_MAXIMO)),
        log_vartheta=log_vartheta,
        iteracion=iteracion,
        traza=list(traza or []),
    )


def coeficientes_objetivo(problema, order, rates, p_ref):
    """
    Coeficientes lineales en x del primer termino de F_j.

    El termino del mensaje i es beta_i * sum_Phi PL' P' x' / (PL p_ref_i).
    """
    beta = 2.0 ** np.asarray(rates, dtype=float) - 1.0
    presupuestos = problema.presupuesto_mensaje()
    coeficientes = np.zeros(problema.n_mensajes)
    for k, n in problema.mensajes:
        i = problema.indice(k, n)
        for kk, nn in order.phi(k, n):
            ii = problema.indice(kk, nn)
            coeficientes[ii] += beta[i] * problema.pl_uav[kk] * presupuestos[ii] / (problema.pl_uav[k] * p_ref[i])
    return coeficientes


def objetivo_sustituto(problema, order, rates, powers, redundancy, p_ref):
    """F_j evaluado en numeros; -inf si alguna tasa no supera su redundancia."""
    rates = np.asarray(rates, dtype=float)
    holgura = rates - np.asarray(redundancy, dtype=float)
    if np.any(holgura <= 0):
        return -math.inf
    x = np.asarray(powers, dtype=float) / problema.presupuesto_mensaje()
    return float(coeficientes_objetivo(problema, order, rates, p_ref) @ x + np.sum(np.log(holgura)))


def _cadena_secreto(problema, estado, eve, x, D, x_t):
    """Restricciones C2 convexificadas en el punto de expansion."""
    n = problema.n_mensajes
    L = n - 1
    eps = problema.spec.eps_sop
    sigma2 = problema.spec.sigma_e_sq
    if L == 0:
        if not math.isfinite(estado.theta[0]):
            raise InfactibleError("Sin ruido ni interferencia el espia decodifica siempre", {"eve": eve})
        # sin interferentes theta es lineal en p
        return [surrogate_Gamma(D[0], estado.redundancy[0]) >= 1 + estado.theta[0] * x[0] / x_t[0]]

    medias_t = _medias_espia(problema, eve, estado.powers)
    w = cp.Variable(n, name="w")
    y = cp.Variable(n, name="y")
    v = cp.Variable(n, pos=True, name="v")
    u = cp.Variable(n, name="u") if sigma2 > 0 else None
    restricciones = []
    for i in range(n):
        restricciones.append(surrogate_Gamma(D[i], estado.redundancy[i]) >= 1 + estado.theta[i] * w[i])
        restricciones.append(w[i] >= surrogate_Theta(x[i], y[i], x_t[i], 1.0) / x_t[i])
        if sigma2 > 0:
            tangente = surrogate_W0_linearization(estado.nu[i] * u[i], estado.nu[i])
            restricciones.append(estado.rho[i] * y[i] >= tangente)
            restricciones.append(u[i] >= v[i])
        else:
            # sin ruido rho coincide con vartheta
            restricciones.append(y[i] >= v[i])
        lambdas = 0
        for ii in range(n):
            if ii != i:
                zeta_t = 1.0 / medias_t[ii]
                lambdas = lambdas + surrogate_Lambda(zeta_t * x_t[ii] * cp.inv_pos(x[ii]), zeta_t)
        restricciones.append(cp.log(v[i]) + estado.log_vartheta[i] >= (lambdas - math.log(eps)) / L)
    return restricciones


def _cop_linealizada(problema, order, rates, p_t, x, x_t):
    """C1 con sus partes concavas linealizadas en p_t."""
    presupuestos = problema.presupuesto_mensaje()
    restricciones = []
    for k, nn in problema.mensajes:
        i = problema.indice(k, nn)
        phi = order.phi(k, nn)
        cota_t = cop_bound_log(k, nn, rates[i], order, p_t, problema)
        beta = 2.0 ** rates[i] - 1.0
        c_i = beta * problema.spec.sigma_m_sq / (2.0 * problema.pl_uav[k] * presupuestos[i])
        expresion = cota_t + c_i / x_t[i] ** 2 * (x[i] - x_t[i])
        grado = problema.n_interferentes + len(phi)
        if grado:
            expresion = expresion - grado * (cp.log(x[i]) - math.log(x_t[i]))
        for kk, n2 in phi:
            ii = problema.indice(kk, n2)
            expresion = expresion + (x[ii] - x_t[ii]) / x_t[ii]
        restricciones.append(expresion <= max(cota_t, 0.0))
    return restricciones


def solve_subproblem(estado, rates, order, problema, eve, config, p_ref):
    """
    Resuelve el subproblema convexificado en estado.powers.

    Devuelve el nuevo SpcaState (con D reajustado a la redundancia minima y
    auxiliares tight) y el valor de F_j en el nuevo punto. Lanza
    InfactibleError si el solver no entrega un optimo.
    """
    K = problema.K
    parts = problema.parts
    presupuestos = problema.presupuesto_mensaje()
    rates = np.asarray(rates, dtype=float)
    p_t = np.asarray(estado.powers, dtype=float)
    x_t = p_t / presupuestos

    x = cp.Variable(problema.n_mensajes, name="x")
    D = cp.Variable(problema.n_mensajes, name="D")
    restricciones = [x >= config.potencia_minima, D >= 0]
    for k in range(K):
        restricciones.append(cp.sum(x[k * parts:(k + 1) * parts]) <= 1)
    restricciones += _cadena_secreto(problema, estado, eve, x, D, x_t)
    restricciones += _cop_linealizada(problema, order, rates, p_t, x, x_t)

    coeficientes = coeficientes_objetivo(problema, order, rates, p_ref)
    objetivo = cp.Maximize(cp.sum(cp.multiply(coeficientes, x)) + cp.sum(cp.log(-D + rates)))
    subproblema = cp.Problem(objetivo, restricciones)
    try:
        subproblema.solve(solver=config.solver)
    except cp.error.SolverError as exc:
        raise InfactibleError("El solver no pudo resolver el subproblema", {"eve": eve, "causa": str(exc)}) from exc
    if subproblema.status not in ESTADOS_ACEPTABLES or x.value is None:
        raise InfactibleError(
            f"Subproblema no resuelto (estado {subproblema.status})",
            {"eve": eve, "estado": subproblema.status},
        )

    x_nuevo = np.clip(np.asarray(x.value, dtype=float), config.potencia_minima, 1.0)
    sumas = x_nuevo.reshape(K, parts).sum(axis=1)
    x_nuevo = x_nuevo / np.repeat(np.maximum(sumas, 1.0), parts)
    p_nuevo = presupuestos * x_nuevo
    nuevo = estado_ajustado(problema, eve, p_nuevo, estado.iteracion + 1, estado.traza)
    valor = objetivo_sustituto(problema, order, rates, p_nuevo, nuevo.redundancy, p_ref)
    logger.debug(
        "Subproblema espia %d iteracion %d: estado %s, F=%.6g", eve, nuevo.iteracion, subproblema.status, valor
    )
    return nuevo, valor
