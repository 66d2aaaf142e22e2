"""
Formas cerradas de COP/SOP, cota de redundancia y ENST.

Todas usan las cantidades normalizadas por la potencia recibida del mensaje
objetivo: lambda_tilde = lambda * p * PL y sigma_tilde^2 = sigma^2 / (p PL).
Las probabilidades se recortan a [0, 1].
"""
import math

import numpy as np

from nucleo.especiales import lambert_w0_exp
from nucleo.excepciones import DominioError

from .problema import rate_params


def _recortar(valor):
    return float(min(1.0, max(0.0, valor)))


def sinr_uav(k, n, order, powers, problema):
    """
    SINR instantanea del mensaje (k, n) en el UAV con las ganancias
    realizadas: interferencia de los mensajes en Phi, fuga ICI y ruido.
    """
    p = np.asarray(powers, dtype=float)
    if np.any(p < 0):
        raise DominioError("Las potencias no pueden ser negativas")
    senal = p[problema.indice(k, n)] * problema.pl_uav[k] * problema.ganancias[k]
    interferencia = sum(
        p[problema.indice(kk, nn)] * problema.pl_uav[kk] * problema.ganancias[kk] for kk, nn in order.phi(k, n)
    )
    denominador = interferencia + float(np.sum(problema.potencia_ici)) + problema.spec.sigma_m_sq
    if senal == 0.0:
        return 0.0
    if denominador == 0.0:
        return math.inf
    return float(senal / denominador)


def sinr_eve(j, k, n, powers, problema, g=None, interferentes=None):
    """
    SINR del espia j sobre (k, n) tratando al resto como ruido.

    g por defecto es el canal efectivo estructural del espia;
    interferentes restringe los mensajes que siguen presentes (variante SIC).
    """
    p = np.asarray(powers, dtype=float)
    if np.any(p < 0):
        raise DominioError("Las potencias no pueden ser negativas")
    g = problema.g_eve[j] if g is None else np.asarray(g)
    recibida = p * problema.pl_eve_mensaje(j) * np.repeat(np.abs(g) ** 2, problema.parts)
    i = problema.indice(k, n)
    if interferentes is None:
        interferencia = float(np.sum(recibida) - recibida[i])
    else:
        interferencia = float(sum(recibida[problema.indice(kk, nn)] for kk, nn in interferentes))
    denominador = interferencia + problema.spec.sigma_e_sq
    if recibida[i] == 0.0:
        return 0.0
    if denominador == 0.0:
        return math.inf
    return float(recibida[i] / denominador)


def cop_closed_form(k, n, r, order, powers, problema):
    """P(r > log2(1 + rho)) con desvanecimiento exponencial en todos los terminos."""
    if r < 0:
        raise DominioError(f"La tasa debe ser no negativa, se recibio {r}")
    if r == 0:
        return 0.0
    p = np.asarray(powers, dtype=float)
    if p[problema.indice(k, n)] <= 0:
        return 1.0
    parametros = rate_params(problema, order, p, k, n, r)
    beta = parametros.beta
    log_exito = -beta * parametros.sigma_norm / 2.0
    log_exito -= float(np.sum(np.log1p(beta / (2.0 * parametros.lambdas))))
    log_exito -= float(np.sum(np.log1p(beta / (2.0 * parametros.lambdas_ici))))
    return _recortar(1.0 - math.exp(log_exito))


def _medias_espia(j, k, n, powers, problema, interferentes):
    """Media de |g|^2 p PL del objetivo y de los interferentes con potencia."""
    p = np.asarray(powers, dtype=float)
    medias = p * problema.pl_eve_mensaje(j) * problema.lambda_max[j]
    i = problema.indice(k, n)
    if interferentes is None:
        otras = np.delete(medias, i)
    else:
        otras = np.array([medias[problema.indice(kk, nn)] for kk, nn in interferentes])
    return medias[i], otras[otras > 0] if otras.size else np.zeros(0)


def sop_closed_form(j, k, n, D, powers, problema, interferentes=None):
    """P(D <= log2(1 + mu)) para el espia j."""
    if D < 0:
        raise DominioError(f"La redundancia debe ser no negativa, se recibio {D}")
    if D == 0:
        return 1.0
    objetivo, otras = _medias_espia(j, k, n, powers, problema, interferentes)
    if objetivo <= 0:
        return 0.0
    if math.isinf(D):
        return 0.0
    kappa = 2.0 ** D - 1.0
    log_sop = -kappa * problema.spec.sigma_e_sq / objetivo
    log_sop -= float(np.sum(np.log1p(kappa * otras / objetivo)))
    return _recortar(math.exp(log_sop))


def sop_upper_bound(j, k, n, D, powers, problema, interferentes=None):
    """Cota superior de la SOP usando 1/(1+x) <= 1/x en cada factor."""
    if D <= 0:
        return 1.0
    objetivo, otras = _medias_espia(j, k, n, powers, problema, interferentes)
    if objetivo <= 0:
        return 0.0
    kappa = 2.0 ** D - 1.0
    log_cota = -kappa * problema.spec.sigma_e_sq / objetivo
    log_cota += float(np.sum(np.log(objetivo / (kappa * otras))))
    return _recortar(math.exp(min(log_cota, 0.0)))


def redundancy_bound(j, k, n, powers, problema, interferentes=None):
    """
    Menor redundancia D que garantiza SOP <= eps_sop para el espia j.

    Resuelve la cota por factores con Lambert W0. Sin interferentes queda
    kappa = ln(1/eps) * media / sigma_e^2. Devuelve inf si el espia no
    tiene ruido ni interferencia.
    """
    objetivo, otras = _medias_espia(j, k, n, powers, problema, interferentes)
    if objetivo <= 0:
        raise DominioError(f"El mensaje ({k},{n}) necesita potencia positiva para acotar su redundancia")
    eps = problema.spec.eps_sop
    sigma2 = problema.spec.sigma_e_sq
    L = otras.size
    if L == 0:
        if sigma2 == 0:
            return math.inf
        kappa = math.log(1.0 / eps) * objetivo / sigma2
    else:
        log_r = (float(np.sum(np.log(objetivo / otras))) - math.log(eps)) / L
        if sigma2 == 0:
            kappa = math.exp(log_r)
        else:
            a = sigma2 / (L * objetivo)
            kappa = lambert_w0_exp(math.log(a) + log_r) / a
    return math.log2(1.0 + kappa)


def cop_bound_log(k, n, r, order, powers, problema):
    """
    Logaritmo del lado izquierdo de la restriccion COP:
    log xi - beta sigma^2/2 - A log beta + sum log(2/lambda) - log eps_cop.

    Es cero en optimal_rate y decrece con r.
    """
    if r <= 0:
        return math.inf
    parametros = rate_params(problema, order, powers, k, n, r)
    beta = parametros.beta
    return (
        float(np.sum(np.log(2.0 / parametros.lambdas_ici)))
        - beta * parametros.sigma_norm / 2.0
        - parametros.A * math.log(beta)
        + float(np.sum(np.log(2.0 / parametros.lambdas)))
        - math.log(problema.spec.eps_cop)
    )


def optimal_rate(k, n, order, powers, problema):
    """Tasa que activa la restriccion COP, via Lambert W0."""
    parametros = rate_params(problema, order, powers, k, n)
    A = parametros.A
    log_r = (
        float(np.sum(np.log(2.0 / parametros.lambdas_ici)))
        + float(np.sum(np.log(2.0 / parametros.lambdas)))
        - math.log(problema.spec.eps_cop)
    )
    if parametros.sigma_norm == 0:
        beta = math.exp(log_r / A)
    else:
        c = parametros.sigma_norm / (2.0 * A)
        beta = lambert_w0_exp(math.log(c) + log_r / A) / c
    return math.log2(1.0 + beta)


def enst(rates, cop, redundancy):
    """
    Throughput neto efectivo seguro: min_j sum (1 - COP) [r - D_j]^+.

    redundancy tiene forma (J, mensajes); sin espias no se descuenta nada.
    """
    rates = np.asarray(rates, dtype=float)
    exito = 1.0 - np.asarray(cop, dtype=float)
    redundancy = np.asarray(redundancy, dtype=float).reshape(-1, rates.size)
    if redundancy.shape[0] == 0:
        return float(np.sum(exito * rates))
    netos = np.sum(exito * np.maximum(rates - redundancy, 0.0), axis=1)
    return float(np.min(netos))


def tasas_optimas(problema, order, powers):
    return np.array([optimal_rate(k, n, order, powers, problema) for k, n in problema.mensajes])


def probabilidades_cop(problema, order, powers, rates):
    return np.array(
        [cop_closed_form(k, n, rates[problema.indice(k, n)], order, powers, problema) for k, n in problema.mensajes]
    )


def cotas_cop_log(problema, order, powers, rates):
    return np.array(
        [cop_bound_log(k, n, rates[problema.indice(k, n)], order, powers, problema) for k, n in problema.mensajes]
    )


def cotas_redundancia(problema, powers, eves=None, order=None):
    """
    Matriz (J, mensajes) de redundancias minimas.

    Con order el espia aplica SIC: solo interfieren los mensajes de Phi.
    """
    eves = range(problema.J) if eves is None else eves
    filas = []
    for j in eves:
        filas.append([
            redundancy_bound(j, k, n, powers, problema, order.phi(k, n) if order is not None else None)
            for k, n in problema.mensajes
        ])
    return np.array(filas, dtype=float).reshape(-1, problema.n_mensajes)
