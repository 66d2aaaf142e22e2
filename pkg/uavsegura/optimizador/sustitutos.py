"""
Aproximaciones de primer orden de la restriccion de secreto.

Cada sustituto acepta escalares, arreglos de numpy o expresiones de cvxpy
en la variable de optimizacion; los puntos de expansion son numericos.
"""
import math

import numpy as np

from nucleo.especiales import lambert_w0
from nucleo.excepciones import DominioError


def _positivo(valor, nombre):
    if not np.all(np.asarray(valor) > 0):
        raise DominioError(f"El punto de expansion {nombre} debe ser positivo, se recibio {valor}")


def surrogate_Theta(p, rho, p_t, rho_t):
    """Cota convexa superior de p * rho, exacta en (p_t, rho_t)."""
    if not (np.all(np.isfinite(p_t)) and np.all(np.isfinite(rho_t))):
        raise DominioError("El punto de expansion de Theta debe ser finito")
    diferencia_t = p_t - rho_t
    return 0.25 * (p + rho) ** 2 + 0.25 * diferencia_t ** 2 - 0.5 * diferencia_t * (p - rho)


def surrogate_Gamma(D, D_t):
    """Tangente de 2^D en D_t (cota inferior)."""
    return 2.0 ** D_t * (1.0 + math.log(2.0) * (D - D_t))


def surrogate_Lambda(zeta, zeta_t):
    """Tangente de log(zeta) en zeta_t (cota superior)."""
    _positivo(zeta_t, "zeta_t")
    return np.log(zeta_t) + (zeta - zeta_t) / zeta_t


def surrogate_Psi(nu, p, nu_t, p_t, K):
    """Linealizacion de nu * p^{2K} en (nu_t, p_t)."""
    _positivo(p_t, "p_t")
    grado = 2 * K
    return nu_t * p_t ** grado + p_t ** grado * (nu - nu_t) + grado * nu_t * p_t ** (grado - 1) * (p - p_t)


def surrogate_W0_linearization(nu, nu_t):
    """Tangente de W0 en nu_t (cota superior por concavidad)."""
    _positivo(nu_t, "nu_t")
    w_t = lambert_w0(nu_t)
    return w_t + (nu - nu_t) / (nu_t + math.exp(w_t))
