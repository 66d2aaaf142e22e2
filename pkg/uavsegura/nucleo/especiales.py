"""
Funciones especiales escalares.

Solo se usa la rama principal de Lambert W. La semilla viene de
scipy.special.lambertw y se refina con Halley para garantizar un residuo
relativo de 1e-10; si no converge se recurre a un corchete con brentq.
"""
import math

import numpy as np
from scipy import optimize, special

from .excepciones import DominioError

PUNTO_RAMA = -math.exp(-1.0)
TOLERANCIA_DOMINIO = 1e-12
TOLERANCIA_RESIDUO = 1e-10
MAX_ITERACIONES_HALLEY = 50


def residuo_lambert(w, x):
    """Residuo relativo |w e^w - x| / max(1, |x|)."""
    return abs(w * math.exp(w) - x) / max(1.0, abs(x))


def _semilla(x):
    w = complex(special.lambertw(x, 0))
    if math.isfinite(w.real) and w.real >= -1.0:
        return w.real
    # asintotas: serie en el origen, logaritmos para x grande
    if x < 1.0:
        return x - x * x
    lx = math.log(x)
    return lx - math.log(lx) if lx > 1.0 else lx


def _halley(x, w):
    for _ in range(MAX_ITERACIONES_HALLEY):
        ew = math.exp(w)
        f = w * ew - x
        if w + 1.0 <= 1e-12:
            break
        denominador = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        if denominador == 0.0 or not math.isfinite(denominador):
            break
        paso = f / denominador
        w = max(w - paso, -1.0)
        if abs(paso) <= 4e-16 * (1.0 + abs(w)):
            break
    return w


def _biseccion(x):
    superior = 1.0 if x <= math.e else math.log(x)
    funcion = lambda w: w * math.exp(w) - x
    if funcion(-1.0) >= 0.0:
        return -1.0
    return optimize.brentq(funcion, -1.0, superior, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def lambert_w0(x):
    """
    Rama principal W0: devuelve w >= -1 con w e^w = x.

    Lanza DominioError si x < -1/e (con tolerancia 1e-12).
    """
    x = float(x)
    if not math.isfinite(x):
        raise DominioError(f"Lambert W0 requiere un argumento finito, se recibio {x}")
    if x < PUNTO_RAMA - TOLERANCIA_DOMINIO:
        raise DominioError(f"Lambert W0 no esta definida para x={x!r} < -1/e")
    if x <= PUNTO_RAMA:
        return -1.0
    if x == 0.0:
        return 0.0

    w = _halley(x, _semilla(x))
    if residuo_lambert(w, x) > TOLERANCIA_RESIDUO:
        w = _biseccion(x)
    return w


def lambert_w0_derivada(x):
    """W0'(x) = 1 / (x + e^{W0(x)}), valida para x > -1/e."""
    return 1.0 / (x + math.exp(lambert_w0(x)))


def lambert_w0_exp(s):
    """W0(e^s) sin desbordar: para s grande resuelve w + ln w = s."""
    s = float(s)
    if s < 700.0:
        return lambert_w0(math.exp(s))
    w = s - math.log(s)
    for _ in range(MAX_ITERACIONES_HALLEY):
        paso = (w + math.log(w) - s) / (1.0 + 1.0 / w)
        w -= paso
        if abs(paso) <= 4e-16 * w:
            break
    return w
