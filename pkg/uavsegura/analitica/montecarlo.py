"""
Oraculos Monte Carlo de COP y SOP.

Modo "lema": cada termino se sortea con la ley que usan las formas
cerradas (ganancia Beta(1, N_t-1) * chi^2_{2N_t}, fuga ICI
Beta(1, N_t-2) * Gamma(N_t-1, 2^{-B/(N_t-1)}), |g|^2 exponencial de media
lambda_max), independiente por mensaje.

Modo "estructural": se sortean los vectores crudos (f ~ CN(0, I), codebooks
aleatorios de B bits, Q nueva por ensayo) y las partes de un mismo usuario
comparten desvanecimiento. Solo sirve de diagnostico: la ganancia CN(0, I)
tiene media 1 y la ley del lema media 2.

Los ensayos se procesan en bloques de tamano fijo, con un subflujo por
bloque, para que el conteo no dependa de la planificacion.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from nucleo.ajustes import parametro
from nucleo.aleatorio import (
    sample_beta,
    sample_chisquare,
    sample_complex_gaussian_vector,
    sample_exp,
    sample_gamma,
    sample_unit_vector,
)
from nucleo.excepciones import DominioError
from red.canal import sample_quantization_error

logger = logging.getLogger(__name__)

MODOS = ("lema", "estructural")


@dataclass(frozen=True)
class Estimacion:
    valor: float
    error_estandar: float
    ensayos: int

    @classmethod
    def desde_conteo(cls, eventos, ensayos):
        valor = eventos / ensayos
        return cls(valor=valor, error_estandar=math.sqrt(valor * (1.0 - valor) / ensayos), ensayos=ensayos)

    def z(self, referencia):
        """Desvio respecto de una referencia en errores estandar."""
        if self.error_estandar == 0.0:
            return 0.0 if math.isclose(self.valor, referencia, abs_tol=1e-12) else math.inf
        return abs(self.valor - referencia) / self.error_estandar


def _bloques(trials):
    tamano = int(parametro("TAMANO_BLOQUE_MC"))
    for c, inicio in enumerate(range(0, trials, tamano)):
        yield c, min(tamano, trials - inicio)


def _validar(trials, modo):
    if trials < 1:
        raise DominioError("Se necesita al menos un ensayo Monte Carlo")
    if modo not in MODOS:
        raise DominioError(f"Modo Monte Carlo desconocido: {modo!r}")


def _ganancia_lema(n_antenas, rng, forma):
    return sample_beta(1, n_antenas - 1, rng.derivar(0), forma) * sample_chisquare(2 * n_antenas, rng.derivar(1), forma)


def _fuga_lema(n_antenas, bits, rng, forma):
    escala = 2.0 ** (-bits / (n_antenas - 1))
    gamma = sample_gamma(n_antenas - 1, escala, rng.derivar(3), forma)
    if n_antenas - 2 == 0:
        return gamma
    return sample_beta(1, n_antenas - 2, rng.derivar(2), forma) * gamma


def _muestras_cop(problema, order, p, k, n, rng, tamano, modo):
    """Muestras de (senal, interferencia + ruido) en el UAV."""
    nt = problema.n_antennas
    phi = order.phi(k, n)
    if modo == "lema":
        senal = p[problema.indice(k, n)] * problema.pl_uav[k] * _ganancia_lema(nt, rng.derivar(10), tamano)
        interferencia = np.zeros(tamano)
        for orden_phi, (kk, nn) in enumerate(phi):
            ganancia = _ganancia_lema(nt, rng.derivar(20 + orden_phi), tamano)
            interferencia += p[problema.indice(kk, nn)] * problema.pl_uav[kk] * ganancia
        for i in range(problema.n_interferentes):
            fuga = _fuga_lema(nt, problema.spec.feedback_bits, rng.derivar(1000 + i), tamano)
            interferencia += problema.ici_budgets[i] * problema.ici_pl[i] * fuga
    else:
        w = sample_unit_vector(nt, rng.derivar(10), tamano)
        f = sample_complex_gaussian_vector(nt, rng.derivar(11), (tamano, problema.K))
        ganancias = np.abs(np.einsum("sn,skn->sk", w.conj(), f)) ** 2
        recibida = p.reshape(problema.K, problema.parts)[None, :, :] * (problema.pl_uav[None, :] * ganancias)[:, :, None]
        senal = recibida[:, k, n]
        interferencia = np.zeros(tamano)
        for kk, nn in phi:
            interferencia += recibida[:, kk, nn]
        for i in range(problema.n_interferentes):
            seno2_norma, fuga, _ = sample_quantization_error(nt, problema.spec.feedback_bits, rng.derivar(1000 + i), tamano)
            interferencia += problema.ici_budgets[i] * problema.ici_pl[i] * seno2_norma * fuga
    return senal, interferencia + problema.spec.sigma_m_sq


def estimate_cop_mc(k, n, r, order, powers, problema, trials, rng, modo="lema"):
    """Frecuencia empirica de {r > log2(1 + rho)}."""
    _validar(trials, modo)
    p = np.asarray(powers, dtype=float)
    beta = 2.0 ** r - 1.0
    eventos = 0
    for c, tamano in _bloques(trials):
        senal, ruido = _muestras_cop(problema, order, p, k, n, rng.derivar(c), tamano, modo)
        eventos += int(np.count_nonzero(senal < beta * ruido))
    estimacion = Estimacion.desde_conteo(eventos, trials)
    logger.debug("COP MC (%d,%d) r=%.4f: %.5f +- %.5f", k, n, r, estimacion.valor, estimacion.error_estandar)
    return estimacion


def _ganancias_espia(problema, j, rng, tamano, modo):
    """|g|^2 por mensaje, forma (tamano, mensajes)."""
    if modo == "lema":
        return sample_exp(1.0 / problema.lambda_max[j], rng, (tamano, problema.n_mensajes))
    Q = sample_complex_gaussian_vector(problema.n_eve_antennas, rng, (tamano, problema.K))
    Q = np.swapaxes(Q, 1, 2)
    autovalores, autovectores = np.linalg.eigh(Q @ np.conj(np.swapaxes(Q, 1, 2)))
    w = autovectores[:, :, -1]
    g = np.einsum("sa,sak->sk", w.conj(), Q)
    return np.repeat(np.abs(g) ** 2, problema.parts, axis=1)


def estimate_sop_mc(j, k, n, D, powers, problema, trials, rng, modo="lema", interferentes=None):
    """Frecuencia empirica de {D <= log2(1 + mu)} para el espia j."""
    _validar(trials, modo)
    p = np.asarray(powers, dtype=float)
    kappa = 2.0 ** D - 1.0
    i = problema.indice(k, n)
    mascara = np.zeros(problema.n_mensajes, dtype=bool)
    if interferentes is None:
        mascara[:] = True
        mascara[i] = False
    else:
        mascara[[problema.indice(kk, nn) for kk, nn in interferentes]] = True
    eventos = 0
    for c, tamano in _bloques(trials):
        ganancias = _ganancias_espia(problema, j, rng.derivar(c), tamano, modo)
        recibida = ganancias * (p * problema.pl_eve_mensaje(j))[None, :]
        ruido = recibida[:, mascara].sum(axis=1) + problema.spec.sigma_e_sq
        eventos += int(np.count_nonzero(recibida[:, i] >= kappa * ruido))
    estimacion = Estimacion.desde_conteo(eventos, trials)
    logger.debug("SOP MC espia %d (%d,%d) D=%.4f: %.5f +- %.5f", j, k, n, D, estimacion.valor, estimacion.error_estandar)
    return estimacion
