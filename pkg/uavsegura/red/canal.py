"""
Canales de pequena escala, codebook de realimentacion limitada y canales
efectivos de los espias.
"""
import math
from dataclasses import dataclass

import numpy as np

from nucleo.aleatorio import sample_complex_gaussian_vector, sample_unit_vector
from nucleo.excepciones import DominioError

TOLERANCIA_NORMA = 1e-12


@dataclass
class Codebook:
    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        normas = np.linalg.norm(self.vectors, axis=1)
        if np.any(np.abs(normas - 1.0) > TOLERANCIA_NORMA):
            raise DominioError("Los vectores del codebook deben tener norma unitaria")

    @property
    def size(self):
        return self.vectors.shape[0]

    @property
    def n_antennas(self):
        return self.vectors.shape[1]

    @property
    def feedback_bits(self):
        return math.ceil(math.log2(self.size)) if self.size > 1 else 0


def generate_codebook(n_vectores, n_antenas, rng):
    """Codebook aleatorio: vectores isotropicos independientes."""
    return Codebook(sample_unit_vector(n_antenas, rng, size=n_vectores))


def channel_direction(f, v_hat):
    """Direccion unitaria de f con la fase alineada a v_hat (v_hat^H f_tilde real >= 0)."""
    f = np.asarray(f, dtype=complex)
    norma = np.linalg.norm(f)
    if norma == 0.0:
        raise DominioError("El canal es nulo: no tiene direccion")
    producto = np.vdot(v_hat, f)
    fase = producto / abs(producto) if abs(producto) > 0 else 1.0
    return f / norma / fase


def quantization_decompose(f, v_hat, rng=None):
    """
    Descompone la direccion de f como cos(phi) v_hat + sin(phi) e.

    Devuelve (phi, e) con e unitario y ortogonal a v_hat. Si f es paralelo
    a v_hat, e se sortea isotropico en el complemento de v_hat.
    """
    v_hat = np.asarray(v_hat, dtype=complex)
    if abs(np.linalg.norm(v_hat) - 1.0) > 1e-10:
        raise DominioError("v_hat debe tener norma unitaria")
    f_tilde = channel_direction(f, v_hat)
    coseno = min(1.0, abs(np.vdot(v_hat, f_tilde)))
    resto = f_tilde - coseno * v_hat
    seno = np.linalg.norm(resto)
    if seno > 1e-14:
        return math.atan2(seno, coseno), resto / seno

    if rng is not None:
        candidato = sample_complex_gaussian_vector(v_hat.size, rng)
    else:
        candidato = np.zeros(v_hat.size, dtype=complex)
        candidato[np.argmin(np.abs(v_hat))] = 1.0
    candidato = candidato - np.vdot(v_hat, candidato) * v_hat
    return 0.0, candidato / np.linalg.norm(candidato)


@dataclass
class ChannelRealization:
    """
    Una realizacion de todo el desvanecimiento de pequena escala.

    f: (U, N_t) fading de usuarios; Q: (J, N_e, U) canales hacia espias.
    phi y e se completan al asignar clusters (dependen del codeword).
    """

    f: np.ndarray
    Q: np.ndarray
    phi: np.ndarray = None
    e: np.ndarray = None
    f_tilde: np.ndarray = None

    @property
    def n_users(self):
        return self.f.shape[0]


def draw_channels(geometria, rng):
    """f ~ CN(0, I_Nt) por usuario, Q ~ CN por espia (subflujo propio por espia)."""
    f = sample_complex_gaussian_vector(geometria.n_antennas, rng.derivar(2), size=geometria.n_users)
    Q = np.zeros((geometria.n_eves, geometria.n_eve_antennas, geometria.n_users), dtype=complex)
    for j in range(geometria.n_eves):
        columnas = sample_complex_gaussian_vector(geometria.n_eve_antennas, rng.derivar(200 + j), size=geometria.n_users)
        Q[j] = columnas.T
    return ChannelRealization(f=f, Q=Q)


@dataclass
class CanalEspia:
    w_eve: np.ndarray
    lambda_max: float
    g: np.ndarray

    def sample_g(self, rng, size=None):
        """g ~ CN(0, lambda_max) por usuario (varianza lambda_max)."""
        n = self.g.size
        return sample_complex_gaussian_vector(n, rng, size) * math.sqrt(self.lambda_max)


def eve_effective_channel(Q):
    """
    Combinador MRC del espia: autovector dominante de Q Q^H.

    Devuelve CanalEspia con g estructural g_k = w^H q_k.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=complex))
    if not np.any(Q):
        raise DominioError("La matriz de canal del espia es nula")
    autovalores, autovectores = np.linalg.eigh(Q @ Q.conj().T)
    w = autovectores[:, -1]
    pivote = w[np.argmax(np.abs(w) > 1e-12)]
    w = w * (abs(pivote) / pivote)
    return CanalEspia(w_eve=w, lambda_max=float(autovalores[-1]), g=w.conj() @ Q)


def sample_quantization_error(n_antenas, bits, rng, size):
    """
    Muestreo estructural del error de cuantizacion con codebooks de B bits.

    Para cada ensayo sortea f ~ CN(0, I), un codebook aleatorio de 2^B
    vectores, elige el codeword por distancia cordal y proyecta un
    combinador isotropico al nulo del codeword. Devuelve
    (||f||^2 sin^2(phi), |w^H e|^2, ||f||^2).
    """
    tamano = 2 ** bits
    f = sample_complex_gaussian_vector(n_antenas, rng.derivar(0), size=size)
    codebooks = sample_unit_vector(n_antenas, rng.derivar(1), size=(size, tamano))
    cosenos = np.abs(np.einsum("skn,sn->sk", codebooks.conj(), f)) ** 2
    elegido = codebooks[np.arange(size), np.argmax(cosenos, axis=1)]
    norma2 = np.sum(np.abs(f) ** 2, axis=1)
    proyeccion = np.einsum("sn,sn->s", elegido.conj(), f)
    resto = f - proyeccion[:, None] * elegido
    seno2_norma = np.sum(np.abs(resto) ** 2, axis=1)
    e = resto / np.sqrt(np.maximum(seno2_norma, 1e-300))[:, None]

    w = sample_complex_gaussian_vector(n_antenas, rng.derivar(2), size=size)
    w = w - np.einsum("sn,sn->s", elegido.conj(), w)[:, None] * elegido
    w = w / np.linalg.norm(w, axis=1, keepdims=True)
    fuga = np.abs(np.einsum("sn,sn->s", w.conj(), e)) ** 2
    return seno2_norma, fuga, norma2
