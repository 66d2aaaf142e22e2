"""
Flujos aleatorios reproducibles y muestreo de distribuciones.

Convencion de la exponencial: siempre por TASA (densidad rate*e^{-rate x}),
de modo que Exp(1/2) tiene media 2.
"""
import numpy as np

from .excepciones import DominioError

MAXIMO_64 = 2 ** 64 - 1


def _validar_u64(valor, nombre):
    if isinstance(valor, bool) or not isinstance(valor, (int, np.integer)):
        raise DominioError(f"{nombre} debe ser un entero, se recibio {valor!r}")
    if not 0 <= int(valor) <= MAXIMO_64:
        raise DominioError(f"{nombre} debe estar en [0, 2^64 - 1], se recibio {valor}")
    return int(valor)


class RngStream:
    """
    Subflujo (seed, stream_id) de un SeedSequence de numpy.

    El mismo par produce la misma secuencia en cualquier ejecucion y pares
    distintos producen secuencias independientes (spawn keys). Cada flujo
    tiene un unico duenio: no compartir entre hilos.
    """

    def __init__(self, seed, stream_id=0, ruta=()):
        self.seed = _validar_u64(seed, "seed")
        self.stream_id = _validar_u64(stream_id, "stream_id")
        self.ruta = tuple(_validar_u64(clave, "clave de ruta") for clave in ruta)
        self._generador = None

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, ruta={self.ruta})"

    @property
    def secuencia(self):
        return np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.ruta))

    @property
    def generador(self):
        if self._generador is None:
            self._generador = np.random.Generator(np.random.PCG64(self.secuencia))
        return self._generador

    def derivar(self, *claves):
        """Flujo hijo independiente identificado por claves enteras."""
        return RngStream(self.seed, self.stream_id, self.ruta + tuple(claves))


def prueba_independencia(a, b, n=100_000):
    """Correlacion muestral entre uniformes de dos flujos (debe ser ~0)."""
    ua = a.generador.random(n)
    ub = b.generador.random(n)
    return float(np.corrcoef(ua, ub)[0, 1])


def _positivo(valor, nombre):
    if not np.all(np.asarray(valor) > 0):
        raise DominioError(f"El parametro {nombre} debe ser positivo, se recibio {valor}")


def sample_complex_gaussian_vector(n, rng, size=None):
    """Vector CN(0, I_n): partes real e imaginaria N(0, 1/2)."""
    if n < 1:
        raise DominioError("La dimension del vector debe ser al menos 1")
    forma = (n,) if size is None else (*np.atleast_1d(size), n)
    gen = rng.generador
    return (gen.standard_normal(forma) + 1j * gen.standard_normal(forma)) * np.sqrt(0.5)


def sample_unit_vector(n, rng, size=None):
    """Vector unitario isotropico en la esfera compleja de dimension n."""
    v = sample_complex_gaussian_vector(n, rng, size)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def sample_exp(rate, rng, size=None):
    _positivo(rate, "rate")
    return rng.generador.exponential(1.0 / np.asarray(rate, dtype=float), size)


def sample_gamma(shape, scale, rng, size=None):
    _positivo(shape, "shape")
    _positivo(scale, "scale")
    return rng.generador.gamma(shape, scale, size)


def sample_beta(a, b, rng, size=None):
    _positivo(a, "a")
    _positivo(b, "b")
    return rng.generador.beta(a, b, size)


def sample_chisquare(dof, rng, size=None):
    _positivo(dof, "dof")
    return rng.generador.chisquare(dof, size)
