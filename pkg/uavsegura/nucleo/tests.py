import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from .aleatorio import (
    RngStream,
    prueba_independencia,
    sample_beta,
    sample_chisquare,
    sample_complex_gaussian_vector,
    sample_exp,
    sample_gamma,
)
from .especiales import PUNTO_RAMA, lambert_w0, lambert_w0_derivada, residuo_lambert
from .excepciones import DominioError


class LambertW0Tests(SimpleTestCase):

    def test_valores_exactos(self):
        self.assertEqual(lambert_w0(0.0), 0.0)
        self.assertAlmostEqual(lambert_w0(math.e), 1.0, places=14)
        self.assertEqual(lambert_w0(PUNTO_RAMA), -1.0)

    def test_uno_cumple_residuo(self):
        w = lambert_w0(1.0)
        self.assertLess(residuo_lambert(w, 1.0), 1e-10)
        self.assertAlmostEqual(w, 0.5671432904097838, places=12)

    def test_fuera_de_dominio(self):
        with self.assertRaises(DominioError):
            lambert_w0(PUNTO_RAMA - 1e-6)
        # dentro de la tolerancia se devuelve el punto de rama
        self.assertEqual(lambert_w0(PUNTO_RAMA - 5e-13), -1.0)

    def test_residuo_en_malla_aleatoria(self):
        rng = np.random.default_rng(7)
        puntos = np.concatenate([
            rng.uniform(PUNTO_RAMA, 0.0, 2500),
            rng.uniform(0.0, 10.0, 2500),
            10 ** rng.uniform(1.0, 6.0, 5000),
        ])
        for x in puntos:
            w = lambert_w0(x)
            self.assertGreaterEqual(w, -1.0)
            self.assertLessEqual(residuo_lambert(w, x), 1e-10)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=PUNTO_RAMA, max_value=1e6), st.floats(min_value=PUNTO_RAMA, max_value=1e6))
    def test_monotona(self, a, b):
        x1, x2 = sorted((a, b))
        self.assertLessEqual(lambert_w0(x1), lambert_w0(x2))

    def test_derivada_por_diferencias(self):
        for x in (0.01, 0.5, 3.0, 40.0):
            h = 1e-6 * max(1.0, x)
            numerica = (lambert_w0(x + h) - lambert_w0(x - h)) / (2 * h)
            self.assertAlmostEqual(lambert_w0_derivada(x), numerica, places=6)


class RngStreamTests(SimpleTestCase):

    def test_mismo_par_misma_secuencia(self):
        a = RngStream(123, 4).generador.random(10)
        b = RngStream(123, 4).generador.random(10)
        np.testing.assert_array_equal(a, b)

    def test_subflujos_distintos(self):
        a = RngStream(123, 4).generador.random(10)
        b = RngStream(123, 5).generador.random(10)
        self.assertFalse(np.array_equal(a, b))

    def test_independencia(self):
        n = 100_000
        corr = prueba_independencia(RngStream(9, 0), RngStream(9, 1), n)
        self.assertLess(abs(corr), 4 / math.sqrt(n))
        corr_derivado = prueba_independencia(RngStream(9, 0).derivar(1), RngStream(9, 0).derivar(2), n)
        self.assertLess(abs(corr_derivado), 4 / math.sqrt(n))

    def test_validacion_64_bits(self):
        with self.assertRaises(DominioError):
            RngStream(-1)
        with self.assertRaises(DominioError):
            RngStream(0, 2 ** 64)
        RngStream(2 ** 64 - 1, 2 ** 64 - 1)


class MuestreoTests(SimpleTestCase):

    def setUp(self):
        self.rng = RngStream(2024, 1)

    def test_gaussiana_compleja_momentos(self):
        x = sample_complex_gaussian_vector(1, self.rng, size=1_000_000)[:, 0]
        self.assertLess(abs(x.mean()), 0.005)
        self.assertAlmostEqual(np.mean(np.abs(x) ** 2), 1.0, delta=0.01)
        self.assertAlmostEqual(np.var(x.real), 0.5, delta=0.005)

    def test_gaussiana_compleja_independiente(self):
        x = sample_complex_gaussian_vector(4, self.rng, size=200_000)
        covarianza = (x.conj().T @ x) / x.shape[0]
        np.testing.assert_allclose(np.diag(covarianza).real, 1.0, atol=0.02)
        fuera = covarianza - np.diag(np.diag(covarianza))
        self.assertLess(np.max(np.abs(fuera)), 0.02)

    def test_norma_chi_cuadrado(self):
        x = sample_complex_gaussian_vector(5, self.rng, size=1_000_000)
        self.assertAlmostEqual(np.mean(np.sum(np.abs(x) ** 2, axis=1)), 5.0, delta=0.05)

    def test_medias_de_familias(self):
        self.assertAlmostEqual(sample_exp(0.5, self.rng, 1_000_000).mean(), 2.0, delta=0.02)
        self.assertAlmostEqual(sample_beta(1, 4, self.rng, 1_000_000).mean(), 0.2, delta=0.002)
        escala = 2 ** (-2 / 4)
        self.assertAlmostEqual(sample_gamma(4, escala, self.rng, 1_000_000).mean(), 4 * escala, delta=0.04 * escala)

    def test_parametros_no_positivos(self):
        with self.assertRaises(DominioError):
            sample_exp(0.0, self.rng)
        with self.assertRaises(DominioError):
            sample_gamma(1.0, -2.0, self.rng)
        with self.assertRaises(DominioError):
            sample_beta(0.0, 1.0, self.rng)

    def test_lema_beta_por_chi_cuadrado_es_exponencial(self):
        n_t = 5
        producto = sample_beta(1, n_t - 1, self.rng, 100_000) * sample_chisquare(2 * n_t, self.rng, 100_000)
        estadistico = stats.kstest(producto, stats.expon(scale=2.0).cdf).statistic
        self.assertLess(estadistico, 0.01)

    def test_gamma_del_modo_lema(self):
        n_t, bits = 5, 2
        escala = 2.0 ** (-bits / (n_t - 1))
        muestras = sample_gamma(n_t - 1, escala, self.rng, 100_000)
        self.assertLess(stats.kstest(muestras, stats.gamma(n_t - 1, scale=escala).cdf).statistic, 0.01)
