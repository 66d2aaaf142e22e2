import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from nucleo.aleatorio import RngStream, sample_complex_gaussian_vector, sample_unit_vector
from nucleo.excepciones import DominioError, InfactibleError

from .agrupamiento import assign_clusters, build_cluster_plan, zf_beamformer
from .canal import (
    ChannelRealization,
    Codebook,
    channel_direction,
    eve_effective_channel,
    generate_codebook,
    quantization_decompose,
    sample_quantization_error,
)
from .escenario import ParametrosRed, generar_escenario
from .geometria import (
    NetworkGeometry,
    PathLossModel,
    exportar_geometria,
    importar_geometria,
    path_loss,
    path_loss_exponent,
)


class PerdidasTests(SimpleTestCase):

    def test_lambda1_nulo_da_exponente_los(self):
        modelo = PathLossModel(2.0, 3.5, 0.0, 0.16)
        self.assertAlmostEqual(path_loss_exponent(0.7, modelo), 2.0)

    def test_limite_alta_elevacion(self):
        modelo = PathLossModel(2.0, 3.5, 9.61, 0.16)
        self.assertAlmostEqual(path_loss_exponent(500.0, modelo), 3.5, places=9)

    def test_valor_en_cuarenta_y_cinco_grados(self):
        modelo = PathLossModel(2.0, 3.5, 9.61, 0.16)
        esperado = (2.0 - 3.5) / (1 + 9.61 * math.exp(0.16 * (math.pi / 4 - 9.61))) + 3.5
        self.assertAlmostEqual(path_loss_exponent(math.pi / 4, modelo), esperado, places=14)

    def test_perdida_de_trayecto(self):
        self.assertEqual(path_loss(1.0, 3.1), 1.0)
        self.assertAlmostEqual(path_loss(100.0, 2.0), 1e-4)
        self.assertAlmostEqual(path_loss(800.0, 3.5), 800.0 ** -3.5)
        with self.assertRaises(DominioError):
            path_loss(0.0, 2.0)

    def test_los_no_supera_nlos(self):
        with self.assertRaises(DominioError):
            PathLossModel(4.0, 3.0)


class GeometriaTests(SimpleTestCase):

    def setUp(self):
        self.parametros = ParametrosRed(coverage_radius=300.0, n_users=12, n_eves=3)
        self.escenario = generar_escenario(self.parametros, RngStream(5, 0))

    def test_posiciones_dentro_de_cobertura(self):
        geometria = self.escenario.geometria
        radios = np.concatenate([geometria.ground_distances, np.linalg.norm(geometria.eve_positions, axis=1)])
        self.assertTrue(np.all(radios >= 1.0))
        self.assertTrue(np.all(radios <= 300.0))
        self.assertTrue(np.all(geometria.eve_distances >= 1.0))

    def test_espias_anidados(self):
        dos = generar_escenario(self.parametros.con(n_eves=2), RngStream(5, 0))
        np.testing.assert_array_equal(dos.geometria.eve_positions, self.escenario.geometria.eve_positions[:2])
        np.testing.assert_array_equal(dos.canales.Q, self.escenario.canales.Q[:2])

    def test_instantanea_ida_y_vuelta(self):
        texto = exportar_geometria(self.escenario.geometria)
        copia = importar_geometria(texto)
        np.testing.assert_array_equal(copia.user_positions, self.escenario.geometria.user_positions)
        self.assertEqual(copia.path_loss_model, self.escenario.geometria.path_loss_model)

    def test_usuario_fuera_de_radio(self):
        with self.assertRaises(DominioError):
            NetworkGeometry(100.0, 50.0, [[60.0, 0.0]], [[1.0, 1.0]], 1, 4, 1)

    def test_suma_de_clusters(self):
        plan = self.escenario.plan
        self.assertEqual(sum(plan.cluster_sizes) + len(plan.unscheduled), self.parametros.n_users)
        self.assertTrue(all(tamano <= self.parametros.users_per_cluster for tamano in plan.cluster_sizes))


class CuantizacionTests(SimpleTestCase):

    def setUp(self):
        self.rng = RngStream(11, 0)

    def test_paralelo(self):
        v = sample_unit_vector(4, self.rng)
        phi, e = quantization_decompose(3j * v, v, self.rng)
        self.assertEqual(phi, 0.0)
        self.assertLess(abs(np.vdot(v, e)), 1e-10)
        self.assertAlmostEqual(np.linalg.norm(e), 1.0)

    def test_ortogonal(self):
        v = np.array([1, 0, 0], dtype=complex)
        f = np.array([0, 2, 0], dtype=complex)
        phi, e = quantization_decompose(f, v)
        self.assertAlmostEqual(phi, math.pi / 2)
        np.testing.assert_allclose(np.abs(e), [0, 1, 0], atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=2, max_value=6))
    def test_reconstruccion(self, semilla, n_t):
        rng = RngStream(semilla, 1)
        f = sample_complex_gaussian_vector(n_t, rng)
        v = sample_unit_vector(n_t, rng)
        phi, e = quantization_decompose(f, v, rng)
        f_tilde = channel_direction(f, v)
        self.assertLess(np.linalg.norm(math.cos(phi) * v + math.sin(phi) * e - f_tilde), 1e-10)
        self.assertLess(abs(np.vdot(v, e)), 1e-10)

    def test_canal_nulo(self):
        with self.assertRaises(DominioError):
            quantization_decompose(np.zeros(3), np.array([1, 0, 0], dtype=complex))

    def test_ley_beta_de_la_fuga(self):
        n_t, bits = 5, 2
        _, fuga, _ = sample_quantization_error(n_t, bits, self.rng, 100_000)
        self.assertLess(stats.kstest(fuga, stats.beta(1, n_t - 2).cdf).statistic, 0.01)

    def test_seno_cuadrado_cdf_de_celda(self):
        n_t, bits = 4, 2
        seno2_norma, _, norma2 = sample_quantization_error(n_t, bits, self.rng, 100_000)
        seno2 = seno2_norma / norma2
        # CDF exacta de sin^2 con 2^B codewords independientes: 1 - (1 - x^{N_t-1})^{2^B}
        cdf = lambda x: 1 - (1 - np.clip(x, 0, 1) ** (n_t - 1)) ** (2 ** bits)
        self.assertLess(stats.kstest(seno2, cdf).statistic, 0.02)

    def test_momento_exacto_de_la_celda(self):
        # norma y direccion de f son independientes: E = N_t * 2^B * B(2^B, N_t/(N_t-1))
        for n_t, bits in ((4, 2), (5, 2), (5, 1)):
            tamano = 2 ** bits
            seno2_norma, _, _ = sample_quantization_error(n_t, bits, self.rng.derivar(n_t, bits), 100_000)
            exacta = n_t * tamano * special.beta(tamano, n_t / (n_t - 1))
            self.assertAlmostEqual(seno2_norma.mean() / exacta, 1.0, delta=0.01)

    def test_ley_gamma_aproxima_por_debajo(self):
        # la ley Gamma(N_t-1, 2^{-B/(N_t-1)}) de las formas cerradas subestima la media de la celda
        n_t, bits = 5, 2
        escala = 2.0 ** (-bits / (n_t - 1))
        seno2_norma, _, _ = sample_quantization_error(n_t, bits, self.rng, 100_000)
        self.assertGreater(seno2_norma.mean(), 1.05 * (n_t - 1) * escala)
        distancia = stats.kstest(seno2_norma, stats.gamma(n_t - 1, scale=escala).cdf).statistic
        self.assertGreater(distancia, 0.02)
        self.assertLess(distancia, 0.12)


class CombinadoresTests(SimpleTestCase):

    def setUp(self):
        self.rng = RngStream(3, 0)

    def test_un_cluster(self):
        codebook = generate_codebook(1, 4, self.rng)
        np.testing.assert_allclose(zf_beamformer(codebook, 0), codebook.vectors[0])

    def test_codebook_ortonormal(self):
        codebook = Codebook(np.eye(4, dtype=complex)[:3])
        for m in range(3):
            np.testing.assert_allclose(np.abs(zf_beamformer(codebook, m)), np.abs(codebook.vectors[m]), atol=1e-12)

    def test_propiedad_zf(self):
        codebook = generate_codebook(3, 5, self.rng)
        for m in range(3):
            w = zf_beamformer(codebook, m)
            self.assertAlmostEqual(np.linalg.norm(w), 1.0)
            for l in range(3):
                if l != m:
                    self.assertLess(abs(np.vdot(w, codebook.vectors[l])), 1e-10)

    def test_zf_infactible(self):
        codebook = generate_codebook(3, 2, self.rng)
        with self.assertRaises(InfactibleError):
            zf_beamformer(codebook, 0)

    def test_ley_beta_del_producto_interno(self):
        n_t = 5
        w = sample_unit_vector(n_t, self.rng, 100_000)
        f = sample_unit_vector(n_t, self.rng.derivar(1), 100_000)
        producto = np.abs(np.sum(w.conj() * f, axis=1)) ** 2
        self.assertLess(stats.kstest(producto, stats.beta(1, n_t - 1).cdf).statistic, 0.01)


class AsignacionTests(SimpleTestCase):

    def setUp(self):
        self.rng = RngStream(17, 0)
        self.codebook = generate_codebook(4, 4, self.rng)
        self.f = sample_complex_gaussian_vector(4, self.rng, size=30)

    def test_un_codeword(self):
        codebook = generate_codebook(1, 4, self.rng)
        np.testing.assert_array_equal(assign_clusters(self.f, codebook), 0)

    def test_canal_igual_a_codeword(self):
        f = 2.5 * self.codebook.vectors[2][None, :]
        self.assertEqual(assign_clusters(f, self.codebook)[0], 2)

    def test_fuerza_bruta(self):
        asignacion = assign_clusters(ChannelRealization(f=self.f, Q=np.zeros((0, 1, 30))), self.codebook)
        for u in range(30):
            direccion = self.f[u] / np.linalg.norm(self.f[u])
            mejor = max(range(4), key=lambda m: abs(np.vdot(direccion, self.codebook.vectors[m])) ** 2)
            self.assertEqual(asignacion[u], mejor)

    def test_equivariante_a_permutaciones(self):
        permutacion = np.array([2, 0, 3, 1])
        permutado = Codebook(self.codebook.vectors[permutacion])
        original = assign_clusters(self.f, self.codebook)
        nueva = assign_clusters(self.f, permutado)
        inversa = np.argsort(permutacion)
        np.testing.assert_array_equal(nueva, inversa[original])

    def test_plan_planifica_mejores_cosenos(self):
        canales = ChannelRealization(f=self.f, Q=sample_complex_gaussian_vector(2, self.rng, size=(1, 30)).transpose(0, 2, 1))
        plan = build_cluster_plan(canales, self.codebook, users_per_cluster=2)
        for m, miembros in enumerate(plan.clusters):
            asignados = np.flatnonzero(plan.assignment == m)
            if len(asignados):
                mejores = np.sort(asignados[np.argsort(canales.phi[asignados], kind="stable")][:2])
                np.testing.assert_array_equal(miembros, mejores)


class EspiaTests(SimpleTestCase):

    def test_una_antena(self):
        q = np.array([[1 + 1j, 2.0, -1j]])
        canal = eve_effective_channel(q)
        self.assertAlmostEqual(canal.lambda_max, float(np.sum(np.abs(q) ** 2)))
        self.assertAlmostEqual(abs(canal.w_eve[0]), 1.0)

    def test_columnas_ortogonales(self):
        Q = np.array([[2.0, 0.0], [0.0, 2.0], [0.0, 0.0]], dtype=complex)
        self.assertAlmostEqual(eve_effective_channel(Q).lambda_max, 4.0)

    def test_iteracion_de_potencia(self):
        rng = RngStream(23, 0)
        Q = sample_complex_gaussian_vector(3, rng, size=4)
        G = Q @ Q.conj().T
        x = np.ones(4, dtype=complex)
        for _ in range(2000):
            x = G @ x
            x = x / np.linalg.norm(x)
        oraculo = float(np.real(np.vdot(x, G @ x)))
        self.assertAlmostEqual(eve_effective_channel(Q).lambda_max, oraculo, delta=1e-8 * oraculo)

    def test_matriz_nula(self):
        with self.assertRaises(DominioError):
            eve_effective_channel(np.zeros((2, 2)))

    def test_g_muestreado_tiene_varianza_lambda_max(self):
        canal = eve_effective_channel(np.array([[1.0, 1.0], [1.0, -1.0]]))
        g = canal.sample_g(RngStream(1, 2), size=200_000)
        self.assertAlmostEqual(np.mean(np.abs(g) ** 2), canal.lambda_max, delta=0.02 * canal.lambda_max)
