import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from nucleo.aleatorio import RngStream
from nucleo.excepciones import DominioError
from red.escenario import ParametrosRed, generar_escenario

from .cerradas import (
    cop_bound_log,
    cop_closed_form,
    cotas_redundancia,
    enst,
    optimal_rate,
    redundancy_bound,
    sinr_eve,
    sinr_uav,
    sop_closed_form,
    sop_upper_bound,
)
from .montecarlo import Estimacion, estimate_cop_mc, estimate_sop_mc
from .orden import DecodingOrder, enumerate_orders, numero_de_ordenes
from .problema import OutageSpec, ProblemaCluster, construir_problema


def problema_pequeno(**cambios):
    """Cluster de dos usuarios con un interferente ICI y dos espias."""
    datos = dict(
        spec=OutageSpec(eps_cop=0.1, eps_sop=0.1, sigma_m_sq=0.05, sigma_e_sq=0.02, feedback_bits=1),
        budgets=[1.0, 1.0],
        pl_uav=[1.0, 0.5],
        ganancias=[1.3, 0.4],
        pl_eve=[[0.2, 0.1], [0.05, 0.3]],
        lambda_max=[1.5, 0.7],
        g_eve=[[0.8 + 0.1j, -0.3j], [0.2, 1.1 - 0.4j]],
        n_antennas=4,
        n_clusters=2,
        n_eve_antennas=2,
        ici_budgets=[1.0],
        ici_pl=[0.3],
        ici_fuga=[0.2],
    )
    datos.update(cambios)
    return ProblemaCluster(**datos)


POTENCIAS = np.array([0.6, 0.3, 0.5, 0.4])
ORDEN = DecodingOrder(((0, 0), (1, 0), (0, 1), (1, 1)))


class OrdenTests(SimpleTestCase):

    def test_cantidad_de_ordenes(self):
        self.assertEqual(len(enumerate_orders(1)), 1)
        self.assertEqual(len(enumerate_orders(2)), 6)
        self.assertEqual(len(enumerate_orders(3)), 90)
        self.assertEqual(numero_de_ordenes(4), 2520)
        self.assertEqual(len(enumerate_orders(3, partes=1)), 6)

    def test_ordenes_distintos_y_validos(self):
        ordenes = enumerate_orders(3)
        self.assertEqual(len({o.sequence for o in ordenes}), 90)
        for orden in ordenes:
            self.assertLess(orden.position(0, 0), orden.position(0, 1))

    def test_phi_son_los_siguientes(self):
        self.assertEqual(ORDEN.phi(1, 0), ((0, 1), (1, 1)))
        self.assertEqual(ORDEN.phi(1, 1), ())

    def test_parte_dos_antes_que_uno(self):
        with self.assertRaises(DominioError):
            DecodingOrder(((0, 1), (0, 0)))

    def test_permutacion_incompleta(self):
        with self.assertRaises(DominioError):
            DecodingOrder(((0, 0), (1, 0), (0, 1)))

    def test_orden_natural(self):
        self.assertEqual(DecodingOrder.natural(2).sequence, ((0, 0), (0, 1), (1, 0), (1, 1)))


class OutageSpecTests(SimpleTestCase):

    def test_probabilidades_abiertas(self):
        for eps in (0.0, 1.0, -0.2):
            with self.assertRaises(DominioError):
                OutageSpec(eps_cop=eps)

    def test_ruido_negativo(self):
        with self.assertRaises(DominioError):
            OutageSpec(sigma_e_sq=-1.0)


class SinrTests(SimpleTestCase):

    def setUp(self):
        self.problema = problema_pequeno()

    def test_expansion_a_mano(self):
        pr = self.problema
        # (1,0) sufre a (0,1) y (1,1)
        senal = 0.5 * 0.5 * 0.4
        interferencia = 0.3 * 1.0 * 1.3 + 0.4 * 0.5 * 0.4 + 1.0 * 0.3 * 0.2 + 0.05
        self.assertAlmostEqual(sinr_uav(1, 0, ORDEN, POTENCIAS, pr), senal / interferencia, places=14)

    def test_potencia_nula(self):
        potencias = POTENCIAS.copy()
        potencias[0] = 0.0
        self.assertEqual(sinr_uav(0, 0, ORDEN, potencias, self.problema), 0.0)
        self.assertEqual(sinr_eve(0, 0, 0, potencias, self.problema), 0.0)

    def test_ultimo_sin_interferencia(self):
        problema = problema_pequeno(spec=OutageSpec(sigma_m_sq=0.0), perfect_csit=True)
        self.assertEqual(sinr_uav(1, 1, ORDEN, POTENCIAS, problema), math.inf)

    def test_espia_con_un_mensaje(self):
        problema = problema_pequeno(
            budgets=[1.0], pl_uav=[1.0], ganancias=[1.0], pl_eve=[[0.2]], lambda_max=[1.5], g_eve=[[0.5j]], parts=1
        )
        self.assertAlmostEqual(sinr_eve(0, 0, 0, [0.7], problema), 0.7 * 0.2 * 0.25 / 0.02)

    def test_espia_expansion_directa(self):
        pr = self.problema
        g2 = np.repeat(np.abs(pr.g_eve[1]) ** 2, 2)
        recibida = POTENCIAS * np.repeat(pr.pl_eve[1], 2) * g2
        esperado = recibida[2] / (recibida.sum() - recibida[2] + 0.02)
        self.assertAlmostEqual(sinr_eve(1, 1, 0, POTENCIAS, pr), esperado, places=14)


class CopCerradaTests(SimpleTestCase):

    def setUp(self):
        self.problema = problema_pequeno()

    def test_tasa_nula(self):
        self.assertEqual(cop_closed_form(0, 0, 0.0, ORDEN, POTENCIAS, self.problema), 0.0)

    def test_sin_interferentes_ni_ruido(self):
        problema = problema_pequeno(spec=OutageSpec(sigma_m_sq=0.0), perfect_csit=True)
        self.assertEqual(cop_closed_form(1, 1, 3.0, ORDEN, POTENCIAS, problema), 0.0)

    def test_monotona_en_la_tasa(self):
        valores = [cop_closed_form(0, 0, r, ORDEN, POTENCIAS, self.problema) for r in np.linspace(0, 8, 40)]
        self.assertTrue(all(b >= a for a, b in zip(valores, valores[1:])))
        self.assertTrue(all(0.0 <= v <= 1.0 for v in valores))

    def test_mensaje_sin_potencia(self):
        potencias = POTENCIAS.copy()
        potencias[3] = 0.0
        self.assertEqual(cop_closed_form(1, 1, 1.0, ORDEN, potencias, self.problema), 1.0)

    def test_formula_explicita(self):
        pr = self.problema
        r = 1.5
        beta = 2 ** r - 1
        objetivo = 0.6 * 1.0
        exito = math.exp(-beta * 0.05 / objetivo / 2)
        for potencia, pl in ((0.5, 0.5), (0.3, 1.0), (0.4, 0.5)):
            exito /= 1 + beta * potencia * pl / objetivo
        delta = 2 ** (-1 / 3)
        exito /= 1 + beta * 1.0 * 0.3 * delta / (2 * objetivo)
        self.assertAlmostEqual(cop_closed_form(0, 0, r, ORDEN, POTENCIAS, pr), 1 - exito, places=13)


class TasaOptimaTests(SimpleTestCase):

    def setUp(self):
        self.problema = problema_pequeno()

    def test_residuo_de_la_raiz(self):
        for k, n in self.problema.mensajes:
            r = optimal_rate(k, n, ORDEN, POTENCIAS, self.problema)
            self.assertGreater(r, 0.0)
            self.assertLess(abs(cop_bound_log(k, n, r, ORDEN, POTENCIAS, self.problema)), 1e-8)

    def test_phi_vacio(self):
        problema = problema_pequeno(perfect_csit=True)
        r = optimal_rate(1, 1, ORDEN, POTENCIAS, problema)
        self.assertTrue(math.isfinite(r) and r > 0)

    def test_limite_sin_ruido(self):
        problema = problema_pequeno(spec=OutageSpec(sigma_m_sq=0.0))
        r = optimal_rate(0, 1, ORDEN, POTENCIAS, problema)
        self.assertLess(abs(cop_bound_log(0, 1, r, ORDEN, POTENCIAS, problema)), 1e-10)

    def test_decrece_con_eps_cop(self):
        tasas = [optimal_rate(0, 0, ORDEN, POTENCIAS, self.problema.con_spec(eps_cop=e)) for e in (0.01, 0.05, 0.1, 0.3)]
        self.assertTrue(all(b < a for a, b in zip(tasas, tasas[1:])))

    def test_cota_decrece_con_la_tasa(self):
        valores = [cop_bound_log(0, 0, r, ORDEN, POTENCIAS, self.problema) for r in (0.5, 1.0, 2.0, 4.0)]
        self.assertTrue(all(b < a for a, b in zip(valores, valores[1:])))


class SopCerradaTests(SimpleTestCase):

    def setUp(self):
        self.problema = problema_pequeno()

    def test_redundancia_nula(self):
        self.assertEqual(sop_closed_form(0, 0, 0, 0.0, POTENCIAS, self.problema), 1.0)

    def test_redundancia_grande(self):
        self.assertLess(sop_closed_form(0, 0, 0, 60.0, POTENCIAS, self.problema), 1e-12)

    def test_monotona_en_redundancia(self):
        valores = [sop_closed_form(1, 1, 0, D, POTENCIAS, self.problema) for D in np.linspace(0, 10, 50)]
        self.assertTrue(all(b <= a for a, b in zip(valores, valores[1:])))

    def test_mensaje_unico_producto_vacio(self):
        problema = problema_pequeno(
            budgets=[1.0], pl_uav=[1.0], ganancias=[1.0], pl_eve=[[0.2]], lambda_max=[1.5], g_eve=[[1.0]], parts=1
        )
        media = 0.7 * 0.2 * 1.5
        kappa = 2 ** 2.0 - 1
        self.assertAlmostEqual(sop_closed_form(0, 0, 0, 2.0, [0.7], problema), math.exp(-kappa * 0.02 / media), places=14)


class RedundanciaTests(SimpleTestCase):

    def setUp(self):
        self.problema = problema_pequeno()

    def test_residuo_en_la_cota(self):
        for j in range(2):
            for k, n in self.problema.mensajes:
                D = redundancy_bound(j, k, n, POTENCIAS, self.problema)
                cota = sop_upper_bound(j, k, n, D, POTENCIAS, self.problema)
                self.assertAlmostEqual(cota / 0.1, 1.0, delta=1e-8)

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.floats(min_value=1e-3, max_value=1.0), min_size=4, max_size=4),
        st.floats(min_value=1e-3, max_value=0.5),
        st.floats(min_value=1e-6, max_value=1.0),
    )
    def test_cota_garantiza_sop(self, potencias, eps, sigma):
        problema = problema_pequeno(spec=OutageSpec(eps_sop=eps, sigma_e_sq=sigma))
        for j in range(2):
            for k, n in problema.mensajes:
                D = redundancy_bound(j, k, n, potencias, problema)
                self.assertLessEqual(sop_closed_form(j, k, n, D, potencias, problema), eps * (1 + 1e-9))

    def test_decrece_con_eps_sop(self):
        cotas = [redundancy_bound(0, 0, 1, POTENCIAS, self.problema.con_spec(eps_sop=e)) for e in (0.01, 0.05, 0.1, 0.4)]
        self.assertTrue(all(b < a for a, b in zip(cotas, cotas[1:])))

    def test_sin_interferentes(self):
        problema = problema_pequeno(
            budgets=[1.0], pl_uav=[1.0], ganancias=[1.0], pl_eve=[[0.2]], lambda_max=[1.5], g_eve=[[1.0]], parts=1
        )
        media = 0.7 * 0.2 * 1.5
        esperado = math.log2(1 + math.log(1 / 0.1) * media / 0.02)
        self.assertAlmostEqual(redundancy_bound(0, 0, 0, [0.7], problema), esperado, places=12)
        self.assertAlmostEqual(sop_closed_form(0, 0, 0, esperado, [0.7], problema), 0.1, places=12)

    def test_sin_ruido(self):
        problema = problema_pequeno(spec=OutageSpec(sigma_e_sq=0.0))
        D = redundancy_bound(0, 0, 0, POTENCIAS, problema)
        self.assertAlmostEqual(sop_upper_bound(0, 0, 0, D, POTENCIAS, problema), 0.1, places=10)

    def test_matriz_de_cotas(self):
        cotas = cotas_redundancia(self.problema, POTENCIAS)
        self.assertEqual(cotas.shape, (2, 4))
        self.assertEqual(cotas[1, 2], redundancy_bound(1, 1, 0, POTENCIAS, self.problema))

    def test_potencia_nula(self):
        potencias = POTENCIAS.copy()
        potencias[0] = 0.0
        with self.assertRaises(DominioError):
            redundancy_bound(0, 0, 0, potencias, self.problema)


class EnstTests(SimpleTestCase):

    def test_cop_total(self):
        self.assertEqual(enst([1.0, 2.0], [1.0, 1.0], [[0.1, 0.2]]), 0.0)

    def test_redundancia_mayor_que_tasa(self):
        self.assertEqual(enst([1.0, 2.0], [0.1, 0.2], [[1.5, 2.5]]), 0.0)

    def test_minimo_sobre_espias(self):
        rates = np.array([2.0, 1.5, 3.0])
        cop = np.array([0.1, 0.05, 0.2])
        D = np.array([[0.5, 0.4, 1.0], [1.2, 0.1, 0.2]])
        por_espia = [float(np.sum((1 - cop) * np.maximum(rates - D[j], 0))) for j in range(2)]
        self.assertAlmostEqual(enst(rates, cop, D), min(por_espia))

    def test_sin_espias(self):
        self.assertAlmostEqual(enst([1.0, 2.0], [0.5, 0.0], np.zeros((0, 2))), 2.5)


class MonteCarloTests(SimpleTestCase):

    def setUp(self):
        self.problema = problema_pequeno()

    def test_tasa_nula_sin_cortes(self):
        estimacion = estimate_cop_mc(0, 0, 0.0, ORDEN, POTENCIAS, self.problema, 5000, RngStream(1, 0))
        self.assertEqual(estimacion.valor, 0.0)
        self.assertEqual(estimacion.ensayos, 5000)

    def test_reproducible(self):
        a = estimate_cop_mc(1, 0, 1.0, ORDEN, POTENCIAS, self.problema, 20_000, RngStream(9, 3))
        b = estimate_cop_mc(1, 0, 1.0, ORDEN, POTENCIAS, self.problema, 20_000, RngStream(9, 3))
        self.assertEqual(a, b)

    def test_ensayos_invalidos(self):
        with self.assertRaises(DominioError):
            estimate_sop_mc(0, 0, 0, 1.0, POTENCIAS, self.problema, 0, RngStream(1, 0))

    def test_error_estandar(self):
        estimacion = Estimacion.desde_conteo(25, 100)
        self.assertAlmostEqual(estimacion.error_estandar, math.sqrt(0.25 * 0.75 / 100))
        self.assertAlmostEqual(estimacion.z(0.3), 0.05 / estimacion.error_estandar)

    def test_cop_coincide_con_el_oraculo(self):
        rng = RngStream(2024, 0)
        for c, (k, n) in enumerate(self.problema.mensajes):
            r = 0.8 * optimal_rate(k, n, ORDEN, POTENCIAS, self.problema)
            cerrada = cop_closed_form(k, n, r, ORDEN, POTENCIAS, self.problema)
            estimacion = estimate_cop_mc(k, n, r, ORDEN, POTENCIAS, self.problema, 200_000, rng.derivar(c))
            self.assertLess(estimacion.z(cerrada), 4.0, (k, n, cerrada, estimacion))

    def test_sop_coincide_con_el_oraculo(self):
        rng = RngStream(2024, 1)
        for j in range(2):
            for c, (k, n) in enumerate(self.problema.mensajes):
                D = 0.5 * redundancy_bound(j, k, n, POTENCIAS, self.problema)
                cerrada = sop_closed_form(j, k, n, D, POTENCIAS, self.problema)
                estimacion = estimate_sop_mc(j, k, n, D, POTENCIAS, self.problema, 200_000, rng.derivar(j, c))
                self.assertLess(estimacion.z(cerrada), 4.0, (j, k, n, cerrada, estimacion))

    def test_sop_con_sic_del_espia(self):
        phi = ORDEN.phi(0, 0)
        D = 0.5 * redundancy_bound(0, 0, 0, POTENCIAS, self.problema, phi)
        cerrada = sop_closed_form(0, 0, 0, D, POTENCIAS, self.problema, phi)
        estimacion = estimate_sop_mc(0, 0, 0, D, POTENCIAS, self.problema, 200_000, RngStream(5, 5), interferentes=phi)
        self.assertLess(estimacion.z(cerrada), 4.0)

    def test_modo_estructural_en_rango(self):
        estimacion = estimate_cop_mc(0, 0, 1.0, ORDEN, POTENCIAS, self.problema, 10_000, RngStream(3, 0), modo="estructural")
        self.assertTrue(0.0 <= estimacion.valor <= 1.0)
        sop = estimate_sop_mc(0, 0, 0, 1.0, POTENCIAS, self.problema, 10_000, RngStream(3, 1), modo="estructural")
        self.assertTrue(0.0 <= sop.valor <= 1.0)

    def test_modo_desconocido(self):
        with self.assertRaises(DominioError):
            estimate_cop_mc(0, 0, 1.0, ORDEN, POTENCIAS, self.problema, 10, RngStream(3, 0), modo="otro")


class ConstruccionTests(SimpleTestCase):

    def test_problema_desde_escenario(self):
        parametros = ParametrosRed(n_users=8, n_clusters=2, users_per_cluster=2, n_eves=2)
        escenario = generar_escenario(parametros, RngStream(7, 0))
        spec = OutageSpec()
        for m in escenario.plan.active_clusters:
            problema = construir_problema(escenario, m, spec, 0.1)
            self.assertEqual(problema.K, len(escenario.plan.clusters[m]))
            self.assertEqual(problema.J, 2)
            self.assertEqual(problema.n_interferentes, sum(escenario.plan.cluster_sizes) - problema.K)
            self.assertTrue(np.all(problema.ici_fuga >= 0))
            self.assertEqual(problema.sin_ici().n_interferentes, 0)
