import json
import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from analitica.cerradas import cotas_redundancia, enst, sop_closed_form, tasas_optimas
from analitica.orden import DecodingOrder
from analitica.problema import OutageSpec
from analitica.tests import problema_pequeno
from nucleo.especiales import lambert_w0
from nucleo.excepciones import DominioError, InfactibleError, OrdenDemasiadoGrandeError

from .bcd import (
    asignacion_conjunta,
    auditar,
    complexity_profile,
    inner_loop,
    optimizar_orden,
    outer_loop,
    reparar_potencias,
    search_decoding_orders,
)
from .kkt import kkt_residual, residuo_estacionario
from .subproblema import estado_ajustado, objetivo_sustituto, solve_subproblem
from .sustitutos import (
    surrogate_Gamma,
    surrogate_Lambda,
    surrogate_Psi,
    surrogate_Theta,
    surrogate_W0_linearization,
)
from .tipos import SolverConfig, SolverReport

ORDEN = DecodingOrder(((0, 0), (1, 0), (0, 1), (1, 1)))
CONFIG_RAPIDA = SolverConfig(t_max=3, q_max=3)


def problema_un_espia(**cambios):
    datos = dict(pl_eve=[[0.2, 0.1]], lambda_max=[1.5], g_eve=[[0.8 + 0.1j, -0.3j]])
    datos.update(cambios)
    return problema_pequeno(**datos)


positivos = st.floats(min_value=1e-3, max_value=1e3)


class SustitutosTests(SimpleTestCase):

    def test_theta_exacta_en_el_punto(self):
        self.assertAlmostEqual(surrogate_Theta(0.7, 2.5, 0.7, 2.5), 0.7 * 2.5)

    @given(positivos, positivos, positivos, positivos)
    @settings(deadline=None)
    def test_theta_acota_el_producto(self, p, rho, p_t, rho_t):
        self.assertGreaterEqual(surrogate_Theta(p, rho, p_t, rho_t), p * rho * (1 - 1e-12) - 1e-9)

    @given(st.floats(min_value=0.0, max_value=20.0), st.floats(min_value=0.0, max_value=20.0))
    @settings(deadline=None)
    def test_gamma_es_tangente_inferior(self, D, D_t):
        self.assertLessEqual(surrogate_Gamma(D, D_t), 2.0 ** D * (1 + 1e-12))
        self.assertAlmostEqual(surrogate_Gamma(D_t, D_t), 2.0 ** D_t)

    @given(positivos, positivos)
    @settings(deadline=None)
    def test_lambda_es_tangente_superior(self, zeta, zeta_t):
        self.assertGreaterEqual(surrogate_Lambda(zeta, zeta_t), math.log(zeta) - 1e-12)
        self.assertAlmostEqual(surrogate_Lambda(zeta_t, zeta_t), math.log(zeta_t))

    def test_psi_en_el_punto(self):
        self.assertAlmostEqual(surrogate_Psi(0.3, 1.2, 0.3, 1.2, 2), 0.3 * 1.2 ** 4)

    def test_psi_gradiente(self):
        h = 1e-6
        derivada = (surrogate_Psi(0.3, 1.2 + h, 0.3, 1.2, 2) - surrogate_Psi(0.3, 1.2 - h, 0.3, 1.2, 2)) / (2 * h)
        self.assertAlmostEqual(derivada, 4 * 0.3 * 1.2 ** 3, places=6)

    @given(st.floats(min_value=0.0, max_value=1e4), st.floats(min_value=1e-6, max_value=1e4))
    @settings(deadline=None)
    def test_w0_tangente_superior(self, nu, nu_t):
        self.assertGreaterEqual(surrogate_W0_linearization(nu, nu_t), lambert_w0(nu) - 1e-9)

    def test_w0_exacta_en_el_punto(self):
        self.assertAlmostEqual(surrogate_W0_linearization(3.0, 3.0), lambert_w0(3.0))

    def test_puntos_invalidos(self):
        with self.assertRaises(DominioError):
            surrogate_Lambda(1.0, 0.0)
        with self.assertRaises(DominioError):
            surrogate_W0_linearization(1.0, -1.0)
        with self.assertRaises(DominioError):
            surrogate_Theta(1.0, 1.0, math.inf, 1.0)


class SolverConfigTests(SimpleTestCase):

    def test_valores_por_defecto(self):
        config = SolverConfig()
        self.assertEqual((config.t_max, config.q_max), (20, 20))
        self.assertEqual(config.solver, "CLARABEL")

    def test_topes_invalidos(self):
        with self.assertRaises(DominioError):
            SolverConfig(t_max=0)
        with self.assertRaises(DominioError):
            SolverConfig(delta_i=0.0)

    def test_reporte_en_json(self):
        reporte = SolverReport(iteraciones_externas=2, traza_objetivo=[[1.0, 1.5]], residuo_kkt=0.01)
        datos = json.loads(reporte.como_texto())
        self.assertEqual(datos["iteraciones_externas"], 2)
        self.assertEqual(datos["traza_objetivo"], [[1.0, 1.5]])


class EstadoAjustadoTests(SimpleTestCase):

    def setUp(self):
        self.problema = problema_un_espia()
        self.potencias = np.array([0.6, 0.3, 0.5, 0.4])

    def test_theta_es_la_redundancia(self):
        estado = estado_ajustado(self.problema, 0, self.potencias)
        np.testing.assert_allclose(estado.theta, 2.0 ** estado.redundancy - 1.0)
        np.testing.assert_allclose(estado.redundancy, cotas_redundancia(self.problema, self.potencias, eves=[0])[0])

    def test_cadena_ajustada(self):
        estado = estado_ajustado(self.problema, 0, self.potencias)
        medias = self.potencias * self.problema.pl_eve_mensaje(0) * self.problema.lambda_max[0]
        L = self.problema.n_mensajes - 1
        sigma2 = self.problema.spec.sigma_e_sq
        np.testing.assert_allclose(estado.theta, L * medias / sigma2 * estado.rho, rtol=1e-8)
        np.testing.assert_allclose(estado.nu, sigma2 * estado.vartheta / L, rtol=1e-10)
        np.testing.assert_allclose(estado.rho * np.exp(estado.rho), estado.nu, rtol=1e-9)

    def test_sin_ruido_rho_es_vartheta(self):
        problema = problema_un_espia(spec=OutageSpec(sigma_m_sq=0.05, sigma_e_sq=0.0))
        estado = estado_ajustado(problema, 0, self.potencias)
        np.testing.assert_allclose(estado.rho, estado.vartheta)

    def test_potencia_nula(self):
        with self.assertRaises(DominioError):
            estado_ajustado(self.problema, 0, [0.6, 0.0, 0.5, 0.4])


class SubproblemaTests(SimpleTestCase):

    def setUp(self):
        self.problema = problema_un_espia()
        self.potencias = reparar_potencias(self.problema, ORDEN, np.full(4, 0.5), eves=[0])
        self.tasas = tasas_optimas(self.problema, ORDEN, self.potencias)

    def test_no_empeora_el_sustituto(self):
        estado = estado_ajustado(self.problema, 0, self.potencias)
        inicial = objetivo_sustituto(self.problema, ORDEN, self.tasas, self.potencias, estado.redundancy, self.potencias)
        nuevo, valor = solve_subproblem(estado, self.tasas, ORDEN, self.problema, 0, CONFIG_RAPIDA, self.potencias)
        self.assertGreaterEqual(valor, inicial - 1e-5 * max(1.0, abs(inicial)))
        self.assertEqual(nuevo.iteracion, 1)

    def test_respeta_el_presupuesto(self):
        estado = estado_ajustado(self.problema, 0, self.potencias)
        nuevo, _ = solve_subproblem(estado, self.tasas, ORDEN, self.problema, 0, CONFIG_RAPIDA, self.potencias)
        usado = nuevo.powers.reshape(2, 2).sum(axis=1)
        self.assertTrue(np.all(usado <= self.problema.budgets + 1e-9))
        self.assertTrue(np.all(nuevo.powers >= CONFIG_RAPIDA.potencia_minima * 0.999))


class BucleInternoTests(SimpleTestCase):

    def test_objetivo_no_decrece(self):
        problema = problema_un_espia()
        potencias = reparar_potencias(problema, ORDEN, np.full(4, 0.5), eves=[0])
        tasas = tasas_optimas(problema, ORDEN, potencias)
        reporte = SolverReport()
        estado, valor = inner_loop(problema, ORDEN, 0, estado_ajustado(problema, 0, potencias), tasas, CONFIG_RAPIDA, reporte)
        traza = estado.traza
        for anterior, siguiente in zip(traza, traza[1:]):
            self.assertGreaterEqual(siguiente, anterior - 1e-9 * max(1.0, abs(anterior)))
        self.assertEqual(valor, traza[-1])
        self.assertLessEqual(reporte.iteraciones_internas[0], CONFIG_RAPIDA.t_max)
        self.assertEqual(auditar(problema, ORDEN, 0, estado.powers, tasas, estado.redundancy, CONFIG_RAPIDA), [])


class ReparacionTests(SimpleTestCase):

    def test_espia_sin_ruido_ni_interferencia(self):
        problema = problema_pequeno(
            spec=OutageSpec(sigma_m_sq=0.05, sigma_e_sq=0.0),
            budgets=[1.0], pl_uav=[1.0], ganancias=[1.3], pl_eve=[[0.2]], lambda_max=[1.5], g_eve=[[0.8]],
            parts=1,
        )
        with self.assertRaises(InfactibleError):
            reparar_potencias(problema, DecodingOrder.natural(1, 1), [1.0], eves=[0])

    def test_punto_factible_no_cambia(self):
        problema = problema_un_espia()
        potencias = reparar_potencias(problema, ORDEN, np.full(4, 0.5), eves=[0])
        np.testing.assert_array_equal(reparar_potencias(problema, ORDEN, potencias, eves=[0]), potencias)

    def test_resultado_factible(self):
        problema = problema_un_espia()
        potencias = reparar_potencias(problema, ORDEN, np.full(4, 0.5), eves=[0])
        tasas = tasas_optimas(problema, ORDEN, potencias)
        redundancia = cotas_redundancia(problema, potencias, eves=[0])[0]
        self.assertTrue(np.all(tasas > redundancia))
        self.assertTrue(np.all(potencias <= 0.5))


class BucleExternoTests(SimpleTestCase):

    def setUp(self):
        self.problema = problema_un_espia()
        self.solucion = outer_loop(self.problema, ORDEN, 0, CONFIG_RAPIDA)

    def test_invariantes_de_la_solucion(self):
        solucion = self.solucion
        usado = solucion.powers.reshape(2, 2).sum(axis=1)
        self.assertTrue(np.all(usado <= self.problema.budgets + 1e-9))
        self.assertTrue(np.all(solucion.rates > solucion.redundancy - 1e-9))
        self.assertTrue(np.all(solucion.redundancy >= 0))
        self.assertGreaterEqual(solucion.enst, 0.0)

    def test_sop_dentro_de_la_tolerancia(self):
        for k, n in self.problema.mensajes:
            i = self.problema.indice(k, n)
            sop = sop_closed_form(0, k, n, self.solucion.redundancy[i], self.solucion.powers, self.problema)
            self.assertLessEqual(sop, self.problema.spec.eps_sop + 1e-9)

    def test_reporte(self):
        reporte = self.solucion.report
        self.assertLessEqual(reporte.iteraciones_externas, CONFIG_RAPIDA.q_max)
        self.assertEqual(len(reporte.traza_tasas), reporte.iteraciones_externas)
        self.assertIn("convergio", json.loads(reporte.como_texto()))


class AsignacionTests(SimpleTestCase):

    def setUp(self):
        self.problema = problema_pequeno()
        self.solucion = optimizar_orden(self.problema, ORDEN, CONFIG_RAPIDA)

    def test_una_asignacion_segura_frente_a_todos_los_espias(self):
        problema, solucion = self.problema, self.solucion
        self.assertEqual(solucion.redundancy.shape, (2, 4))
        for j in range(problema.J):
            self.assertTrue(np.all(solucion.rates > solucion.redundancy[j]))
            for k, n in problema.mensajes:
                i = problema.indice(k, n)
                sop = sop_closed_form(j, k, n, solucion.redundancy[j, i], solucion.powers, problema)
                self.assertLessEqual(sop, problema.spec.eps_sop + 1e-9)

    def test_objetivo_es_el_enst_real(self):
        solucion = self.solucion
        self.assertAlmostEqual(solucion.objective, enst(solucion.rates, solucion.cop, solucion.redundancy))
        netos = [enst(solucion.rates, solucion.cop, solucion.redundancy[j][None, :]) for j in range(2)]
        self.assertEqual(solucion.eve_critico, int(np.argmin(netos)))
        self.assertAlmostEqual(solucion.objective, min(netos))

    def test_no_peor_que_cada_candidato_por_espia(self):
        self.assertEqual(len(self.solucion.por_espia), 2)
        for propia in self.solucion.por_espia:
            try:
                conjunta = asignacion_conjunta(self.problema, ORDEN, propia.powers, CONFIG_RAPIDA)
            except InfactibleError:
                continue
            self.assertGreaterEqual(self.solucion.objective, conjunta.objective - 1e-12)

    def test_conjunta_repara_para_todos_los_espias(self):
        conjunta = asignacion_conjunta(self.problema, ORDEN, np.full(4, 0.5), CONFIG_RAPIDA)
        self.assertTrue(np.all(conjunta.rates > conjunta.redundancy))
        self.assertTrue(np.all(conjunta.powers <= 0.5 + 1e-12))

    def test_reporte_con_residuo_kkt(self):
        residuo = self.solucion.report.residuo_kkt
        self.assertIsNotNone(residuo)
        self.assertTrue(math.isfinite(residuo))
        self.assertGreaterEqual(residuo, 0.0)

    def test_sin_espias_reparte_por_igual(self):
        problema = problema_pequeno(pl_eve=np.zeros((0, 2)), lambda_max=[], g_eve=np.zeros((0, 2)))
        solucion = optimizar_orden(problema, ORDEN, CONFIG_RAPIDA)
        np.testing.assert_allclose(solucion.powers, 0.5)
        self.assertEqual(solucion.redundancy.shape, (0, 4))
        self.assertGreater(solucion.objective, 0.0)


class BusquedaOrdenTests(SimpleTestCase):

    def test_elige_el_mejor_candidato(self):
        problema = problema_un_espia()
        config = SolverConfig(t_max=2, q_max=2)
        mejor = search_decoding_orders(problema, config)
        self.assertEqual(mejor.report.ordenes_evaluados, 6)
        self.assertEqual(mejor.objective, max(valor for _, valor in mejor.candidatos))
        natural = optimizar_orden(problema, DecodingOrder.natural(2), config)
        self.assertGreaterEqual(mejor.objective, natural.objective - 1e-12)

    def test_guarda_la_solucion_de_cada_orden(self):
        problema = problema_un_espia()
        por_orden = {}
        mejor = search_decoding_orders(problema, SolverConfig(t_max=2, q_max=2), resultados=por_orden)
        self.assertEqual(set(por_orden), {orden for orden, _ in mejor.candidatos})
        self.assertIs(por_orden[str(mejor.order)], mejor)

    def test_demasiados_usuarios(self):
        problema = problema_pequeno(
            budgets=np.ones(5), pl_uav=np.ones(5), ganancias=np.ones(5),
            pl_eve=np.full((2, 5), 0.1), g_eve=np.ones((2, 5)),
        )
        with self.assertRaises(OrdenDemasiadoGrandeError):
            search_decoding_orders(problema, CONFIG_RAPIDA)


class KktTests(SimpleTestCase):

    def test_residuo_sin_activas(self):
        self.assertAlmostEqual(residuo_estacionario([3.0, 4.0], []), 5.0)

    def test_residuo_con_multiplicador(self):
        self.assertAlmostEqual(residuo_estacionario([1.0, 0.0], [[2.0, 0.0]]), 0.0)

    def test_multiplicador_negativo_no_vale(self):
        self.assertAlmostEqual(residuo_estacionario([1.0, 0.0], [[-1.0, 0.0]]), 1.0)

    def test_residuo_de_una_solucion(self):
        problema = problema_un_espia()
        solucion = optimizar_orden(problema, ORDEN, CONFIG_RAPIDA)
        residuo = kkt_residual(solucion, problema)
        self.assertTrue(math.isfinite(residuo))
        self.assertGreaterEqual(residuo, 0.0)

    def test_punto_infactible(self):
        problema = problema_un_espia()
        solucion = optimizar_orden(problema, ORDEN, CONFIG_RAPIDA)
        solucion.redundancy[0] = np.zeros(4)
        with self.assertRaises(DominioError):
            kkt_residual(solucion, problema)


class ComplejidadTests(SimpleTestCase):

    def test_conteos(self):
        perfil = complexity_profile(2, 1)
        self.assertEqual(perfil["ordenes"], 6)
        self.assertEqual(perfil["dimension"], 20)
        self.assertEqual(perfil["costo_busqueda"], 52)
        self.assertAlmostEqual(perfil["costo_por_iteracion"], 9.5 ** 3 * 6)

    def test_cuatro_usuarios(self):
        self.assertEqual(complexity_profile(4, 2)["ordenes"], 2520)

    def test_argumentos_invalidos(self):
        with self.assertRaises(DominioError):
            complexity_profile(0, 1)
