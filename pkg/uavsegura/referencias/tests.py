import math

import numpy as np
from django.test import SimpleTestCase

from analitica.cerradas import enst, redundancy_bound
from analitica.orden import DecodingOrder
from analitica.problema import OutageSpec
from analitica.tests import problema_pequeno
from nucleo.aleatorio import RngStream
from nucleo.excepciones import DominioError
from optimizador.bcd import optimizar_orden
from optimizador.tipos import SolverConfig
from red.escenario import ParametrosRed, generar_escenario

from .esquemas import (
    BaselineKind,
    evaluar_csit_perfecta,
    evaluar_esquema,
    evaluar_esquemas,
    eve_sic_variant,
    orden_pd_noma,
    pd_noma_solution,
    tdma_enst,
    tdma_rate,
)

CONFIG_RAPIDA = SolverConfig(t_max=2, q_max=2)
ORDEN = DecodingOrder(((0, 0), (1, 0), (0, 1), (1, 1)))


class BaselineKindTests(SimpleTestCase):

    def test_enumeracion(self):
        self.assertEqual(
            set(BaselineKind.values),
            {"RSMA", "RSMA-SSIC", "TDMA", "PD-NOMA", "RSMA-perfect-CSIT", "RSMA-eve-SIC"},
        )

    def test_desde_texto(self):
        self.assertIs(BaselineKind("PD-NOMA"), BaselineKind.PD_NOMA)


class TdmaTests(SimpleTestCase):

    def test_potencia_nula(self):
        self.assertEqual(tdma_rate(0, [0.0, 1.0], problema_pequeno()), 0.0)

    def test_un_usuario_es_capacidad_punto_a_punto(self):
        problema = problema_pequeno(
            budgets=[1.0], pl_uav=[1.0], ganancias=[1.3], pl_eve=[[0.2], [0.05]], g_eve=[[0.8], [0.2]]
        )
        self.assertAlmostEqual(tdma_rate(0, [1.0], problema), math.log2(1 + 1.3 / 0.05))

    def test_dos_usuarios_a_mano(self):
        problema = problema_pequeno()
        self.assertAlmostEqual(tdma_rate(1, [1.0, 1.0], problema), 0.5 * math.log2(1 + 0.5 * 0.4 / 0.05))

    def test_alpha_se_reduce_a_la_mitad(self):
        uno = problema_pequeno(budgets=[1.0], pl_uav=[1.0], ganancias=[1.3], pl_eve=[[0.2], [0.05]], g_eve=[[0.8], [0.2]])
        dos = problema_pequeno(ganancias=[1.3, 1.3])
        self.assertAlmostEqual(tdma_rate(0, [1.0, 1.0], dos), 0.5 * tdma_rate(0, [1.0], uno))

    def test_enst_sin_espias(self):
        problema = problema_pequeno(pl_eve=np.zeros((0, 2)), lambda_max=[], g_eve=np.zeros((0, 2)))
        esperado = sum(tdma_rate(k, problema.budgets, problema) for k in range(2))
        self.assertAlmostEqual(tdma_enst(problema), esperado)

    def test_enst_con_espias_descuenta(self):
        problema = problema_pequeno()
        total = sum(tdma_rate(k, problema.budgets, problema) for k in range(2))
        self.assertLessEqual(tdma_enst(problema), total)
        self.assertGreaterEqual(tdma_enst(problema), 0.0)


class PdNomaTests(SimpleTestCase):

    def test_orden_por_ganancia(self):
        problema = problema_pequeno(parts=1)
        self.assertEqual(orden_pd_noma(problema).sequence, ((0, 0), (1, 0)))

    def test_empate_por_indice(self):
        problema = problema_pequeno(parts=1, ganancias=[1.0, 2.0], pl_uav=[1.0, 0.5])
        self.assertEqual(orden_pd_noma(problema).sequence, ((0, 0), (1, 0)))

    def test_ganancia_mayor_primero(self):
        problema = problema_pequeno(parts=1, ganancias=[0.1, 2.0])
        self.assertEqual(orden_pd_noma(problema).sequence, ((1, 0), (0, 0)))

    def test_necesita_una_parte(self):
        with self.assertRaises(DominioError):
            pd_noma_solution(problema_pequeno(), CONFIG_RAPIDA)

    def test_solucion_respeta_el_presupuesto(self):
        problema = problema_pequeno(parts=1)
        solucion = pd_noma_solution(problema, CONFIG_RAPIDA)
        self.assertTrue(np.all(solucion.powers <= problema.budgets + 1e-9))
        self.assertGreaterEqual(solucion.objective, 0.0)


class EveSicTests(SimpleTestCase):

    def setUp(self):
        self.problema = problema_pequeno()
        self.solucion = optimizar_orden(self.problema, ORDEN, CONFIG_RAPIDA)

    def test_no_supera_al_espia_sin_sic(self):
        _, valor = eve_sic_variant(self.solucion, self.problema)
        self.assertLessEqual(valor, self.solucion.objective + 1e-12)

    def test_primer_mensaje_sin_cambios(self):
        redundancia, _ = eve_sic_variant(self.solucion, self.problema)
        np.testing.assert_allclose(redundancia[:, 0], self.solucion.redundancy[:, 0], rtol=0, atol=1e-12)

    def test_ultimo_mensaje_sin_interferencia(self):
        redundancia, _ = eve_sic_variant(self.solucion, self.problema)
        sin_interferentes = redundancy_bound(0, 1, 1, self.solucion.powers, self.problema, interferentes=())
        self.assertAlmostEqual(redundancia[0, 3], max(self.solucion.redundancy[0, 3], sin_interferentes))

    def test_usa_la_asignacion_conjunta(self):
        redundancia, valor = eve_sic_variant(self.solucion, self.problema)
        self.assertEqual(redundancia.shape, self.solucion.redundancy.shape)
        self.assertAlmostEqual(valor, enst(self.solucion.rates, self.solucion.cop, redundancia))

    def test_sin_espias(self):
        problema = problema_pequeno(pl_eve=np.zeros((0, 2)), lambda_max=[], g_eve=np.zeros((0, 2)))
        solucion = optimizar_orden(problema, ORDEN, CONFIG_RAPIDA)
        redundancia, valor = eve_sic_variant(solucion, problema)
        self.assertEqual(redundancia.shape, (0, 4))
        self.assertEqual(valor, solucion.objective)


class CsitPerfectaTests(SimpleTestCase):

    def test_evaluacion_finita(self):
        problema = problema_pequeno(pl_eve=[[0.2, 0.1]], lambda_max=[1.5], g_eve=[[0.8, 0.3]])
        valor = evaluar_csit_perfecta(problema, CONFIG_RAPIDA)
        self.assertTrue(math.isfinite(valor))
        self.assertGreaterEqual(valor, 0.0)


class EvaluacionTests(SimpleTestCase):

    def setUp(self):
        parametros = ParametrosRed(n_users=4, users_per_cluster=2, n_eves=1, n_eve_antennas=1)
        self.escenario = generar_escenario(parametros, RngStream(7, 0))
        self.spec = OutageSpec(sigma_m_sq=1e-11, sigma_e_sq=1e-11)

    def test_un_valor_por_esquema(self):
        totales = evaluar_esquemas(["TDMA", "PD-NOMA"], self.escenario, self.spec, 0.5, CONFIG_RAPIDA)
        self.assertEqual(set(totales), {BaselineKind.TDMA, BaselineKind.PD_NOMA})
        for valor in totales.values():
            self.assertGreaterEqual(valor, 0.0)

    def test_tdma_suma_sobre_clusters(self):
        valor = evaluar_esquema(BaselineKind.TDMA, self.escenario, self.spec, 0.5)
        self.assertGreaterEqual(valor, 0.0)
        self.assertTrue(math.isfinite(valor))

    def test_esquema_desconocido(self):
        with self.assertRaises(ValueError):
            evaluar_esquemas(["SDMA"], self.escenario, self.spec, 0.5, CONFIG_RAPIDA)

    def test_rsma_domina_sus_variantes(self):
        kinds = ["RSMA", "RSMA-SSIC", "RSMA-eve-SIC"]
        totales = evaluar_esquemas(kinds, self.escenario, self.spec, 0.5, CONFIG_RAPIDA)
        self.assertGreaterEqual(totales[BaselineKind.RSMA], totales[BaselineKind.RSMA_SSIC] - 1e-12)
        self.assertLessEqual(totales[BaselineKind.RSMA_EVE_SIC], totales[BaselineKind.RSMA] + 1e-12)

    def test_ssic_reutiliza_el_orden_natural(self):
        junto = evaluar_esquemas(["RSMA", "RSMA-SSIC"], self.escenario, self.spec, 0.5, CONFIG_RAPIDA)
        solo = evaluar_esquemas(["RSMA-SSIC"], self.escenario, self.spec, 0.5, CONFIG_RAPIDA)
        self.assertAlmostEqual(junto[BaselineKind.RSMA_SSIC], solo[BaselineKind.RSMA_SSIC], places=9)
