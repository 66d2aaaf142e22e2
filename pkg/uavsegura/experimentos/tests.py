import csv
import io
import math
import tempfile
from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from analitica.cerradas import cop_closed_form
from nucleo.excepciones import DominioError
from referencias.esquemas import BaselineKind

from .barridos import PARAMETROS, PRESETS, SweepSpec, obtener_barrido
from .configuracion import (
    cargar_configuracion,
    configuracion_desde_dict,
    dbw_a_lineal,
    leer_configuracion,
    presets_disponibles,
)
from .ejecucion import (
    FilaResultado,
    FilaTraza,
    ejecutar_ensayo,
    media_y_error,
    run_experiment,
    trazas_convergencia,
)
from .forms import GeometriaForm, OutageForm, PerdidasForm
from .salida import COLUMNAS, emit_csv, emitir_trazas_csv
from .tendencias import fraccion_dominante, verificar_tendencias, violaciones_de_monotonia
from .validacion import validate_closed_forms, veredicto

TOML_CHICO = """
[geometria]
clusters = 2
usuarios = 4
usuarios_por_cluster = 2
espias = 1
antenas = 4
antenas_espia = 1

[outage]
potencia_dbw = 0.0

[solver]
t_max = 2
q_max = 2

[experimento]
ensayos = 2
semilla = 11
esquemas = ["TDMA"]
"""


def config_chica():
    return leer_configuracion(TOML_CHICO)


def mensajes(exc):
    return " ".join(exc.exception.messages)


class FormulariosTests(SimpleTestCase):

    def test_valores_por_defecto(self):
        form = GeometriaForm({})
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data["usuarios"], 8)

    def test_antenas_insuficientes(self):
        form = GeometriaForm({"clusters": 3, "antenas": 2})
        self.assertFalse(form.is_valid())
        self.assertIn("__all__", form.errors)

    def test_probabilidad_fuera_de_rango(self):
        for valor in (0.0, 1.0, 1.5):
            form = OutageForm({"eps_cop": valor})
            self.assertFalse(form.is_valid())
            self.assertIn("eps_cop", form.errors)

    def test_radio_de_cobertura_minimo(self):
        form = GeometriaForm({"radio_cobertura": 1.0})
        self.assertFalse(form.is_valid())
        self.assertEqual(form.errors["radio_cobertura"], ["El radio de cobertura debe superar 1 m"])

    def test_mas_usuarios_por_cluster_que_usuarios(self):
        form = GeometriaForm({"usuarios": 3, "usuarios_por_cluster": 4})
        self.assertFalse(form.is_valid())
        self.assertIn("__all__", form.errors)

    def test_exponentes_invertidos(self):
        form = PerdidasForm({"exponente_los": 4.0, "exponente_nlos": 3.0})
        self.assertFalse(form.is_valid())
        self.assertEqual(form.non_field_errors(), ["El exponente LoS no puede superar al NLoS"])


class ConfiguracionTests(SimpleTestCase):

    def test_dbw(self):
        self.assertAlmostEqual(dbw_a_lineal(0.0), 1.0)
        self.assertAlmostEqual(dbw_a_lineal(10.0), 10.0)
        self.assertAlmostEqual(dbw_a_lineal(-30.0), 1e-3)

    def test_configuracion_vacia_usa_valores_por_defecto(self):
        config = configuracion_desde_dict({})
        self.assertEqual(config.red.n_users, 8)
        self.assertEqual(config.spec.eps_cop, 0.1)
        self.assertEqual(config.ensayos, 50)
        self.assertEqual(set(config.esquemas), set(BaselineKind.values))

    def test_presupuesto_por_usuario(self):
        config = config_chica().con(potencia_dbw=10.0)
        self.assertAlmostEqual(config.budget_por_usuario, 10.0 / 4)

    def test_bits_de_realimentacion(self):
        self.assertEqual(configuracion_desde_dict({"geometria": {"clusters": 3, "antenas": 4}}).spec.feedback_bits, 2)
        self.assertEqual(configuracion_desde_dict({"geometria": {"clusters": 2}}).spec.feedback_bits, 1)
        self.assertEqual(configuracion_desde_dict({"geometria": {"clusters": 1}}).spec.feedback_bits, 0)

    def test_clave_desconocida(self):
        with self.assertRaises(ValidationError) as exc:
            leer_configuracion("[outage]\neps_cp = 0.2\n")
        self.assertIn("Clave desconocida: outage.eps_cp", mensajes(exc))

    def test_seccion_desconocida(self):
        with self.assertRaises(ValidationError) as exc:
            leer_configuracion("[geometrias]\nclusters = 2\n")
        self.assertIn("Seccion desconocida: [geometrias]", mensajes(exc))

    def test_error_lleva_seccion_y_campo(self):
        with self.assertRaises(ValidationError) as exc:
            leer_configuracion("[outage]\neps_sop = 2.0\n")
        self.assertIn("outage.eps_sop", mensajes(exc))

    def test_toml_roto(self):
        with self.assertRaises(ValidationError) as exc:
            leer_configuracion("[outage\n", origen="roto.toml")
        self.assertIn("roto.toml", mensajes(exc))

    def test_esquema_desconocido(self):
        with self.assertRaises(ValidationError):
            leer_configuracion('[experimento]\nesquemas = ["OMA"]\n')

    def test_presets_incluidos(self):
        self.assertIn("escritorio", presets_disponibles())
        self.assertIn("articulo", presets_disponibles())
        config = cargar_configuracion("escritorio")
        self.assertEqual((config.red.n_clusters, config.red.n_users, config.red.n_eves), (2, 8, 2))
        articulo = cargar_configuracion("articulo")
        self.assertEqual(articulo.red.coverage_radius, 800.0)
        self.assertEqual(articulo.ensayos, 150)

    def test_archivo_inexistente(self):
        with self.assertRaises(ValidationError):
            cargar_configuracion("no_existe.toml")


class BarridosTests(SimpleTestCase):

    def test_parametro_desconocido(self):
        with self.assertRaises(DominioError):
            SweepSpec("altura", (1.0,))

    def test_valores_vacios(self):
        with self.assertRaises(DominioError):
            SweepSpec("potencia", ())

    def test_cada_eje_tiene_preset(self):
        self.assertEqual({barrido.parametro for barrido in PRESETS.values()}, set(PARAMETROS))
        self.assertTrue(PRESETS["convergencia"].trazas)

    def test_barrido_desconocido(self):
        with self.assertRaises(DominioError):
            obtener_barrido("altura")

    def test_aplicar(self):
        config = config_chica()
        self.assertEqual(SweepSpec("potencia", (5.0,)).aplicar(config, 5.0).potencia_dbw, 5.0)
        self.assertEqual(SweepSpec("eps_cop", (0.2,)).aplicar(config, 0.2).spec.eps_cop, 0.2)
        self.assertEqual(SweepSpec("eps_sop", (0.3,)).aplicar(config, 0.3).spec.eps_sop, 0.3)
        self.assertEqual(SweepSpec("espias", (3,)).aplicar(config, 3).red.n_eves, 3)
        self.assertEqual(SweepSpec("antenas_espia", (4,)).aplicar(config, 4).red.n_eve_antennas, 4)
        # la configuracion original no cambia
        self.assertEqual(config.red.n_eves, 1)

    def test_esquemas(self):
        config = config_chica()
        self.assertEqual(SweepSpec("potencia", (0.0,)).esquemas_para(config), (BaselineKind.TDMA,))
        barrido = PRESETS["espias"].con_esquemas(["TDMA"])
        self.assertEqual(barrido.esquemas_para(config), (BaselineKind.TDMA,))


class EjecucionTests(SimpleTestCase):

    def test_media_y_error(self):
        media, error = media_y_error([1.0, 2.0, 3.0])
        self.assertAlmostEqual(media, 2.0)
        self.assertAlmostEqual(error, 1.0 / math.sqrt(3))
        self.assertEqual(media_y_error([4.0]), (4.0, 0.0))

    def test_filas_por_valor(self):
        barrido = SweepSpec("potencia", (-10.0, 0.0, 10.0), (BaselineKind.TDMA,))
        resultado = run_experiment(config_chica(), barrido)
        self.assertEqual(len(resultado.filas), 3)
        self.assertEqual([fila.valor for fila in resultado.filas], [-10.0, 0.0, 10.0])
        for fila in resultado.filas:
            self.assertEqual(fila.esquema, "TDMA")
            self.assertEqual(fila.ensayos, 2)
            self.assertGreaterEqual(fila.enst_media, 0.0)

    def test_determinista(self):
        barrido = SweepSpec("potencia", (0.0,), (BaselineKind.TDMA,))
        config = config_chica().con(ensayos=1)
        self.assertEqual(run_experiment(config, barrido).filas, run_experiment(config, barrido).filas)

    def test_hilos_no_cambian_el_resultado(self):
        barrido = SweepSpec("potencia", (0.0,), (BaselineKind.TDMA,))
        config = config_chica().con(ensayos=4)
        self.assertEqual(run_experiment(config, barrido, hilos=1).filas, run_experiment(config, barrido, hilos=3).filas)

    def test_semilla_distinta_cambia_el_resultado(self):
        barrido = SweepSpec("potencia", (0.0,), (BaselineKind.TDMA,))
        config = config_chica()
        a = run_experiment(config, barrido).filas[0].enst_media
        b = run_experiment(config.con(semilla=12), barrido).filas[0].enst_media
        self.assertNotEqual(a, b)

    def test_trazas_de_convergencia(self):
        trazas = trazas_convergencia(config_chica(), 0.0)
        for traza in trazas:
            self.assertIn(traza.bucle, ("interno", "externo"))
            self.assertEqual(traza.valor, 0.0)
        externas = [traza.iteracion for traza in trazas if traza.bucle == "externo"]
        self.assertEqual(externas, sorted(externas))


class SalidaTests(SimpleTestCase):

    def setUp(self):
        self.directorio = tempfile.TemporaryDirectory()
        self.ruta = Path(self.directorio.name) / "tabla.csv"

    def tearDown(self):
        self.directorio.cleanup()

    def tabla(self):
        return [
            FilaResultado(esquema, "potencia", valor, 0.1 * valor + 1.0, 1.0 / 3.0, 50)
            for esquema in ("RSMA", "TDMA")
            for valor in (-10.0, 0.0, 10.0)
        ]

    def test_tabla_vacia_no_crea_archivo(self):
        with self.assertRaises(DominioError):
            emit_csv([], self.ruta)
        self.assertFalse(self.ruta.exists())

    def test_filas_y_cabecera(self):
        emit_csv(self.tabla(), self.ruta)
        filas = list(csv.reader(io.StringIO(self.ruta.read_text(encoding="utf-8"), newline="")))
        self.assertEqual(tuple(filas[0]), COLUMNAS)
        self.assertEqual(len(filas), 7)

    def test_relectura(self):
        tabla = self.tabla()
        emit_csv(tabla, self.ruta)
        with open(self.ruta, newline="", encoding="utf-8") as archivo:
            leidas = list(csv.DictReader(archivo))
        for fila, leida in zip(tabla, leidas):
            self.assertEqual(leida["scheme"], fila.esquema)
            self.assertEqual(float(leida["value"]), fila.valor)
            self.assertEqual(float(leida["enst_mean"]), fila.enst_media)
            self.assertEqual(float(leida["enst_stderr"]), fila.enst_error)
            self.assertEqual(int(leida["trials"]), fila.ensayos)

    def test_fin_de_linea(self):
        emit_csv(self.tabla(), self.ruta)
        self.assertTrue(self.ruta.read_bytes().startswith(b"scheme,parameter,value,enst_mean,enst_stderr,trials\r\n"))

    def test_misma_entrada_mismos_bytes(self):
        barrido = SweepSpec("potencia", (0.0, 5.0), (BaselineKind.TDMA,))
        otra = Path(self.directorio.name) / "otra.csv"
        emit_csv(run_experiment(config_chica(), barrido), self.ruta)
        emit_csv(run_experiment(config_chica(), barrido), otra)
        self.assertEqual(self.ruta.read_bytes(), otra.read_bytes())

    def test_trazas(self):
        emitir_trazas_csv([FilaTraza(0.0, "interno", 0, 1.5), FilaTraza(0.0, "externo", 1, 2.5)], self.ruta)
        lineas = self.ruta.read_text(encoding="utf-8").splitlines()
        self.assertEqual(lineas, ["valor,bucle,iteracion,metrica", "0.0,interno,0,1.5", "0.0,externo,1,2.5"])
        with self.assertRaises(DominioError):
            emitir_trazas_csv([], self.ruta)


def cop_alterada(*args, **kwargs):
    return min(1.0, cop_closed_form(*args, **kwargs) + 0.25)


class ValidacionTests(SimpleTestCase):

    def test_veredictos(self):
        self.assertEqual(veredicto(1.0, 0.001, 100_000), "pasa")
        self.assertEqual(veredicto(4.0, 0.001, 100_000), "falla")
        self.assertEqual(veredicto(4.0, 0.05, 100_000), "no_concluyente")

    def test_mil_ensayos_nunca_dan_falla(self):
        # error binomial con p = 0.1 y 10^3 ensayos
        se = math.sqrt(0.1 * 0.9 / 1_000)
        self.assertLess(se, 0.01)
        self.assertEqual(veredicto(3.5, se, 1_000), "no_concluyente")
        self.assertEqual(veredicto(3.5, se, 10_000), "falla")

    def test_formas_cerradas_coinciden(self):
        reporte = validate_closed_forms(config_chica(), ensayos_mc=20_000, escenarios=1)
        self.assertTrue(reporte.filas)
        self.assertTrue(reporte.aprobado, reporte.como_texto())
        self.assertTrue(any("sop-sic" in fila.caso for fila in reporte.filas))

    def test_control_negativo(self):
        reporte = validate_closed_forms(config_chica(), ensayos_mc=20_000, escenarios=1, cop_cerrada=cop_alterada)
        self.assertFalse(reporte.aprobado)
        self.assertTrue(all(fila.veredicto == "falla" for fila in reporte.filas if " cop " in fila.caso))

    def test_pocos_ensayos_no_concluyente(self):
        reporte = validate_closed_forms(config_chica(), ensayos_mc=1_000, escenarios=1, cop_cerrada=cop_alterada)
        filas_cop = [fila for fila in reporte.filas if " cop " in fila.caso]
        self.assertTrue(filas_cop)
        for fila in filas_cop:
            self.assertEqual(fila.veredicto, "no_concluyente")


class TendenciasTests(SimpleTestCase):

    def filas(self, medias, error=0.1):
        return [FilaResultado("RSMA", "potencia", v, m, error, 10) for v, m in zip((0.0, 10.0, 20.0), medias)]

    def test_monotonia_dentro_de_la_tolerancia(self):
        self.assertEqual(violaciones_de_monotonia(self.filas([1.0, 2.0, 1.9]), "RSMA", "creciente"), ())

    def test_monotonia_violada(self):
        violaciones = violaciones_de_monotonia(self.filas([1.0, 2.0, 1.4]), "RSMA", "creciente")
        self.assertEqual(violaciones, ((10.0, 20.0),))
        self.assertEqual(violaciones_de_monotonia(self.filas([3.0, 2.0, 1.0]), "RSMA", "decreciente"), ())

    def test_fraccion_dominante(self):
        totales = [{"a": 2.0, "b": 1.0}, {"a": 1.0, "b": 1.0}, {"a": 0.0, "b": 1.0}, {"a": 3.0, "b": 0.0}]
        self.assertAlmostEqual(fraccion_dominante(totales, "a", "b"), 0.75)
        self.assertEqual(fraccion_dominante([], "a", "b"), 0.0)

    def test_variantes_de_rsma_por_construccion(self):
        reporte = verificar_tendencias(config_chica(), barridos=())
        por_par = {(d.mayor, d.menor): d for d in reporte.dominancias}
        self.assertEqual(por_par[("RSMA", "RSMA-SSIC")].fraccion, 1.0)
        self.assertEqual(por_par[("RSMA", "RSMA-eve-SIC")].fraccion, 1.0)
        self.assertEqual(reporte.monotonias, [])

    def test_tdma_no_degenerado_en_escritorio(self):
        config = cargar_configuracion("escritorio")
        totales = [ejecutar_ensayo(config, [BaselineKind.TDMA], t)[BaselineKind.TDMA] for t in range(3)]
        self.assertGreater(sum(totales), 0.0)


class ComandosTests(SimpleTestCase):

    def setUp(self):
        self.directorio = tempfile.TemporaryDirectory()
        self.config = Path(self.directorio.name) / "chico.toml"
        self.config.write_text(TOML_CHICO, encoding="utf-8")

    def tearDown(self):
        self.directorio.cleanup()

    def test_run_escribe_csv(self):
        salida = Path(self.directorio.name) / "enst.csv"
        call_command(
            "run", str(self.config), "--barrido", "potencia", "--valores", "0", "10",
            "--esquemas", "TDMA", "--trials", "1", "--out", str(salida), stdout=io.StringIO(),
        )
        self.assertEqual(len(salida.read_text(encoding="utf-8").splitlines()), 3)

    def test_run_configuracion_invalida(self):
        roto = Path(self.directorio.name) / "roto.toml"
        roto.write_text("[outage]\neps_cp = 0.1\n", encoding="utf-8")
        with self.assertRaises(CommandError) as exc:
            call_command("run", str(roto), "--out", str(Path(self.directorio.name) / "x.csv"))
        self.assertEqual(exc.exception.returncode, 2)

    def test_run_ensayos_invalidos(self):
        with self.assertRaises(CommandError) as exc:
            call_command("run", str(self.config), "--trials", "0")
        self.assertEqual(exc.exception.returncode, 2)

    def test_validate_configuracion_inexistente(self):
        with self.assertRaises(CommandError) as exc:
            call_command("validate", "no_existe.toml")
        self.assertEqual(exc.exception.returncode, 2)

    def test_validate_aprueba(self):
        salida = io.StringIO()
        call_command("validate", str(self.config), "--trials", "20000", "--escenarios", "1", stdout=salida)
        self.assertIn("APROBADO", salida.getvalue())

    def test_presets(self):
        salida = io.StringIO()
        call_command("presets", stdout=salida)
        texto = salida.getvalue()
        self.assertIn("escritorio", texto)
        self.assertIn("convergencia", texto)

    def test_tendencias_reporta_dominancias(self):
        salida = io.StringIO()
        try:
            call_command("tendencias", str(self.config), "--trials", "2", "--barridos", stdout=salida)
        except CommandError as exc:
            self.assertEqual(exc.returncode, 1)
        self.assertIn("RSMA >= RSMA-SSIC: 100.00%", salida.getvalue())

    def test_tendencias_ensayos_invalidos(self):
        with self.assertRaises(CommandError) as exc:
            call_command("tendencias", str(self.config), "--trials", "1")
        self.assertEqual(exc.exception.returncode, 2)
