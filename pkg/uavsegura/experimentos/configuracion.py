"""
Lectura y validacion de la configuracion de escenario (TOML).

Cada seccion se valida con su formulario; las secciones o claves que no
existen se rechazan con el contexto seccion.clave.
"""
import logging
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, replace
from pathlib import Path

from django.core.exceptions import ValidationError

from analitica.problema import OutageSpec
from nucleo.ajustes import parametro
from nucleo.excepciones import DominioError
from optimizador.tipos import SolverConfig
from red.escenario import ParametrosRed
from red.geometria import PathLossModel

from .forms import SECCIONES

logger = logging.getLogger(__name__)


def dbw_a_lineal(dbw):
    return 10.0 ** (dbw / 10.0)


@dataclass(frozen=True)
class ScenarioConfig:
    red: ParametrosRed
    spec: OutageSpec
    solver: SolverConfig
    potencia_dbw: float = 0.0
    ensayos: int = 50
    semilla: int = 20240501
    esquemas: tuple = ()

    @property
    def potencia_total(self):
        return dbw_a_lineal(self.potencia_dbw)

    @property
    def budget_por_usuario(self):
        """P / sum_m K_m: los usuarios sin programar tambien cuentan."""
        return self.potencia_total / self.red.n_users

    def con(self, **cambios):
        return replace(self, **cambios)

    def con_spec(self, **cambios):
        return replace(self, spec=replace(self.spec, **cambios))

    def con_red(self, **cambios):
        return replace(self, red=self.red.con(**cambios))


def _errores_de_formulario(seccion, form):
    errores = []
    for campo, mensajes in form.errors.items():
        prefijo = seccion if campo == "__all__" else f"{seccion}.{campo}"
        errores.extend(ValidationError(f"{prefijo}: {mensaje}", code="invalido") for mensaje in mensajes)
    return errores


def _limpiar_secciones(datos):
    errores = []
    limpios = {}
    for seccion in datos:
        if seccion not in SECCIONES:
            errores.append(ValidationError(f"Seccion desconocida: [{seccion}]", code="seccion_desconocida"))
    for seccion, formulario in SECCIONES.items():
        valores = datos.get(seccion, {})
        if not isinstance(valores, dict):
            errores.append(ValidationError(f"[{seccion}] debe ser una tabla", code="invalido"))
            continue
        for clave in sorted(set(valores) - set(formulario.base_fields)):
            errores.append(ValidationError(f"Clave desconocida: {seccion}.{clave}", code="clave_desconocida"))
        form = formulario(valores)
        if form.is_valid():
            limpios[seccion] = form.cleaned_data
        else:
            errores.extend(_errores_de_formulario(seccion, form))
    if errores:
        raise ValidationError(errores)
    return limpios


def configuracion_desde_dict(datos):
    """ScenarioConfig a partir de las secciones ya leidas del TOML."""
    limpios = _limpiar_secciones(datos)
    geometria = limpios["geometria"]
    perdidas = limpios["perdidas"]
    outage = limpios["outage"]
    solver = limpios["solver"]
    experimento = limpios["experimento"]
    try:
        red = ParametrosRed(
            coverage_radius=geometria["radio_cobertura"],
            uav_altitude=geometria["altura_uav"],
            n_clusters=geometria["clusters"],
            n_users=geometria["usuarios"],
            users_per_cluster=geometria["usuarios_por_cluster"],
            n_eves=geometria["espias"],
            n_antennas=geometria["antenas"],
            n_eve_antennas=geometria["antenas_espia"],
            path_loss_model=PathLossModel(
                los_exponent=perdidas["exponente_los"],
                nlos_exponent=perdidas["exponente_nlos"],
                lambda1=perdidas["lambda1"],
                lambda2=perdidas["lambda2"],
            ),
        )
        spec = OutageSpec(
            eps_cop=outage["eps_cop"],
            eps_sop=outage["eps_sop"],
            sigma_m_sq=dbw_a_lineal(outage["ruido_uav_dbw"]),
            sigma_e_sq=dbw_a_lineal(outage["ruido_espia_dbw"]),
            feedback_bits=math.ceil(math.log2(geometria["clusters"])) if geometria["clusters"] > 1 else 0,
        )
        config_solver = SolverConfig(
            t_max=solver["t_max"],
            q_max=solver["q_max"],
            delta_i=solver["delta_i"],
            epsilon=solver["epsilon"],
            max_reducciones=solver["max_reducciones"],
            solver=solver["solver"],
        )
    except DominioError as exc:
        raise ValidationError(str(exc), code="invalido") from exc
    return ScenarioConfig(
        red=red,
        spec=spec,
        solver=config_solver,
        potencia_dbw=outage["potencia_dbw"],
        ensayos=experimento["ensayos"],
        semilla=experimento["semilla"],
        esquemas=tuple(experimento["esquemas"]),
    )


def leer_configuracion(texto, origen="<texto>"):
    try:
        datos = tomllib.loads(texto)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"TOML invalido en {origen}: {exc}", code="toml") from exc
    return configuracion_desde_dict(datos)


def resolver_ruta(nombre):
    """Acepta una ruta existente o el nombre de un preset incluido."""
    ruta = Path(nombre)
    if ruta.exists():
        return ruta
    preset = Path(parametro("DIRECTORIO_PRESETS")) / f"{ruta.stem}.toml"
    if preset.exists():
        return preset
    raise ValidationError(f"No existe el archivo de configuracion {nombre}", code="sin_archivo")


def cargar_configuracion(nombre):
    ruta = resolver_ruta(nombre)
    logger.info("Leyendo configuracion %s", ruta)
    return leer_configuracion(ruta.read_text(encoding="utf-8"), origen=str(ruta))


def presets_disponibles():
    directorio = Path(parametro("DIRECTORIO_PRESETS"))
    return sorted(ruta.stem for ruta in directorio.glob("*.toml"))
