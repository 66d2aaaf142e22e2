"""
Barridos predefinidos: uno por cada eje de las curvas de ENST.
"""
from dataclasses import dataclass, replace

from nucleo.excepciones import DominioError
from referencias.esquemas import BaselineKind

PARAMETROS = ("potencia", "eps_cop", "eps_sop", "espias", "antenas_espia")


@dataclass(frozen=True)
class SweepSpec:
    parametro: str
    valores: tuple
    esquemas: tuple = ()
    descripcion: str = ""
    trazas: bool = False

    def __post_init__(self):
        if self.parametro not in PARAMETROS:
            raise DominioError(f"Parametro de barrido desconocido: {self.parametro!r}")
        if not self.valores:
            raise DominioError("El barrido necesita al menos un valor")
        object.__setattr__(self, "valores", tuple(self.valores))
        object.__setattr__(self, "esquemas", tuple(BaselineKind(kind) for kind in self.esquemas))

    def con_valores(self, valores):
        return replace(self, valores=tuple(valores))

    def con_esquemas(self, esquemas):
        return replace(self, esquemas=tuple(BaselineKind(kind) for kind in esquemas))

    def esquemas_para(self, config):
        """Esquemas del barrido; si no define ninguno se usan los de la configuracion."""
        return self.esquemas or tuple(BaselineKind(kind) for kind in config.esquemas)

    def aplicar(self, config, valor):
        """Copia de config con el parametro barrido fijado en valor."""
        if self.parametro == "potencia":
            return config.con(potencia_dbw=float(valor))
        if self.parametro == "eps_cop":
            return config.con_spec(eps_cop=float(valor))
        if self.parametro == "eps_sop":
            return config.con_spec(eps_sop=float(valor))
        if self.parametro == "espias":
            return config.con_red(n_eves=int(valor))
        return config.con_red(n_eve_antennas=int(valor))


TODOS = tuple(BaselineKind)

PRESETS = {
    "potencia": SweepSpec(
        "potencia", (-20.0, -10.0, 0.0, 10.0, 20.0), TODOS,
        "ENST frente a la potencia total P (dBW)",
    ),
    "eps_cop": SweepSpec(
        "eps_cop", (0.05, 0.1, 0.2, 0.3),
        (BaselineKind.RSMA, BaselineKind.PD_NOMA, BaselineKind.TDMA),
        "ENST frente a la tolerancia de corte de conexion",
    ),
    "eps_sop": SweepSpec(
        "eps_sop", (0.05, 0.1, 0.2, 0.3),
        (BaselineKind.RSMA, BaselineKind.PD_NOMA, BaselineKind.TDMA),
        "ENST frente a la tolerancia de corte de secreto",
    ),
    "espias": SweepSpec(
        "espias", (1, 2, 3),
        (BaselineKind.RSMA, BaselineKind.RSMA_EVE_SIC),
        "ENST frente al numero de espias, con y sin SIC en el espia",
    ),
    "antenas_espia": SweepSpec(
        "antenas_espia", (1, 2, 4, 8),
        (BaselineKind.RSMA,),
        "ENST frente a las antenas de cada espia",
    ),
    "convergencia": SweepSpec(
        "potencia", (-10.0, 0.0, 10.0),
        (BaselineKind.RSMA,),
        "Trazas de los bucles interno y externo para varios P",
        trazas=True,
    ),
}


def obtener_barrido(nombre):
    try:
        return PRESETS[nombre]
    except KeyError:
        raise DominioError(f"Barrido desconocido: {nombre!r}; disponibles: {', '.join(PRESETS)}") from None
