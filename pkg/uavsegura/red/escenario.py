from dataclasses import dataclass, field, replace

from .agrupamiento import build_cluster_plan
from .canal import draw_channels, generate_codebook
from .geometria import PathLossModel, place_network


@dataclass(frozen=True)
class ParametrosRed:
    """Parametros geometricos de un escenario (seccion [geometria])."""

    coverage_radius: float = 200.0
    uav_altitude: float = 100.0
    n_clusters: int = 2
    n_users: int = 8
    users_per_cluster: int = 2
    n_eves: int = 2
    n_antennas: int = 4
    n_eve_antennas: int = 2
    path_loss_model: PathLossModel = field(default_factory=PathLossModel)

    def con(self, **cambios):
        return replace(self, **cambios)


@dataclass
class Escenario:
    geometria: object
    codebook: object
    canales: object
    plan: object


def generar_escenario(parametros, rng):
    """Un ensayo completo: geometria, codebook, canales y plan de clusters."""
    geometria = place_network(parametros, rng)
    codebook = generate_codebook(parametros.n_clusters, parametros.n_antennas, rng.derivar(1))
    canales = draw_channels(geometria, rng)
    plan = build_cluster_plan(canales, codebook, parametros.users_per_cluster, rng)
    return Escenario(geometria=geometria, codebook=codebook, canales=canales, plan=plan)
