"""
Geometria de la red: posiciones, distancias, angulos de elevacion y
perdidas de trayecto.
"""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from nucleo.excepciones import DominioError

VERSION_INSTANTANEA = 1
DISTANCIA_MINIMA = 1.0


@dataclass(frozen=True)
class PathLossModel:
    """Exponente de perdidas LoS/NLoS dependiente de la elevacion."""

    los_exponent: float = 2.0
    nlos_exponent: float = 3.5
    lambda1: float = 9.61
    lambda2: float = 0.16

    def __post_init__(self):
        if self.los_exponent > self.nlos_exponent:
            raise DominioError("El exponente LoS no puede superar al NLoS")


def path_loss_exponent(theta, model):
    """alpha = (L - N) / (1 + lambda1 exp(lambda2 (theta - lambda1))) + N, theta en radianes."""
    denominador = 1.0 + model.lambda1 * np.exp(model.lambda2 * (np.asarray(theta, dtype=float) - model.lambda1))
    alpha = (model.los_exponent - model.nlos_exponent) / denominador + model.nlos_exponent
    return float(alpha) if np.ndim(alpha) == 0 else alpha


def path_loss(d, alpha):
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise DominioError("La distancia debe ser positiva para evaluar la perdida de trayecto")
    valor = d ** (-np.asarray(alpha, dtype=float))
    return float(valor) if np.ndim(valor) == 0 else valor


@dataclass
class NetworkGeometry:
    uav_altitude: float
    coverage_radius: float
    user_positions: np.ndarray
    eve_positions: np.ndarray
    n_clusters: int
    n_antennas: int
    n_eve_antennas: int
    users_per_cluster: int = 0
    path_loss_model: PathLossModel = field(default_factory=PathLossModel)

    def __post_init__(self):
        self.user_positions = np.asarray(self.user_positions, dtype=float).reshape(-1, 2)
        self.eve_positions = np.asarray(self.eve_positions, dtype=float).reshape(-1, 2)
        if self.n_clusters < 1:
            raise DominioError("Debe haber al menos un cluster")
        for nombre, puntos in (("usuario", self.user_positions), ("espia", self.eve_positions)):
            radios = np.linalg.norm(puntos, axis=1)
            if np.any(radios <= 0) or np.any(radios > self.coverage_radius * (1 + 1e-12)):
                raise DominioError(f"Hay un {nombre} fuera del radio de cobertura")

    @property
    def n_users(self):
        return self.user_positions.shape[0]

    @property
    def n_eves(self):
        return self.eve_positions.shape[0]

    @property
    def ground_distances(self):
        return np.linalg.norm(self.user_positions, axis=1)

    @property
    def elevations(self):
        return np.arctan2(self.uav_altitude, self.ground_distances)

    @property
    def uav_distances(self):
        return np.hypot(self.ground_distances, self.uav_altitude)

    @property
    def uav_path_loss(self):
        alpha = path_loss_exponent(self.elevations, self.path_loss_model)
        return path_loss(self.uav_distances, alpha)

    @property
    def eve_distances(self):
        """Distancias usuario-espia en tierra, forma (J, U), acotadas a 1 m."""
        diferencia = self.eve_positions[:, None, :] - self.user_positions[None, :, :]
        return np.maximum(np.linalg.norm(diferencia, axis=-1), DISTANCIA_MINIMA)

    @property
    def eve_path_loss(self):
        # enlaces tierra-tierra: elevacion nula
        alpha = path_loss_exponent(0.0, self.path_loss_model)
        return path_loss(self.eve_distances, alpha)


def _anillo(rng, radio, n):
    gen = rng.generador
    r = np.sqrt(gen.uniform(DISTANCIA_MINIMA ** 2, radio ** 2, n))
    angulo = gen.uniform(0.0, 2 * math.pi, n)
    return np.column_stack([r * np.cos(angulo), r * np.sin(angulo)])


def place_network(parametros, rng):
    """
    Ubica usuarios y espias uniformemente (por area) en el anillo [1 m, R].

    El espia j usa su propio subflujo, asi los primeros J espias son los
    mismos para cualquier J.
    """
    usuarios = _anillo(rng.derivar(0), parametros.coverage_radius, parametros.n_users)
    espias = np.zeros((parametros.n_eves, 2))
    for j in range(parametros.n_eves):
        espias[j] = _anillo(rng.derivar(100 + j), parametros.coverage_radius, 1)[0]
    return NetworkGeometry(
        uav_altitude=parametros.uav_altitude,
        coverage_radius=parametros.coverage_radius,
        user_positions=usuarios,
        eve_positions=espias,
        n_clusters=parametros.n_clusters,
        n_antennas=parametros.n_antennas,
        n_eve_antennas=parametros.n_eve_antennas,
        users_per_cluster=parametros.users_per_cluster,
        path_loss_model=parametros.path_loss_model,
    )


def exportar_geometria(geometria):
    """Instantanea JSON clave-valor para reproducir un escenario."""
    datos = {
        "version": VERSION_INSTANTANEA,
        "uav_altitude": geometria.uav_altitude,
        "coverage_radius": geometria.coverage_radius,
        "user_positions": geometria.user_positions.tolist(),
        "eve_positions": geometria.eve_positions.tolist(),
        "n_clusters": geometria.n_clusters,
        "n_antennas": geometria.n_antennas,
        "n_eve_antennas": geometria.n_eve_antennas,
        "users_per_cluster": geometria.users_per_cluster,
        "path_loss_model": {
            "los_exponent": geometria.path_loss_model.los_exponent,
            "nlos_exponent": geometria.path_loss_model.nlos_exponent,
            "lambda1": geometria.path_loss_model.lambda1,
            "lambda2": geometria.path_loss_model.lambda2,
        },
    }
    return json.dumps(datos, indent=2, sort_keys=True)


def importar_geometria(texto):
    datos = json.loads(texto)
    if datos.pop("version", None) != VERSION_INSTANTANEA:
        raise DominioError("Version de instantanea de geometria no soportada")
    datos["path_loss_model"] = PathLossModel(**datos["path_loss_model"])
    return NetworkGeometry(**datos)
