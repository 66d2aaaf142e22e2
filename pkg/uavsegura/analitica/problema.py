"""
Modelo por cluster visto por las formas cerradas y por el optimizador.
"""
import math
from dataclasses import dataclass, field, replace

import numpy as np

from nucleo.excepciones import DominioError


@dataclass(frozen=True)
class OutageSpec:
    eps_cop: float = 0.1
    eps_sop: float = 0.1
    sigma_m_sq: float = 1e-11
    sigma_e_sq: float = 1e-11
    feedback_bits: int = 1

    def __post_init__(self):
        for nombre in ("eps_cop", "eps_sop"):
            valor = getattr(self, nombre)
            if not 0.0 < valor < 1.0:
                raise DominioError(f"{nombre} debe estar en (0, 1), se recibio {valor}")
        if self.sigma_m_sq < 0 or self.sigma_e_sq < 0:
            raise DominioError("Las potencias de ruido no pueden ser negativas")
        if self.feedback_bits < 0:
            raise DominioError("Los bits de realimentacion no pueden ser negativos")


@dataclass
class ProblemaCluster:
    """
    Todo lo que el cluster m necesita para evaluar COP/SOP y optimizar.

    Los mensajes se indexan en plano: i = k * parts + n.
    """

    spec: OutageSpec
    budgets: np.ndarray
    pl_uav: np.ndarray
    ganancias: np.ndarray
    pl_eve: np.ndarray
    lambda_max: np.ndarray
    g_eve: np.ndarray
    n_antennas: int
    n_clusters: int
    n_eve_antennas: int = 1
    ici_budgets: np.ndarray = field(default_factory=lambda: np.zeros(0))
    ici_pl: np.ndarray = field(default_factory=lambda: np.zeros(0))
    ici_fuga: np.ndarray = field(default_factory=lambda: np.zeros(0))
    parts: int = 2
    perfect_csit: bool = False
    cluster: int = 0
    users: np.ndarray = None

    def __post_init__(self):
        self.budgets = np.asarray(self.budgets, dtype=float)
        self.pl_uav = np.asarray(self.pl_uav, dtype=float)
        self.ganancias = np.asarray(self.ganancias, dtype=float)
        self.pl_eve = np.atleast_2d(np.asarray(self.pl_eve, dtype=float)).reshape(-1, self.budgets.size)
        self.lambda_max = np.atleast_1d(np.asarray(self.lambda_max, dtype=float))
        self.g_eve = np.atleast_2d(np.asarray(self.g_eve, dtype=complex)).reshape(-1, self.budgets.size)
        self.ici_budgets = np.asarray(self.ici_budgets, dtype=float)
        self.ici_pl = np.asarray(self.ici_pl, dtype=float)
        self.ici_fuga = np.asarray(self.ici_fuga, dtype=float)
        if self.users is None:
            self.users = np.arange(self.budgets.size)
        if self.parts not in (1, 2):
            raise DominioError("Cada usuario transmite 1 (sin division) o 2 partes")
        if self.pl_eve.shape[0] != self.lambda_max.size:
            raise DominioError("pl_eve y lambda_max no coinciden en numero de espias")

    @property
    def K(self):
        return self.budgets.size

    @property
    def J(self):
        return self.lambda_max.size

    @property
    def n_mensajes(self):
        return self.K * self.parts

    @property
    def mensajes(self):
        return [(k, n) for k in range(self.K) for n in range(self.parts)]

    def indice(self, k, n):
        return k * self.parts + n

    def usuario(self, i):
        return i // self.parts

    @property
    def n_interferentes(self):
        return 0 if self.perfect_csit else self.ici_budgets.size

    @property
    def tasa_ici(self):
        """Tasas exponenciales de la ICI: 2^{B/(N_t-1)} / (P PL)."""
        if self.n_interferentes == 0:
            return np.zeros(0)
        return 2 ** (self.spec.feedback_bits / (self.n_antennas - 1)) / (self.ici_budgets * self.ici_pl)

    @property
    def potencia_ici(self):
        """Potencia de fuga realizada de cada interferente inter-cluster."""
        if self.n_interferentes == 0:
            return np.zeros(0)
        return self.ici_budgets * self.ici_pl * self.ici_fuga

    def presupuesto_mensaje(self):
        return np.repeat(self.budgets, self.parts)

    def pl_mensaje(self):
        return np.repeat(self.pl_uav, self.parts)

    def pl_eve_mensaje(self, j):
        return np.repeat(self.pl_eve[j], self.parts)

    def sin_ici(self):
        return replace(self, perfect_csit=True)

    def con_spec(self, **cambios):
        return replace(self, spec=replace(self.spec, **cambios))


@dataclass
class RateParams:
    """Parametros de tasa de un mensaje normalizados por su potencia recibida."""

    beta: float
    lambdas: np.ndarray
    lambdas_ici: np.ndarray
    xi: float
    A: int
    sigma_norm: float
    eta: float = None
    zetas: np.ndarray = None
    kappa: float = None


def rate_params(problema, order, powers, k, n, r=0.0, j=None, D=None):
    """
    Construye RateParams de (k, n). Las tasas UAV se normalizan por la
    potencia recibida del mensaje objetivo (lambda * p * PL).
    """
    p = np.asarray(powers, dtype=float)
    i = problema.indice(k, n)
    objetivo = p[i] * problema.pl_uav[k]
    if objetivo <= 0:
        raise DominioError(f"El mensaje ({k},{n}) no tiene potencia recibida positiva")
    phi = order.phi(k, n) if order is not None else ()
    medias = np.array([2 * p[problema.indice(kk, nn)] * problema.pl_uav[kk] for kk, nn in phi])
    # los mensajes sin potencia no interfieren
    medias = medias[medias > 0] if medias.size else np.zeros(0)
    lambdas = objetivo / medias
    lambdas_ici = problema.tasa_ici * objetivo
    xi = float(np.prod(2.0 / lambdas_ici)) if lambdas_ici.size else 1.0
    parametros = RateParams(
        beta=2.0 ** r - 1.0,
        lambdas=lambdas,
        lambdas_ici=lambdas_ici,
        xi=xi,
        A=lambdas.size + problema.n_clusters + problema.n_interferentes,
        sigma_norm=problema.spec.sigma_m_sq / objetivo,
    )
    if j is not None:
        pl_e = problema.pl_eve_mensaje(j)
        medias_e = p * pl_e * problema.lambda_max[j]
        parametros.eta = 1.0 / medias_e[i] if medias_e[i] > 0 else math.inf
        otros = np.delete(medias_e, i)
        parametros.zetas = 1.0 / otros[otros > 0]
        if D is not None:
            parametros.kappa = 2.0 ** D - 1.0
    return parametros


def construir_problema(escenario, m, spec, budget_por_usuario, parts=2, perfect_csit=False):
    """ProblemaCluster del cluster m a partir de un escenario generado."""
    plan = escenario.plan
    canales = escenario.canales
    geometria = escenario.geometria
    usuarios = np.asarray(plan.clusters[m], dtype=int)
    if usuarios.size == 0:
        raise DominioError(f"El cluster {m} no tiene usuarios programados")
    w_m = plan.beamformers[m]
    ganancias = np.abs(canales.f[usuarios] @ w_m.conj()) ** 2

    interferentes = np.concatenate(
        [np.asarray(plan.clusters[i], dtype=int) for i in range(len(plan.clusters)) if i != m] or [np.zeros(0, dtype=int)]
    )
    norma2 = np.sum(np.abs(canales.f[interferentes]) ** 2, axis=1)
    fuga = norma2 * np.sin(canales.phi[interferentes]) ** 2 * np.abs(canales.e[interferentes] @ w_m.conj()) ** 2

    espias = plan.canales_espia[m]
    return ProblemaCluster(
        spec=spec,
        budgets=np.full(usuarios.size, budget_por_usuario),
        pl_uav=geometria.uav_path_loss[usuarios],
        ganancias=ganancias,
        pl_eve=geometria.eve_path_loss[:, usuarios] if geometria.n_eves else np.zeros((0, usuarios.size)),
        lambda_max=np.array([canal.lambda_max for canal in espias]),
        g_eve=np.array([canal.g for canal in espias]) if espias else np.zeros((0, usuarios.size)),
        n_antennas=geometria.n_antennas,
        n_clusters=geometria.n_clusters,
        n_eve_antennas=geometria.n_eve_antennas,
        ici_budgets=np.full(interferentes.size, budget_por_usuario),
        ici_pl=geometria.uav_path_loss[interferentes],
        ici_fuga=fuga,
        parts=parts,
        perfect_csit=perfect_csit,
        cluster=m,
        users=usuarios,
    )
