import json
from dataclasses import asdict, dataclass, field

import numpy as np

from nucleo.ajustes import parametro
from nucleo.excepciones import DominioError


@dataclass(frozen=True)
class SolverConfig:
    """Topes y tolerancias de los dos niveles de iteracion."""

    t_max: int = 20
    q_max: int = 20
    delta_i: float = 1e-2
    epsilon: float = 1e-3
    tolerancia: float = 1e-6
    max_reducciones: int = 5
    potencia_minima: float = 1e-6
    solver: str = None

    def __post_init__(self):
        if self.t_max < 1 or self.q_max < 1:
            raise DominioError("Los topes de iteraciones deben ser al menos 1")
        for nombre in ("delta_i", "epsilon", "tolerancia", "potencia_minima"):
            if getattr(self, nombre) <= 0:
                raise DominioError(f"{nombre} debe ser positivo")
        if self.max_reducciones < 0:
            raise DominioError("max_reducciones no puede ser negativo")
        if self.solver is None:
            object.__setattr__(self, "solver", parametro("SOLVER"))


@dataclass
class SpcaState:
    """
    Punto de expansion de una iteracion SPCA para un espia.

    Las auxiliares (theta, rho, nu, vartheta) quedan ajustadas a las
    potencias: theta = 2^D - 1 con D la redundancia minima.
    """

    powers: np.ndarray
    redundancy: np.ndarray
    theta: np.ndarray
    rho: np.ndarray
    nu: np.ndarray
    vartheta: np.ndarray
    log_vartheta: np.ndarray
    iteracion: int = 0
    traza: list = field(default_factory=list)


@dataclass
class SolverReport:
    iteraciones_externas: int = 0
    iteraciones_internas: list = field(default_factory=list)
    traza_objetivo: list = field(default_factory=list)
    traza_tasas: list = field(default_factory=list)
    residuo_kkt: float = None
    tiempo: float = 0.0
    convergio: bool = True
    pasos_reducidos: int = 0
    ordenes_evaluados: int = 1

    def como_dict(self):
        return asdict(self)

    def como_texto(self):
        return json.dumps(self.como_dict(), sort_keys=True)


@dataclass
class SolucionEspia:
    """Resultado del problema independiente de un espia."""

    eve: int
    powers: np.ndarray
    rates: np.ndarray
    redundancy: np.ndarray
    cop: np.ndarray
    enst: float
    surrogate_objective: float
    report: SolverReport


@dataclass
class AllocationSolution:
    """
    Asignacion de un cluster con un orden fijo.

    Una sola asignacion (powers, rates) para todos los espias; redundancy
    tiene la redundancia minima de cada espia con esas potencias, forma
    (J, mensajes).
    """

    powers: np.ndarray
    rates: np.ndarray
    redundancy: np.ndarray
    order: object
    objective: float
    surrogate_objective: float
    cop: np.ndarray
    eve_critico: int = None
    por_espia: list = field(default_factory=list)
    report: SolverReport = field(default_factory=SolverReport)
    candidatos: list = field(default_factory=list)

    def presupuesto_usado(self, parts):
        return np.asarray(self.powers).reshape(-1, parts).sum(axis=1)
