class ErrorSimulador(Exception):
    """Raiz de los errores propios del simulador."""


class DominioError(ErrorSimulador, ValueError):
    """Argumento fuera del dominio de la operacion."""


class InfactibleError(ErrorSimulador):
    """No existe un punto que cumpla las restricciones pedidas."""

    def __init__(self, mensaje, detalle=None):
        super().__init__(mensaje)
        self.detalle = detalle or {}


class OrdenDemasiadoGrandeError(DominioError):
    """El conjunto de ordenes SIC no es enumerable."""
