"""
Ordenes de decodificacion SIC.

Un mensaje es el par (k, n): usuario k, parte n (ambos desde 0). Dentro de
cada usuario la parte 0 se decodifica antes que la parte 1, de modo que con
dos partes hay (2K)!/2^K ordenes.
"""
import math
from dataclasses import dataclass

from nucleo.excepciones import DominioError


@dataclass(frozen=True)
class DecodingOrder:
    sequence: tuple

    def __post_init__(self):
        secuencia = tuple((int(k), int(n)) for k, n in self.sequence)
        object.__setattr__(self, "sequence", secuencia)
        if len(set(secuencia)) != len(secuencia):
            raise DominioError("El orden de decodificacion repite mensajes")
        usuarios = {k for k, _ in secuencia}
        partes = len(secuencia) // max(1, len(usuarios))
        esperado = {(k, n) for k in usuarios for n in range(partes)}
        if set(secuencia) != esperado:
            raise DominioError("El orden no es una permutacion de todos los mensajes")
        siguiente = {k: 0 for k in usuarios}
        for k, n in secuencia:
            if n != siguiente[k]:
                raise DominioError(f"La parte {n} del usuario {k} aparece antes que la parte {siguiente[k]}")
            siguiente[k] += 1

    def __len__(self):
        return len(self.sequence)

    def position(self, k, n):
        return self.sequence.index((k, n))

    def phi(self, k, n):
        """Mensajes decodificados despues de (k, n): interfieren al decodificarlo."""
        return self.sequence[self.position(k, n) + 1:]

    @classmethod
    def natural(cls, n_usuarios, partes=2):
        return cls(tuple((k, n) for k in range(n_usuarios) for n in range(partes)))

    def __str__(self):
        return " > ".join(f"({k},{n})" for k, n in self.sequence)


def numero_de_ordenes(n_usuarios, partes=2):
    return math.factorial(partes * n_usuarios) // math.factorial(partes) ** n_usuarios


def enumerate_orders(n_usuarios, partes=2):
    """Todos los ordenes con las partes de cada usuario en orden creciente."""
    ordenes = []

    def extender(prefijo, siguiente):
        if len(prefijo) == n_usuarios * partes:
            ordenes.append(DecodingOrder(tuple(prefijo)))
            return
        for k in range(n_usuarios):
            if siguiente[k] < partes:
                prefijo.append((k, siguiente[k]))
                siguiente[k] += 1
                extender(prefijo, siguiente)
                siguiente[k] -= 1
                prefijo.pop()

    extender([], [0] * n_usuarios)
    return ordenes
