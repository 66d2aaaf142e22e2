"""
Agrupamiento por distancia cordal, planificacion de usuarios y
combinadores ZF del UAV.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from nucleo.excepciones import InfactibleError

from .canal import eve_effective_channel, quantization_decompose

logger = logging.getLogger(__name__)


def assign_clusters(channels, codebook):
    """Cada usuario va al codeword que maximiza |f_tilde^H v_m|^2."""
    f = np.asarray(channels.f if hasattr(channels, "f") else channels, dtype=complex)
    f = np.atleast_2d(f)
    direcciones = f / np.linalg.norm(f, axis=1, keepdims=True)
    cosenos = np.abs(direcciones.conj() @ codebook.vectors.T) ** 2
    return np.argmax(cosenos, axis=1)


def zf_beamformer(codebook, m):
    """
    Proyeccion normalizada de v_m sobre el nulo de {v_l, l != m}.

    Con M = 1 no hay restricciones y w_1 = v_1.
    """
    v_m = codebook.vectors[m]
    otros = np.delete(codebook.vectors, m, axis=0)
    if otros.shape[0] == 0:
        return v_m.copy()
    base = linalg.null_space(otros.conj())
    if base.shape[1] == 0:
        raise InfactibleError(
            "Los codewords restantes generan todo el espacio: no hay combinador ZF",
            {"cluster": m, "M": codebook.size, "N_t": codebook.n_antennas},
        )
    w = base @ (base.conj().T @ v_m)
    norma = np.linalg.norm(w)
    if norma < 1e-12:
        raise InfactibleError("v_m es ortogonal al nulo ZF", {"cluster": m})
    return w / norma


@dataclass
class ClusterPlan:
    assignment: np.ndarray
    beamformers: np.ndarray
    clusters: list
    canales_espia: list = field(default_factory=list)

    @property
    def cluster_sizes(self):
        return [len(c) for c in self.clusters]

    @property
    def active_clusters(self):
        return [m for m, usuarios in enumerate(self.clusters) if len(usuarios) > 0]

    @property
    def unscheduled(self):
        programados = set(np.concatenate([np.asarray(c, dtype=int) for c in self.clusters]).tolist()) if self.clusters else set()
        return [u for u in range(self.assignment.size) if u not in programados]

    def eve_beamformer(self, m, j):
        return self.canales_espia[m][j].w_eve

    def lambda_max(self, m, j):
        return self.canales_espia[m][j].lambda_max


def build_cluster_plan(channels, codebook, users_per_cluster=0, rng=None):
    """
    Asigna clusters, completa phi/e del canal y elige hasta
    users_per_cluster usuarios por cluster (los de mayor cos^2 phi).

    users_per_cluster = 0 programa a todos los usuarios asignados.
    """
    asignacion = assign_clusters(channels, codebook)
    n_usuarios = channels.f.shape[0]
    phi = np.zeros(n_usuarios)
    e = np.zeros_like(channels.f)
    f_tilde = np.zeros_like(channels.f)
    for u in range(n_usuarios):
        v_hat = codebook.vectors[asignacion[u]]
        phi[u], e[u] = quantization_decompose(channels.f[u], v_hat, rng.derivar(300 + u) if rng else None)
        f_tilde[u] = np.cos(phi[u]) * v_hat + np.sin(phi[u]) * e[u]
    channels.phi, channels.e, channels.f_tilde = phi, e, f_tilde

    clusters = []
    for m in range(codebook.size):
        miembros = np.flatnonzero(asignacion == m)
        # mayor cos^2(phi) primero, empate por indice de usuario
        miembros = miembros[np.lexsort((miembros, phi[miembros]))]
        if users_per_cluster:
            miembros = miembros[:users_per_cluster]
        clusters.append(np.sort(miembros))

    beamformers = np.array([zf_beamformer(codebook, m) for m in range(codebook.size)])

    canales_espia = []
    for m, miembros in enumerate(clusters):
        por_espia = []
        for j in range(channels.Q.shape[0]):
            por_espia.append(eve_effective_channel(channels.Q[j][:, miembros]) if len(miembros) else None)
        canales_espia.append(por_espia)

    plan = ClusterPlan(assignment=asignacion, beamformers=beamformers, clusters=clusters, canales_espia=canales_espia)
    logger.debug("Clusters planificados: tamanos %s, sin programar %d", plan.cluster_sizes, len(plan.unscheduled))
    return plan
