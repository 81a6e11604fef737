"""Certificados locales: cada nodo decide con sus datos y los gradientes vecinos.

Con g_k = ∇f(v_k) y m_k = Σ_j W_kj g_j (lo que el nodo recibe de N_k), la
brecha local por defecto evalúa la conjugada en m_k y sólo el bloque propio:

    ℓ_k = Σ_{i∈P_k} [g_i(x_i) + g_i*(−A_iᵀm_k) + x_i A_iᵀm_k] ≤ ε/(2K)

Cada sumando es ≥ 0 (Fenchel–Young) y en el óptimo con consenso vale 0.
Como (1/K)Σ v_k = Ax, el resto G_H − Σ ℓ_k se acota por
(τ/K)D² + 2L·S·βD, con D² = Σ‖g_k − ḡ‖² ≤ Σ‖g_k − m_k‖²/(1 − β)² y
S² = Σ n_k²σ_k; la condición de desacuerdo

    ‖g_k − m_k‖ ≤ (1 − β) u/√K,   (τ/K)u² + 2LSβu = ε/2

garantiza entonces G_H ≤ ε. Se conservan las variantes con el término
v_kᵀ∇f(v_k) entero (``plain``) o dividido por K (``scaled``), ambas con el
umbral (Σ_k n_k²σ_k)^{−1/2} (1 − β)/(2L√K) ε.

El promedio uniforme sobre N_k queda disponible pero sólo es sólido para W
con filas uniformes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from certificados.brecha import GapReport, decentralized_gap, mixed_gap
from datos.constantes import DataConstants
from datos.particion import Partition
from errores import ConfigError
from problema.especificacion import ProblemSpec

__all__ = [
    "NeighborAverage",
    "LocalGap",
    "CertConstants",
    "certificate_threshold",
    "neighborhood_threshold",
    "make_cert_constants",
    "local_certificate",
    "evaluate_certificates",
]

logger = logging.getLogger(__name__)

# σ_k sale de la iteración de la potencia (cota por debajo); se infla para
# que sea una cota superior válida
SIGMA_INFLATION = 1e-6


class NeighborAverage(str, Enum):
    MIXING = "mixing"
    UNIFORM = "uniform"


class LocalGap(str, Enum):
    NEIGHBORHOOD = "neighborhood"  # conjugada en m_k, bloque propio
    SCALED = "scaled"              # (1/K) v_kᵀ∇f(v_k) + conjugada en g_k
    PLAIN = "plain"                # v_kᵀ∇f(v_k) + conjugada en g_k


@dataclass(frozen=True)
class CertConstants:
    epsilon: float
    radius: float
    beta: float
    sum_nk2_sigma: float
    K: int
    tau: float = 1.0
    local_gap: LocalGap = LocalGap.NEIGHBORHOOD

    def __post_init__(self) -> None:
        object.__setattr__(self, "local_gap", LocalGap(self.local_gap))

    @property
    def local_threshold(self) -> float:
        return self.epsilon / (2.0 * self.K)

    @property
    def deviation_threshold(self) -> float:
        if self.local_gap is LocalGap.NEIGHBORHOOD:
            return neighborhood_threshold(self)
        return certificate_threshold(self)


def _check(c: CertConstants) -> None:
    if not c.beta < 1.0:
        raise ConfigError(f"β debe ser < 1 para certificar, llegó {c.beta}")
    if c.radius <= 0:
        raise ConfigError(f"L debe ser > 0, llegó {c.radius}")


def certificate_threshold(constants: CertConstants) -> float:
    """(Σ n_k²σ_k)^{−1/2} · (1 − β)/(2L√K) · ε."""
    c = constants
    _check(c)
    if c.sum_nk2_sigma <= 0:
        return math.inf
    return (1.0 - c.beta) * c.epsilon / (math.sqrt(c.sum_nk2_sigma) * 2.0 * c.radius * math.sqrt(c.K))


def neighborhood_threshold(constants: CertConstants) -> float:
    """(1 − β) u/√K con u la raíz positiva de (τ/K)u² + 2LSβu = ε/2."""
    c = constants
    _check(c)
    if c.tau <= 0:
        raise ConfigError(f"τ debe ser > 0, llegó {c.tau}")
    lin = 2.0 * c.radius * math.sqrt(max(c.sum_nk2_sigma, 0.0)) * max(c.beta, 0.0)
    # forma racionalizada: estable cuando el término lineal domina
    u = c.epsilon / (lin + math.sqrt(lin * lin + 2.0 * c.tau * c.epsilon / c.K))
    return (1.0 - c.beta) * u / math.sqrt(c.K)


def make_cert_constants(
    epsilon: float,
    radius: float,
    beta: float,
    data: DataConstants,
    *,
    tau: float = 1.0,
    local_gap: LocalGap = LocalGap.NEIGHBORHOOD,
) -> CertConstants:
    if epsilon <= 0:
        raise ConfigError(f"ε debe ser > 0, llegó {epsilon}")
    bound = data.sum_nk2_sigma * (1.0 + SIGMA_INFLATION)
    return CertConstants(float(epsilon), float(radius), float(beta), bound, len(data.sigma_k), float(tau), LocalGap(local_gap))


def local_certificate(
    problem: ProblemSpec,
    block: np.ndarray,
    v_k: np.ndarray,
    x_block: np.ndarray,
    neighbor_grads: np.ndarray,
    constants: CertConstants,
    *,
    weights: Optional[Sequence[float]] = None,
) -> Tuple[bool, bool, float, float]:
    """(cond14, cond15, brecha local, desvío del gradiente) del nodo k.

    ``neighbor_grads`` trae ∇f(v_j) para j ∈ N_k (una fila por vecino);
    con ``weights`` se promedian con W_kj, sin ellos uniformemente.
    """
    block = np.asarray(block, dtype=np.int64)
    x_block = np.asarray(x_block, dtype=np.float64)
    grad = problem.f_grad(v_k)
    neighbor_grads = np.atleast_2d(neighbor_grads)
    if weights is None:
        avg = neighbor_grads.mean(axis=0)
    else:
        avg = np.asarray(weights, dtype=np.float64) @ neighbor_grads
    deviation = float(np.linalg.norm(grad - avg))

    sep = problem.separable
    mode = constants.local_gap
    at = avg if mode is LocalGap.NEIGHBORHOOD else grad
    s = -problem.matrix.select(block).rmatvec(at) if block.size else np.zeros(0)
    local = float(np.sum(sep.values(x_block, block)) + np.sum(sep.conj_values(s, block)))
    if mode is LocalGap.NEIGHBORHOOD:
        local -= float(x_block @ s)
    elif mode is LocalGap.SCALED:
        local += float(v_k @ grad) / constants.K
    else:
        local += float(v_k @ grad)
    return (
        local <= constants.local_threshold,
        deviation <= constants.deviation_threshold,
        local,
        deviation,
    )


def evaluate_certificates(
    problem: ProblemSpec,
    partition: Partition,
    x: np.ndarray,
    V: np.ndarray,
    W: np.ndarray,
    constants: CertConstants,
    *,
    neighbor_average: NeighborAverage = NeighborAverage.MIXING,
) -> GapReport:
    """Evalúa las 2K banderas más la brecha en v_k y en los puntos mezclados."""
    if not problem.separable.bounded_support:
        raise ConfigError("los certificados locales exigen soporte L-acotado")
    neighbor_average = NeighborAverage(neighbor_average)
    V = np.atleast_2d(V)
    W = np.asarray(W, dtype=np.float64)
    G = problem.f_grad(V)
    if not partition.covers():
        logger.warning("la partición no cubre todas las columnas: las libres no se certifican")

    K = V.shape[0]
    c14 = np.zeros(K, dtype=bool)
    c15 = np.zeros(K, dtype=bool)
    local = np.zeros(K)
    dev = np.zeros(K)
    for k in range(K):
        block = partition.blocks[k]
        nbrs = np.flatnonzero(W[k] > 0)
        weights = W[k, nbrs] if neighbor_average is NeighborAverage.MIXING else None
        c14[k], c15[k], local[k], dev[k] = local_certificate(
            problem, block, V[k], x[block], G[nbrs], constants, weights=weights
        )
    return GapReport(
        gap=decentralized_gap(problem, x, V),
        mixed_gap=mixed_gap(problem, x, V, W),
        local_gaps=local,
        local_threshold=constants.local_threshold,
        deviations=dev,
        deviation_threshold=constants.deviation_threshold,
        cond14=c14,
        cond15=c15,
    )
