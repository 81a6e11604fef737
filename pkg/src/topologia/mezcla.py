"""Matrices de mezcla W (simétricas y doblemente estocásticas).

Pesos de Metropolis-Hastings: W_ij = 1/(1 + max{d_i, d_j}) en cada arista y
la diagonal absorbe el resto de la fila.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple

import numpy as np

from errores import ConfigError, PreflightError
from topologia.espectro import spectral_beta
from topologia.grafos import Graph, is_connected

__all__ = ["MixingMatrix", "metropolis_weights", "uniform_weights", "absorb_inactive"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MixingMatrix:
    weights: np.ndarray
    graph: Graph = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        W = np.array(self.weights, dtype=np.float64)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ConfigError(f"W debe ser cuadrada, llegó {W.shape}")
        W.setflags(write=False)
        object.__setattr__(self, "weights", W)

    @property
    def K(self) -> int:
        return self.weights.shape[0]

    @cached_property
    def beta(self) -> float:
        return spectral_beta(self.weights)

    def neighbors(self, k: int) -> Tuple[int, ...]:
        """N_k = {j : W_jk > 0}, incluido el propio k si W_kk > 0."""
        return tuple(int(j) for j in np.flatnonzero(self.weights[:, k] > 0))


def metropolis_weights(graph: Graph, *, require_connected: bool = True) -> MixingMatrix:
    """Pesos de Metropolis-Hastings sobre ``graph``.

    ``require_connected=False`` deja la comprobación al preflight: piezas de
    un calendario variable (emparejamientos) o grafos leídos de fichero.
    """
    if require_connected and not is_connected(graph):
        raise PreflightError("connectivity", f"el grafo con K={graph.K} no es conexo: β sería 1")
    K = graph.K
    deg = graph.degrees
    W = np.zeros((K, K))
    for i, j in sorted(graph.edges):
        w = 1.0 / (1.0 + max(deg[i], deg[j]))
        W[i, j] = W[j, i] = w
    # diagonal: lo que falta para que la fila sume 1
    W[np.diag_indices(K)] = 1.0 - W.sum(axis=1)
    return MixingMatrix(W, graph)


def uniform_weights(K: int) -> MixingMatrix:
    """(1/K)𝟙𝟙ᵀ: promedio exacto en un paso (caso CoCoA)."""
    if K < 1:
        raise ConfigError(f"K debe ser >= 1 (K={K})")
    return MixingMatrix(np.full((K, K), 1.0 / K))


def absorb_inactive(W: np.ndarray, active: np.ndarray) -> np.ndarray:
    """Reparación de W cuando parte de los nodos no participa.

    Se anulan las entradas fuera de la diagonal que tocan un nodo inactivo
    y cada diagonal recoge la masa quitada de su fila. Las aristas entre
    nodos activos conservan su peso; los inactivos quedan aislados (W_kk = 1).
    """
    W = np.asarray(W, dtype=np.float64)
    active = np.asarray(active, dtype=bool)
    if active.all():
        return W
    keep = np.outer(active, active)
    out = np.where(keep, W, 0.0)
    np.fill_diagonal(out, 0.0)
    np.fill_diagonal(out, 1.0 - out.sum(axis=1))
    return out
