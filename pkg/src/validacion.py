"""Comprobaciones de invariantes compartidas por el motor y las pruebas.

Las funciones ``check_*`` lanzan; las demás devuelven la magnitud medida.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from datos.particion import Partition
from errores import ConfigError, InvariantViolation
from topologia.grafos import Graph

__all__ = [
    "check_mixing_matrix",
    "partition_is_valid",
    "consensus_error",
    "check_consensus",
    "consensus_violation",
    "sandwich_holds",
]

logger = logging.getLogger(__name__)

CONSENSUS_TOL = 1e-9


def check_mixing_matrix(W: np.ndarray, graph: Optional[Graph] = None, tol: float = 1e-12) -> None:
    """Simetría exacta, sumas por fila/columna en 1, no negatividad y soporte en aristas."""
    W = np.asarray(W, dtype=np.float64)
    K = W.shape[0]
    if W.shape != (K, K):
        raise ConfigError(f"W debe ser cuadrada, llegó {W.shape}")
    if not np.array_equal(W, W.T):
        raise ConfigError("W no es simétrica")
    if np.any(W < 0):
        raise ConfigError("W tiene pesos negativos")
    rows = np.abs(W.sum(axis=1) - 1.0).max(initial=0.0)
    cols = np.abs(W.sum(axis=0) - 1.0).max(initial=0.0)
    if max(rows, cols) > tol:
        raise ConfigError(f"W no es doblemente estocástica (desvío {max(rows, cols):.2e})")
    if graph is not None:
        if graph.K != K:
            raise ConfigError(f"W es {K}x{K} pero el grafo tiene K={graph.K}")
        for i, j in zip(*np.nonzero(W)):
            if i != j and not graph.has_edge(int(i), int(j)):
                raise ConfigError(f"W_{i}{j} > 0 sin arista ({i}, {j})")


def partition_is_valid(partition: Partition) -> bool:
    """Bloques disjuntos que cubren [0, n) y Σ n_k = n."""
    flat = np.concatenate(partition.blocks) if partition.blocks else np.zeros(0, dtype=np.int64)
    return (
        flat.size == partition.n
        and np.unique(flat).size == flat.size
        and sum(partition.sizes) == partition.n
    )


def consensus_error(V: np.ndarray, Ax: np.ndarray) -> float:
    """‖(1/K)Σ v_k − Ax‖ / (1 + ‖Ax‖)."""
    V = np.atleast_2d(V)
    return float(np.linalg.norm(V.mean(axis=0) - Ax) / (1.0 + np.linalg.norm(Ax)))


def check_consensus(V: np.ndarray, Ax: np.ndarray, tol: float = CONSENSUS_TOL, *, round_: int = -1) -> float:
    err = consensus_error(V, Ax)
    if not err <= tol:
        logger.error("ronda %d: (1/K)Σv_k se separó de Ax (error relativo %.3e)", round_, err)
        raise InvariantViolation(f"identidad de consenso rota en la ronda {round_}: error {err:.3e} > {tol:.0e}")
    return err


def consensus_violation(V: np.ndarray, Ax: np.ndarray) -> float:
    """Σ_k ‖v_k − Ax‖²."""
    D = np.atleast_2d(V) - Ax
    return float(np.sum(D * D))


def sandwich_holds(FA: float, HA: float, violation: float, tau: float, K: int, slack: float = 1e-9) -> bool:
    """F_A ≤ H_A ≤ F_A + (1/(2τK)) Σ‖v_k − Ax‖²."""
    tol = slack * (1.0 + abs(HA))
    return FA - tol <= HA <= FA + violation / (2.0 * tau * K) + tol
