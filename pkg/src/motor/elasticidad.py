"""Elasticidad: nodos que faltan a una ronda, se van o se unen.

- Ausencia (dropout): cada nodo participa con probabilidad p; la W de la
  ronda se repara por absorción en la diagonal.
- Salida permanente: el nodo queda aislado con x_[k] y v_k congelados.
- Unión: el nuevo nodo arranca con x_[k] = 0 y v_k = promedio de la red,
  así (1/K)Σ v_k = Ax sigue valiendo con el nuevo K.
"""

from __future__ import annotations

import logging
from typing import List, Sequence, Tuple

import numpy as np

from datos.particion import Partition
from errores import ConfigError
from motor.estado import NodeState, new_node, stack_v
from problema.especificacion import ProblemSpec
from topologia.mezcla import absorb_inactive

__all__ = ["apply_dropout", "reset_absent", "leave_node", "join_node"]

logger = logging.getLogger(__name__)


def apply_dropout(
    states: Sequence[NodeState],
    W_base: np.ndarray,
    p: float,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """(máscara de activos, W efectiva) para una ronda.

    Siempre se sortean K uniformes, incluso con p = 1, para que el flujo de
    ausencias no dependa de p.
    """
    if not 0.0 < p <= 1.0:
        raise ConfigError(f"p debe estar en (0, 1], llegó {p}")
    draws = rng.random(len(states))
    present = np.array([not s.frozen for s in states], dtype=bool)
    active = present & (draws < p)
    for s, a in zip(states, active):
        s.active = bool(a)
    return active, absorb_inactive(W_base, active)


def reset_absent(states: Sequence[NodeState], active: np.ndarray) -> int:
    """Modelo de fallo con reinicio: el x_[k] de cada ausente vuelve a 0.

    Ax baja en Δ = A_[k]x_[k]; para conservar (1/K)Σv = Ax los nodos activos
    restan KΔ repartido a partes iguales (o el propio nodo si nadie está
    activo). Devuelve cuántos nodos se reiniciaron.
    """
    K = len(states)
    receivers = [s for s, a in zip(states, active) if a]
    n_reset = 0
    for s, a in zip(states, active):
        if a or s.frozen or not np.any(s.x):
            continue
        delta = s.block_matrix.matvec(s.x)
        s.x = np.zeros_like(s.x)
        targets = receivers or [s]
        share = (K / len(targets)) * delta
        for t in targets:
            t.v = t.v - share
        n_reset += 1
    return n_reset


def leave_node(states: Sequence[NodeState], k: int) -> None:
    if not 0 <= k < len(states):
        raise ConfigError(f"nodo {k} inexistente (K={len(states)})")
    states[k].frozen = True
    states[k].active = False
    logger.info("el nodo %d sale de la red; x_[k] congelado", k)


def join_node(
    states: List[NodeState],
    partition: Partition,
    problem: ProblemSpec,
    columns: Sequence[int],
    solver_seed: int,
) -> Tuple[List[NodeState], Partition]:
    """Añade el nodo K con las columnas libres ``columns`` (puede no traer ninguna)."""
    new_partition = partition.with_block(columns)
    k = len(states)
    v_avg = stack_v(states).mean(axis=0) if states else np.zeros(problem.d)
    node = new_node(problem, k, new_partition.blocks[-1], v_avg, solver_seed)
    logger.info("el nodo %d se une con %d columnas", k, node.n_k)
    return list(states) + [node], new_partition