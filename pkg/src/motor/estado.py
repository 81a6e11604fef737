"""Estado de cada nodo simulado."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from datos.matriz import SparseColMatrix
from datos.particion import Partition
from problema.especificacion import ProblemSpec
from solver_local.subproblema import node_stream

__all__ = ["NodeState", "init_states", "new_node", "assemble_x", "stack_v"]


@dataclass(eq=False)
class NodeState:
    k: int
    block: np.ndarray
    block_matrix: SparseColMatrix
    x: np.ndarray
    v: np.ndarray
    rng: np.random.Generator = field(repr=False)
    active: bool = True
    frozen: bool = False  # salida permanente
    updates: int = 0      # actualizaciones de coordenada acumuladas

    @property
    def n_k(self) -> int:
        return int(self.block.size)


def new_node(problem: ProblemSpec, k: int, block: Sequence[int], v: np.ndarray, solver_seed: int) -> NodeState:
    block = np.asarray(block, dtype=np.int64)
    return NodeState(
        k=k,
        block=block,
        block_matrix=problem.matrix.select(block),
        x=np.zeros(block.size),
        v=np.array(v, dtype=np.float64),
        rng=node_stream(solver_seed, k),
    )


def init_states(problem: ProblemSpec, partition: Partition, solver_seed: int) -> List[NodeState]:
    """Punto de partida: x = 0 y v_k = 0 en todos los nodos."""
    zero = np.zeros(problem.d)
    return [new_node(problem, k, block, zero, solver_seed) for k, block in enumerate(partition.blocks)]


def assemble_x(states: Sequence[NodeState], n: int) -> np.ndarray:
    x = np.zeros(n)
    for s in states:
        x[s.block] = s.x
    return x


def stack_v(states: Sequence[NodeState]) -> np.ndarray:
    return np.vstack([s.v for s in states])
