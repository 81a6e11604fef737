# -------------------------------------------------------------
# Partición de columnas entre nodos
#
# Una partición se guarda igual que una RGS: un vector de etiquetas
# (columna -> nodo) más la lista de bloques que induce. Las columnas sin
# dueño llevan la etiqueta -1 (reservadas para nodos que se unan después).
# -------------------------------------------------------------

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from errores import ColumnCollisionError, ConfigError

__all__ = [
    "Partition",
    "assignments_to_blocks",
    "partition_columns",
    "shuffle_generator",
    "UNASSIGNED",
]

UNASSIGNED = -1

# PCG64 de numpy (versión estable del algoritmo desde numpy 1.17); cambiarlo
# rompe la reproducibilidad de las trazas guardadas.
PRNG_ALGORITHM = "PCG64"


def shuffle_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


# -------------------------------------------------------------
# Utilidades
# -------------------------------------------------------------

def assignments_to_blocks(assignments: Sequence[int], n_blocks: int) -> List[List[int]]:
    """Convierte etiquetas columna -> nodo en bloques ordenados.

    Cada bloque conserva el orden en que aparecen sus columnas en
    ``assignments``; las etiquetas -1 se ignoran.
    """
    groups: Dict[int, List[int]] = {k: [] for k in range(n_blocks)}
    for col, label in enumerate(assignments):
        if label == UNASSIGNED:
            continue
        if not 0 <= label < n_blocks:
            raise ConfigError(f"etiqueta {label} fuera de [0, {n_blocks})")
        groups[int(label)].append(col)
    return [groups[k] for k in range(n_blocks)]


@dataclass(frozen=True, eq=False)
class Partition:
    n: int
    blocks: Tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        blocks = tuple(np.asarray(b, dtype=np.int64) for b in self.blocks)
        seen = np.zeros(self.n, dtype=bool)
        for k, block in enumerate(blocks):
            if block.size and (block.min() < 0 or block.max() >= self.n):
                raise ConfigError(f"bloque {k} con columnas fuera de [0, {self.n})")
            if np.any(seen[block]) or np.unique(block).size != block.size:
                raise ColumnCollisionError(f"el bloque {k} repite columnas ya asignadas")
            seen[block] = True
            block.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_blocks(cls, n: int, blocks: Sequence[Sequence[int]]) -> "Partition":
        return cls(n, tuple(np.asarray(b, dtype=np.int64) for b in blocks))

    @classmethod
    def from_assignments(cls, assignments: Sequence[int], n_blocks: int) -> "Partition":
        return cls.from_blocks(len(assignments), assignments_to_blocks(assignments, n_blocks))

    @property
    def K(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> List[int]:
        return [int(b.size) for b in self.blocks]

    @property
    def assignments(self) -> np.ndarray:
        out = np.full(self.n, UNASSIGNED, dtype=np.int64)
        for k, block in enumerate(self.blocks):
            out[block] = k
        return out

    @property
    def unassigned(self) -> np.ndarray:
        return np.flatnonzero(self.assignments == UNASSIGNED)

    def covers(self) -> bool:
        """Bloques disjuntos (garantizado al construir) cuya unión es [0, n)."""
        return sum(self.sizes) == self.n

    def with_block(self, columns: Sequence[int]) -> "Partition":
        """Añade un bloque nuevo al final; falla si alguna columna ya tiene dueño."""
        cols = np.asarray(columns, dtype=np.int64)
        if cols.size and (cols.min() < 0 or cols.max() >= self.n):
            raise ConfigError(f"columnas fuera de [0, {self.n})")
        taken = self.assignments[cols] != UNASSIGNED if cols.size else np.zeros(0, dtype=bool)
        if np.any(taken):
            raise ColumnCollisionError(
                f"columnas ya asignadas: {cols[taken].tolist()[:10]}"
            )
        return Partition(self.n, self.blocks + (cols,))


def partition_columns(n: int, K: int, seed: int, *, shuffle: bool = True) -> Partition:
    """Baraja las columnas una vez y las reparte en K bloques contiguos.

    Tamaños ⌈n/K⌉ para los primeros ``n mod K`` nodos y ⌊n/K⌋ para el
    resto (los bloques grandes van a los ids bajos; la elección es arbitraria).
    """
    if K < 1:
        raise ConfigError(f"K debe ser >= 1 (K={K})")
    if n < K:
        raise ConfigError(f"hay menos columnas que nodos: n={n} < K={K}")
    order = np.arange(n, dtype=np.int64)
    if shuffle:
        order = shuffle_generator(seed).permutation(n)
    return Partition(n, tuple(np.array_split(order, K)))
