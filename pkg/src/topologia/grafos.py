# -------------------------------------------------------------
# Grafos de comunicación entre nodos
#
# Un grafo es no dirigido y sin lazos: se guarda como el conjunto de
# aristas (i, j) con i < j. Las listas de adyacencia y los grados se
# derivan de ahí.
# -------------------------------------------------------------

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from errores import ConfigError, ParseError

__all__ = [
    "GraphKind",
    "Graph",
    "build_graph",
    "graph_from_edges",
    "load_adjacency",
    "is_connected",
    "ring_matchings",
    "grid_shape",
]

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


class GraphKind(str, Enum):
    RING = "ring"
    CYCLE2 = "cycle2"
    CYCLE3 = "cycle3"
    GRID2D = "grid2d"
    COMPLETE = "complete"
    CUSTOM = "custom"


def _norm_edge(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    K: int
    edges: FrozenSet[Edge]
    kind: GraphKind = GraphKind.CUSTOM

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ConfigError(f"K debe ser >= 1 (K={self.K})")
        clean = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ConfigError(f"lazo en el nodo {i}")
            if not (0 <= i < self.K and 0 <= j < self.K):
                raise ConfigError(f"arista ({i}, {j}) fuera de [0, {self.K})")
            clean.add(_norm_edge(i, j))
        object.__setattr__(self, "edges", frozenset(clean))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        adj: List[List[int]] = [[] for _ in range(self.K)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    def neighbors(self, k: int) -> Tuple[int, ...]:
        return self.adjacency[k]

    def has_edge(self, i: int, j: int) -> bool:
        return _norm_edge(i, j) in self.edges

    def with_node(self, neighbors: Iterable[int]) -> "Graph":
        """Añade el nodo K conectado a ``neighbors``."""
        new = self.K
        extra = {_norm_edge(int(j), new) for j in neighbors}
        return Graph(self.K + 1, self.edges | frozenset(extra), GraphKind.CUSTOM)


# -------------------------------------------------------------
# Generadores estándar
# -------------------------------------------------------------

def _circulant(K: int, reach: int) -> FrozenSet[Edge]:
    edges = set()
    for i in range(K):
        for s in range(1, reach + 1):
            j = (i + s) % K
            if j != i:
                edges.add(_norm_edge(i, j))
    return frozenset(edges)


def grid_shape(K: int, rows: Optional[int] = None) -> Tuple[int, int]:
    """(filas, columnas) de la rejilla; sin ``rows`` exige K cuadrado perfecto."""
    if rows is None:
        r = math.isqrt(K)
        if r * r != K:
            raise ConfigError(f"grid2d necesita K cuadrado perfecto o 'rows' (K={K})")
        return r, r
    if rows < 1 or K % rows != 0:
        raise ConfigError(f"grid2d: {rows} filas no dividen K={K}")
    return rows, K // rows


def _grid(K: int, rows: Optional[int], wrap: bool) -> FrozenSet[Edge]:
    r, c = grid_shape(K, rows)
    edges = set()
    for a in range(r):
        for b in range(c):
            i = a * c + b
            if b + 1 < c or (wrap and c > 1):
                j = a * c + (b + 1) % c
                if j != i:
                    edges.add(_norm_edge(i, j))
            if a + 1 < r or (wrap and r > 1):
                j = ((a + 1) % r) * c + b
                if j != i:
                    edges.add(_norm_edge(i, j))
    return frozenset(edges)


def build_graph(
    kind: Union[GraphKind, str],
    K: int,
    *,
    rows: Optional[int] = None,
    wrap: bool = False,
) -> Graph:
    """Topologías estándar.

    - ring: i ↔ i±1 mod K
    - cycle2 / cycle3: cada nodo ve a sus 2 / 3 vecinos más cercanos por lado
    - grid2d: rejilla filas×columnas; sin vuelta salvo ``wrap=True`` (toro)
    - complete: todos con todos

    K = 1 da el grafo trivial sin aristas (un solo nodo no comunica).
    """
    kind = GraphKind(kind)
    if K < 1:
        raise ConfigError(f"K debe ser >= 1 (K={K})")
    if kind is GraphKind.CUSTOM:
        raise ConfigError("el grafo 'custom' se carga con load_adjacency")
    if K == 1:
        return Graph(1, frozenset(), kind)

    if kind is GraphKind.RING:
        edges = _circulant(K, 1)
    elif kind is GraphKind.CYCLE2:
        edges = _circulant(K, 2)
    elif kind is GraphKind.CYCLE3:
        edges = _circulant(K, 3)
    elif kind is GraphKind.GRID2D:
        edges = _grid(K, rows, wrap)
    else:
        edges = frozenset((i, j) for i in range(K) for j in range(i + 1, K))
    return Graph(K, edges, kind)


def graph_from_edges(K: int, edges: Iterable[Sequence[int]]) -> Graph:
    return Graph(K, frozenset(_norm_edge(int(e[0]), int(e[1])) for e in edges), GraphKind.CUSTOM)


def load_adjacency(path: Union[str, Path], K: Optional[int] = None) -> Graph:
    """Lee una arista ``i j`` por línea (0-based); ``#`` inicia comentario."""
    edges: List[Edge] = []
    top = -1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"se esperaban dos enteros, llegó {line!r}", lineno)
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"nodo no entero en {line!r}", lineno) from None
            if i < 0 or j < 0:
                raise ParseError(f"nodo negativo en {line!r}", lineno)
            edges.append((i, j))
            top = max(top, i, j)
    K = top + 1 if K is None else K
    logger.info("adyacencia %s: K=%d, %d aristas", path, K, len(edges))
    return graph_from_edges(K, edges)


def is_connected(graph: Graph) -> bool:
    """BFS desde el nodo 0."""
    if graph.K <= 1:
        return True
    adj = graph.adjacency
    seen = [False] * graph.K
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    return all(seen)


def ring_matchings(K: int) -> Tuple[Graph, Graph]:
    """Parte el anillo de K par en dos emparejamientos disjuntos.

    Ninguno es conexo por separado; su unión es el anillo.
    """
    if K < 4 or K % 2:
        raise ConfigError(f"ring_matchings necesita K par >= 4 (K={K})")
    even = frozenset(_norm_edge(2 * i, 2 * i + 1) for i in range(K // 2))
    odd = frozenset(_norm_edge(2 * i + 1, (2 * i + 2) % K) for i in range(K // 2))
    return Graph(K, even, GraphKind.CUSTOM), Graph(K, odd, GraphKind.CUSTOM)
