"""Calendario de gossip: qué B matrices se aplican en cada ronda.

Con una sola matriz base el calendario es estático. Con varias (grafo
variable en el tiempo) se recorren cíclicamente, B pasos por ronda.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Sequence, Tuple

import numpy as np

from errores import ConfigError
from topologia.espectro import product_beta
from topologia.mezcla import MixingMatrix

__all__ = ["GossipSchedule", "gossip_schedule"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GossipSchedule:
    bases: Tuple[MixingMatrix, ...]
    B: int = 1

    def __post_init__(self) -> None:
        if self.B < 1:
            raise ConfigError(f"B debe ser >= 1 (B={self.B})")
        if not self.bases:
            raise ConfigError("el calendario necesita al menos una matriz")
        Ks = {W.K for W in self.bases}
        if len(Ks) != 1:
            raise ConfigError(f"matrices de tamaños distintos: {sorted(Ks)}")
        object.__setattr__(self, "bases", tuple(self.bases))

    @property
    def K(self) -> int:
        return self.bases[0].K

    @property
    def static(self) -> bool:
        return len(self.bases) == 1

    def matrices_for_round(self, t: int) -> List[np.ndarray]:
        """Las B matrices de la ronda t, en orden de aplicación."""
        m = len(self.bases)
        return [self.bases[(t * self.B + j) % m].weights for j in range(self.B)]

    def round_product(self, t: int) -> np.ndarray:
        P = np.eye(self.K)
        for W in self.matrices_for_round(t):
            P = W @ P
        return P

    @cached_property
    def effective_beta(self) -> float:
        """Peor contracción por ronda sobre todos los desfases del ciclo."""
        m = len(self.bases)
        if self.static:
            return float(self.bases[0].beta ** self.B)
        # el patrón de desfases se repite con periodo m
        return max(product_beta(self.matrices_for_round(t)) for t in range(m))


def gossip_schedule(bases: Sequence[MixingMatrix], B: int = 1) -> GossipSchedule:
    schedule = GossipSchedule(tuple(bases), B)
    logger.debug("calendario: %d matrices base, B=%d", len(schedule.bases), B)
    return schedule
