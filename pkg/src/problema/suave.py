"""Parte suave f del objetivo y su conjugada.

Ambos tipos soportados son cuadráticos: f(v) = (1/(2τ))‖v − b‖², con b = 0
para la cuadrática escalada. Entonces ∇f(v) = (v − b)/τ y
f*(w) = (τ/2)‖w‖² + ⟨w, b⟩.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from errores import ConfigError, DimensionError

__all__ = ["SmoothKind", "SmoothPart"]


class SmoothKind(str, Enum):
    LEAST_SQUARES = "least-squares"        # (1/(2τ))‖v − b‖², τ = 1 salvo ridge dual
    SCALED_QUADRATIC = "scaled-quadratic"  # (1/(2τ))‖v‖²


@dataclass(frozen=True, eq=False)
class SmoothPart:
    kind: SmoothKind
    dim: int
    tau: float
    offset: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ConfigError(f"τ debe ser > 0, llegó {self.tau}")
        if self.offset is not None:
            off = np.array(self.offset, dtype=np.float64)
            if off.shape != (self.dim,):
                raise DimensionError(f"b tiene forma {off.shape}, se esperaba ({self.dim},)")
            off.setflags(write=False)
            object.__setattr__(self, "offset", off)

    @classmethod
    def least_squares(cls, b: np.ndarray, tau: float = 1.0) -> "SmoothPart":
        b = np.asarray(b, dtype=np.float64)
        return cls(SmoothKind.LEAST_SQUARES, b.size, float(tau), b)

    @classmethod
    def scaled_quadratic(cls, dim: int, tau: float) -> "SmoothPart":
        return cls(SmoothKind.SCALED_QUADRATIC, dim, float(tau), None)

    @property
    def smoothness(self) -> float:
        """Constante de Lipschitz de ∇f, 1/τ."""
        return 1.0 / self.tau

    def _check(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        if v.shape[-1:] != (self.dim,):
            raise DimensionError(f"vector de dimensión {v.shape[-1:]} para f sobre R^{self.dim}")
        return v

    def _shift(self, v: np.ndarray) -> np.ndarray:
        return v if self.offset is None else v - self.offset

    def value(self, v: np.ndarray) -> float:
        r = self._shift(self._check(v))
        return float(r @ r) / (2.0 * self.tau)

    def grad(self, v: np.ndarray) -> np.ndarray:
        """Admite un vector o una pila K×d (una fila por nodo)."""
        return self._shift(self._check(v)) / self.tau

    def conj(self, w: np.ndarray) -> float:
        w = self._check(w)
        val = 0.5 * self.tau * float(w @ w)
        if self.offset is not None:
            val += float(w @ self.offset)
        return val
