"""Parte separable g(x) = Σ g_i(x_i).

Dos tipos:

- ``L1_BOUNDED``: g_i(u) = λ|u| si |u| ≤ L, +∞ fuera. Su conjugada
  g_i*(s) = L·max(0, |s| − λ) es L-Lipschitz (truco de Lipschitz).
- ``L2_QUADRATIC``: g_i(u) = (ω/2)u² − c_i u, con conjugada
  g_i*(s) = (s + c_i)²/(2ω). Es ω-fuertemente convexa.

Las funciones vectorizadas (``values``, ``conj_values``, ``prox``) aceptan
arrays de coordenadas; las escalares (``value``, ``conj_at``, ``prox_at``)
una sola coordenada ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from errores import ConfigError, DimensionError

__all__ = ["SeparableKind", "SeparablePart", "soft_threshold"]

ArrayLike = Union[float, np.ndarray]


class SeparableKind(str, Enum):
    L1_BOUNDED = "l1-bounded"
    L2_QUADRATIC = "l2-quadratic"


def soft_threshold(z: ArrayLike, t: float) -> ArrayLike:
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


@dataclass(frozen=True, eq=False)
class SeparablePart:
    kind: SeparableKind
    n: int
    weight: float
    linear: Optional[np.ndarray] = None
    radius: Optional[float] = None

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise ConfigError(f"el peso debe ser >= 0, llegó {self.weight}")
        if self.kind is SeparableKind.L1_BOUNDED:
            if self.radius is None or self.radius <= 0:
                raise ConfigError(f"L1 acotada necesita radio L > 0, llegó {self.radius}")
        elif self.weight <= 0:
            raise ConfigError("la cuadrática necesita ω > 0")
        if self.linear is not None:
            lin = np.array(self.linear, dtype=np.float64)
            if lin.shape != (self.n,):
                raise DimensionError(f"término lineal de forma {lin.shape}, se esperaba ({self.n},)")
            lin.setflags(write=False)
            object.__setattr__(self, "linear", lin)

    @classmethod
    def l1_bounded(cls, n: int, lam: float, radius: float) -> "SeparablePart":
        return cls(SeparableKind.L1_BOUNDED, n, float(lam), None, float(radius))

    @classmethod
    def l2_quadratic(cls, n: int, omega: float = 1.0, linear: Optional[np.ndarray] = None) -> "SeparablePart":
        return cls(SeparableKind.L2_QUADRATIC, n, float(omega), linear, None)

    @property
    def strong_convexity(self) -> float:
        return self.weight if self.kind is SeparableKind.L2_QUADRATIC else 0.0

    @property
    def bounded_support(self) -> bool:
        return self.kind is SeparableKind.L1_BOUNDED

    def _lin(self, i) -> ArrayLike:
        if self.linear is None:
            return 0.0 if np.ndim(i) == 0 else np.zeros(np.shape(i))
        return self.linear[i]

    # ---------------------------------------------------------
    # Vectorizadas: ``idx`` selecciona coordenadas (None = todas)
    # ---------------------------------------------------------

    def values(self, u: np.ndarray, idx: Optional[np.ndarray] = None) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        idx = np.arange(u.size) if idx is None else idx
        if self.kind is SeparableKind.L1_BOUNDED:
            out = self.weight * np.abs(u)
            # holgura relativa para no castigar redondeos del clamp
            return np.where(np.abs(u) <= self.radius * (1 + 1e-12), out, np.inf)
        return 0.5 * self.weight * u * u - self._lin(idx) * u

    def conj_values(self, s: np.ndarray, idx: Optional[np.ndarray] = None) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        idx = np.arange(s.size) if idx is None else idx
        if self.kind is SeparableKind.L1_BOUNDED:
            return self.radius * np.maximum(0.0, np.abs(s) - self.weight)
        t = s + self._lin(idx)
        return t * t / (2.0 * self.weight)

    def prox(self, z: np.ndarray, step: ArrayLike, idx: Optional[np.ndarray] = None) -> np.ndarray:
        """argmin_y g(y) + (1/(2·step))(y − z)², coordenada a coordenada."""
        z = np.asarray(z, dtype=np.float64)
        if np.any(np.asarray(step) <= 0):
            raise ConfigError("el paso del prox debe ser > 0")
        idx = np.arange(z.size) if idx is None else idx
        if self.kind is SeparableKind.L1_BOUNDED:
            # umbral suave y luego recorte: prox exacto de λ|·| + indicadora de [−L, L]
            return np.clip(soft_threshold(z, step * self.weight), -self.radius, self.radius)
        return (z + step * self._lin(idx)) / (1.0 + step * self.weight)

    def minimizers(self, idx: np.ndarray) -> np.ndarray:
        if self.kind is SeparableKind.L1_BOUNDED:
            return np.zeros(np.shape(idx))
        return self._lin(idx) / self.weight

    def total(self, x: np.ndarray) -> float:
        return float(np.sum(self.values(x)))

    # ---------------------------------------------------------
    # Escalares
    # ---------------------------------------------------------

    def value(self, i: int, u: float) -> float:
        if self.kind is SeparableKind.L1_BOUNDED:
            return self.weight * abs(u) if abs(u) <= self.radius * (1 + 1e-12) else float("inf")
        return 0.5 * self.weight * u * u - float(self._lin(i)) * u

    def conj_at(self, i: int, s: float) -> float:
        if self.kind is SeparableKind.L1_BOUNDED:
            return self.radius * max(0.0, abs(s) - self.weight)
        t = s + float(self._lin(i))
        return t * t / (2.0 * self.weight)

    def prox_at(self, i: int, z: float, step: float) -> float:
        if step <= 0:
            raise ConfigError("el paso del prox debe ser > 0")
        if self.kind is SeparableKind.L1_BOUNDED:
            t = step * self.weight
            y = z - t if z > t else (z + t if z < -t else 0.0)
            return min(max(y, -self.radius), self.radius)
        return (z + step * float(self._lin(i))) / (1.0 + step * self.weight)

    def minimizer_at(self, i: int) -> float:
        if self.kind is SeparableKind.L1_BOUNDED:
            return 0.0
        return float(self._lin(i)) / self.weight
