"""Lectura de trazas: subóptimo relativo, rondas hasta un objetivo, ajuste
de la tasa lineal y comparación CoLa contra DIGing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from comparativas.diging import DigingResult
from errores import ConfigError
from motor.cola import RunTrace

__all__ = [
    "relative_suboptimality",
    "trace_suboptimality",
    "rounds_to_target",
    "LinearFit",
    "linear_rate_fit",
    "Comparison",
    "compare_with_diging",
]

# por debajo de esto el subóptimo es ruido de redondeo
SUBOPT_FLOOR = 1e-14


def relative_suboptimality(values: Sequence[float], f_star: float) -> np.ndarray:
    """(F − F★)/|F★|; con F★ = 0 queda la diferencia absoluta."""
    values = np.asarray(values, dtype=np.float64)
    scale = abs(f_star) if f_star != 0.0 else 1.0
    return (values - f_star) / scale


def trace_suboptimality(trace: RunTrace, f_star: float, column: str = "FA") -> np.ndarray:
    return relative_suboptimality(trace.column(column), f_star)


def rounds_to_target(subopt: Sequence[float], target: float, rounds: Optional[Sequence[int]] = None) -> Optional[int]:
    """Primera ronda con subóptimo ≤ target, o None si no llega."""
    subopt = np.asarray(subopt, dtype=np.float64)
    hit = np.flatnonzero(subopt <= target)
    if hit.size == 0:
        return None
    i = int(hit[0])
    return int(rounds[i]) if rounds is not None else i


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float
    points: int

    @property
    def rate(self) -> float:
        """Factor de contracción por ronda, 10**slope."""
        return float(10.0 ** self.slope)


def linear_rate_fit(subopt: Sequence[float], *, tail: float = 0.5, floor: float = SUBOPT_FLOOR) -> LinearFit:
    """Recta por mínimos cuadrados de log10(subóptimo) contra la ronda sobre
    la última fracción ``tail`` de la traza.

    La traza se corta en el primer punto que cae bajo ``floor``.
    """
    if not 0.0 < tail <= 1.0:
        raise ConfigError(f"tail debe estar en (0, 1], llegó {tail}")
    s = np.asarray(subopt, dtype=np.float64)
    below = np.flatnonzero(s <= floor)
    if below.size:
        s = s[: below[0]]
    start = int(np.floor(s.size * (1.0 - tail)))
    y = np.log10(s[start:])
    x = np.arange(start, s.size, dtype=np.float64)
    if y.size < 3:
        raise ConfigError(f"traza demasiado corta para ajustar una recta ({y.size} puntos)")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0.0 else 1.0
    return LinearFit(float(slope), float(intercept), r2, int(y.size))


@dataclass(frozen=True)
class Comparison:
    target: float
    cola_rounds: Optional[int]
    diging_rounds: Optional[int]
    cola_work: Optional[int]
    diging_work: Optional[int]

    @property
    def cola_not_slower(self) -> bool:
        if self.cola_rounds is None:
            return False
        return self.diging_rounds is None or self.diging_rounds >= self.cola_rounds


def compare_with_diging(
    trace: RunTrace,
    diging: DigingResult,
    f_star: float,
    n: int,
    *,
    target: float = 1e-4,
    diging_f_star: Optional[float] = None,
) -> Comparison:
    """Rondas y trabajo (actualizaciones de coordenada equivalentes) hasta
    ``target``. Un paso de DIGing toca cada columna una vez: n por ronda.

    CoLa se mide en F_A y DIGing en F_B; sin ``diging_f_star`` se toma
    F_B★ = −F_A★.
    """
    if diging_f_star is None:
        diging_f_star = -f_star
    rounds = trace.column("round")
    cola = rounds_to_target(trace_suboptimality(trace, f_star), target, rounds)
    dig = rounds_to_target(diging.suboptimality(diging_f_star), target)
    cola_work = None
    if cola is not None:
        # la columna updates ya es acumulada
        cola_work = int(trace.column("updates")[int(np.flatnonzero(rounds == cola)[0])])
    dig_work = None if dig is None else int(dig) * int(n)
    return Comparison(target, cola, dig, cola_work, dig_work)
