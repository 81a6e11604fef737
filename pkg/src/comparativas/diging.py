"""DIGing (seguimiento de gradiente) para ridge repartido por muestras.

Objetivo local del nodo k:

    F_k(w) = (λ/(2K))‖w‖² + ½ Σ_{i∈P_k} (A_iᵀw − b_i)²

Iteración (una fila por nodo):

    w ← W w − α y
    y ← W y + ∇F(w_nuevo) − ∇F(w_viejo)

con y⁰ = ∇F(w⁰), de modo que (1/K)Σ y_k sigue la media de los gradientes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from datos.particion import Partition
from errores import ConfigError, DivergenceError
from problema.especificacion import Formulation, ProblemSpec
from problema.separable import SeparableKind

__all__ = [
    "RidgeSplit",
    "DigingState",
    "DigingResult",
    "diging_init",
    "diging_step",
    "run_diging",
    "grid_search_alpha",
]

logger = logging.getLogger(__name__)

DIVERGENCE_FACTOR = 10.0


@dataclass(frozen=True, eq=False)
class RidgeSplit:
    """Ridge en w ∈ R^d con las muestras (columnas de A) repartidas en K nodos."""

    problem: ProblemSpec
    partition: Partition

    def __post_init__(self) -> None:
        p = self.problem
        if p.training_form is not Formulation.B or p.separable.kind is not SeparableKind.L2_QUADRATIC:
            raise ConfigError("DIGing sólo se aplica a ridge en orientación primal (objetivo suave)")
        if self.partition.n != p.n:
            raise ConfigError(f"la partición cubre n={self.partition.n}, el problema n={p.n}")
        blocks = [p.matrix.select(b) for b in self.partition.blocks]
        object.__setattr__(self, "_blocks", blocks)
        b = p.separable.linear if p.separable.linear is not None else np.zeros(p.n)
        object.__setattr__(self, "_targets", [b[blk] for blk in self.partition.blocks])

    @property
    def K(self) -> int:
        return self.partition.K

    @property
    def lam(self) -> float:
        return self.problem.tau

    def local_gradients(self, Wk: np.ndarray) -> np.ndarray:
        """Pila K×d con ∇F_k(w_k)."""
        out = np.empty_like(Wk)
        for k, (M, bk) in enumerate(zip(self._blocks, self._targets)):
            out[k] = (self.lam / self.K) * Wk[k] + M.matvec(M.rmatvec(Wk[k]) - bk)
        return out

    def objective(self, w: np.ndarray) -> float:
        """Σ_k F_k(w) = (λ/2)‖w‖² + ½‖Aᵀw − b‖², igual a F_B(w)."""
        return self.problem.dual_objective(w)


@dataclass(frozen=True, eq=False)
class DigingState:
    w: np.ndarray
    y: np.ndarray
    grad: np.ndarray
    alpha: float
    step: int = 0

    @property
    def mean(self) -> np.ndarray:
        return self.w.mean(axis=0)


def diging_init(split: RidgeSplit, alpha: float, w0: Optional[np.ndarray] = None) -> DigingState:
    if alpha <= 0:
        raise ConfigError(f"α debe ser > 0, llegó {alpha}")
    d = split.problem.d
    w = np.zeros((split.K, d)) if w0 is None else np.array(w0, dtype=np.float64)
    grad = split.local_gradients(w)
    return DigingState(w=w, y=grad.copy(), grad=grad, alpha=float(alpha))


def diging_step(state: DigingState, W: np.ndarray, split: RidgeSplit) -> DigingState:
    w_new = W @ state.w - state.alpha * state.y
    grad_new = split.local_gradients(w_new)
    y_new = W @ state.y + grad_new - state.grad
    return replace(state, w=w_new, y=y_new, grad=grad_new, step=state.step + 1)


@dataclass
class DigingResult:
    alpha: float
    objective: List[float] = field(default_factory=list)
    diverged: bool = False
    state: Optional[DigingState] = None

    @property
    def w(self) -> np.ndarray:
        return self.state.mean

    def suboptimality(self, f_star: float) -> np.ndarray:
        return (np.asarray(self.objective) - f_star) / max(abs(f_star), 1e-300)


def run_diging(split: RidgeSplit, W: np.ndarray, alpha: float, steps: int) -> DigingResult:
    """``steps`` iteraciones; registra el objetivo en la media de los w_k.

    Se corta en cuanto el objetivo supera 10 veces el inicial o deja de ser
    finito.
    """
    W = np.asarray(W, dtype=np.float64)
    state = diging_init(split, alpha)
    f0 = split.objective(state.mean)
    result = DigingResult(alpha=float(alpha), objective=[f0], state=state)
    limit = DIVERGENCE_FACTOR * max(abs(f0), 1e-300)
    for _ in range(steps):
        state = diging_step(state, W, split)
        f = split.objective(state.mean)
        result.objective.append(f)
        result.state = state
        if not math.isfinite(f) or f > limit:
            result.diverged = True
            logger.debug("α=%g diverge en el paso %d", alpha, state.step)
            break
    return result


def grid_search_alpha(
    split: RidgeSplit,
    W: np.ndarray,
    candidates: Sequence[float],
    budget: int,
    f_star: Optional[float] = None,
) -> float:
    """El α con menor subóptimo tras ``budget`` pasos, sin contar los que divergen."""
    if not candidates:
        raise ConfigError("la lista de α candidatos está vacía")
    best_alpha, best_value = None, math.inf
    for alpha in candidates:
        res = run_diging(split, W, alpha, budget)
        if res.diverged:
            continue
        value = res.objective[-1] if f_star is None else res.objective[-1] - f_star
        logger.debug("α=%g: objetivo final %.12g", alpha, res.objective[-1])
        if value < best_value:
            best_alpha, best_value = float(alpha), value
    if best_alpha is None:
        raise DivergenceError(f"todos los α divergen: {list(candidates)}")
    logger.info("α elegido por rejilla: %g", best_alpha)
    return best_alpha
