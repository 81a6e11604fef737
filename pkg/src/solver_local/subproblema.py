"""Subproblema cuadrático local de un nodo y su solver por coordenadas.

    G_k(Δx) = (1/K) f(v′) + ∇f(v′)ᵀ A_[k]Δx + (σ′/(2τ)) ‖A_[k]Δx‖²
              + Σ_{i∈P_k} g_i(x_i + Δx_i)

Se minimiza con descenso por coordenadas exacto; la caché r = A_[k]Δx se
actualiza en O(nnz(A_i)) por paso.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from datos.matriz import SparseColMatrix
from errores import ConfigError
from problema.especificacion import ProblemSpec

__all__ = [
    "Sampling",
    "SolverBudget",
    "SubproblemView",
    "coordinate_update",
    "apply_updates",
    "solve_subproblem",
    "exact_subproblem_solution",
    "measure_theta",
    "node_stream",
]

logger = logging.getLogger(__name__)

# cada cuántas actualizaciones se recalcula r desde cero
REFRESH_EVERY = 1000


class Sampling(str, Enum):
    UNIFORM = "uniform"          # con reemplazo
    PERMUTATION = "permutation"  # un barrido por pasada


@dataclass(frozen=True)
class SolverBudget:
    kappa: int = 1
    sampling: Sampling = Sampling.UNIFORM

    def __post_init__(self) -> None:
        if isinstance(self.kappa, bool) or int(self.kappa) != self.kappa or self.kappa < 1:
            raise ConfigError(f"κ debe ser un entero >= 1, llegó {self.kappa}")
        object.__setattr__(self, "kappa", int(self.kappa))
        object.__setattr__(self, "sampling", Sampling(self.sampling))


def node_stream(seed: int, k: int) -> np.random.Generator:
    """Flujo PCG64 propio del nodo k: no depende del orden de los workers."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k,))))


@dataclass(eq=False)
class SubproblemView:
    problem: ProblemSpec
    block: np.ndarray
    block_matrix: SparseColMatrix
    anchor_grad: np.ndarray
    f_share: float
    sigma_prime: float
    x_block: np.ndarray
    delta: np.ndarray = field(init=False)
    r: np.ndarray = field(init=False)
    updates: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        self.block = np.asarray(self.block, dtype=np.int64)
        self.x_block = np.asarray(self.x_block, dtype=np.float64)
        self.delta = np.zeros(self.block.size)
        self.r = np.zeros(self.problem.d)
        self._columns: List[Tuple[np.ndarray, np.ndarray]] = self.block_matrix.columns()
        self._norms_sq = self.problem.column_norms_sq[self.block]
        self._pos: Optional[Dict[int, int]] = None

    @classmethod
    def build(
        cls,
        problem: ProblemSpec,
        block: Sequence[int],
        v_anchor: np.ndarray,
        x_block: np.ndarray,
        sigma_prime: float,
        K: int,
        block_matrix: Optional[SparseColMatrix] = None,
    ) -> "SubproblemView":
        """Vista anclada en v′ (el v_k ya mezclado)."""
        block = np.asarray(block, dtype=np.int64)
        if sigma_prime <= 0:
            raise ConfigError(f"σ′ debe ser > 0, llegó {sigma_prime}")
        sub = problem.matrix.select(block) if block_matrix is None else block_matrix
        return cls(
            problem=problem,
            block=block,
            block_matrix=sub,
            anchor_grad=problem.f_grad(v_anchor),
            f_share=problem.f_eval(v_anchor) / K,
            sigma_prime=float(sigma_prime),
            x_block=np.array(x_block, dtype=np.float64),
        )

    @property
    def n_k(self) -> int:
        return int(self.block.size)

    @property
    def coef(self) -> float:
        """σ′/τ."""
        return self.sigma_prime / self.problem.tau

    def position(self, i: int) -> int:
        if self._pos is None:
            self._pos = {int(c): j for j, c in enumerate(self.block)}
        try:
            return self._pos[int(i)]
        except KeyError:
            raise ConfigError(f"la columna {i} no pertenece al bloque") from None

    def refresh_residual(self) -> None:
        self.r = self.block_matrix.matvec(self.delta)

    def residual_drift(self) -> float:
        """Error relativo de la caché r frente a A_[k]Δx recalculado."""
        exact = self.block_matrix.matvec(self.delta)
        return float(np.linalg.norm(self.r - exact) / max(np.linalg.norm(exact), 1e-300))

    def objective(self, delta: Optional[np.ndarray] = None) -> float:
        """G_k(Δx); sin argumento evalúa el Δx actual."""
        delta = self.delta if delta is None else np.asarray(delta, dtype=np.float64)
        u = self.block_matrix.matvec(delta)
        g = self.problem.separable.values(self.x_block + delta, self.block)
        return float(
            self.f_share
            + self.anchor_grad @ u
            + 0.5 * self.coef * float(u @ u)
            + np.sum(g)
        )


def _update_at(view: SubproblemView, j: int) -> float:
    idx, vals = view._columns[j]
    i = int(view.block[j])
    sep = view.problem.separable
    a = view.coef * view._norms_sq[j]
    u0 = view.x_block[j] + view.delta[j]
    if a > 0.0:
        c = float(vals @ (view.anchor_grad[idx] + view.coef * view.r[idx]))
        y = sep.prox_at(i, u0 - c / a, 1.0 / a)
    else:
        # columna nula: sólo cuenta g_i
        y = sep.minimizer_at(i)
    step = y - u0
    if step != 0.0:
        view.delta[j] += step
        view.r[idx] += step * vals
    view.updates += 1
    if view.updates % REFRESH_EVERY == 0:
        view.refresh_residual()
    return float(view.delta[j])


def apply_updates(view: SubproblemView, order) -> None:
    """Actualiza las posiciones locales de ``order`` en ese orden."""
    for j in order:
        _update_at(view, int(j))


def coordinate_update(view: SubproblemView, i: int) -> float:
    """Minimiza G_k exactamente en la coordenada global i ∈ P_k.

    Con a = σ′‖A_i‖²/τ y c = ⟨∇f(v′) + (σ′/τ) r, A_i⟩ el paso resuelve
    min_δ cδ + (a/2)δ² + g_i(x_i + Δ_i + δ), es decir
    x_i + Δ_i + δ = prox_{g_i/a}(x_i + Δ_i − c/a). Devuelve el nuevo Δ_i.
    """
    return _update_at(view, view.position(i))


def solve_subproblem(
    view: SubproblemView,
    budget: SolverBudget,
    rng: np.random.Generator,
) -> np.ndarray:
    """κ·n_k actualizaciones con coordenadas sorteadas del flujo del nodo.

    Los índices se sortean por pasadas de n_k, así que las primeras pasadas
    de un presupuesto mayor coinciden con las de uno menor.
    """
    n_k = view.n_k
    if n_k == 0:
        return view.delta.copy()
    for _ in range(budget.kappa):
        if budget.sampling is Sampling.UNIFORM:
            order = rng.integers(0, n_k, size=n_k)
        else:
            order = rng.permutation(n_k)
        apply_updates(view, order)
    return view.delta.copy()


# -------------------------------------------------------------
# Oráculo denso y medida de Θ (sólo diagnóstico y pruebas)
# -------------------------------------------------------------

def exact_subproblem_solution(
    view: SubproblemView, *, tol: float = 1e-14, max_iter: int = 200_000
) -> np.ndarray:
    """Δx★ por gradiente proximal acelerado (FISTA) sobre la forma densa."""
    M = view.block_matrix.to_dense()
    sep = view.problem.separable
    x0 = view.x_block
    if view.n_k == 0:
        return np.zeros(0)
    Lip = view.coef * float(np.linalg.eigvalsh(M.T @ M)[-1])
    if Lip <= 0.0:
        return sep.minimizers(view.block) - x0
    step = 1.0 / Lip

    def grad(y: np.ndarray) -> np.ndarray:
        return M.T @ (view.anchor_grad + view.coef * (M @ (y - x0)))

    y = x0.copy()
    z = y.copy()
    t = 1.0
    for _ in range(max_iter):
        y_new = sep.prox(z - step * grad(z), step, view.block)
        if view.objective(y_new - x0) > view.objective(y - x0):
            if t == 1.0:
                break  # ni el paso proximal simple mejora: convergido
            # reinicio adaptativo
            z, t = y.copy(), 1.0
            continue
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        z = y_new + ((t - 1.0) / t_new) * (y_new - y)
        moved = np.linalg.norm(y_new - y)
        y, t = y_new, t_new
        if moved <= tol * (1.0 + np.linalg.norm(y)):
            break
    return y - x0


OracleLike = Union[np.ndarray, Callable[[SubproblemView], np.ndarray]]


def measure_theta(view: SubproblemView, delta: np.ndarray, oracle: OracleLike = exact_subproblem_solution) -> float:
    """Θ = (G(Δx) − G(Δx★)) / (G(0) − G(Δx★)), recortado a [0, 1]."""
    star = oracle(view) if callable(oracle) else np.asarray(oracle, dtype=np.float64)
    g_star = view.objective(star)
    g_zero = view.objective(np.zeros(view.n_k))
    denom = g_zero - g_star
    if denom <= 1e-14 * (1.0 + abs(g_zero)):
        return 0.0
    theta = (view.objective(delta) - g_star) / denom
    return float(min(max(theta, 0.0), 1.0))
