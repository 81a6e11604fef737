"""El par (f, {g_i}) sobre una matriz de columnas, y sus objetivos.

F_A(x) = f(Ax) + Σ g_i(x_i)
F_B(w) = f*(w) + Σ g_i*(−A_iᵀw)
H_A(x, {v_k}) = (1/K) Σ_k f(v_k) + g(x)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from datos.matriz import SparseColMatrix, transpose
from errores import ConfigError, DimensionError
from problema.separable import SeparableKind, SeparablePart
from problema.suave import SmoothPart

__all__ = [
    "Formulation",
    "RidgeOrientation",
    "ProblemSpec",
    "make_lasso",
    "make_ridge",
    "default_radius",
    "lasso_lambda_max",
]

logger = logging.getLogger(__name__)

RADIUS_CAP = 1e6


class Formulation(str, Enum):
    """Cuál de las dos formulaciones es el problema de entrenamiento."""

    A = "A"
    B = "B"


class RidgeOrientation(str, Enum):
    PRIMAL = "primal"  # columnas = muestras, CoLa corre sobre la dual de ridge
    DUAL = "dual"      # columnas = características de Aᵀ


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    name: str
    matrix: SparseColMatrix
    smooth: SmoothPart
    separable: SeparablePart
    training_form: Formulation

    def __post_init__(self) -> None:
        if self.smooth.dim != self.matrix.n_rows:
            raise DimensionError(f"f vive en R^{self.smooth.dim} pero A tiene {self.matrix.n_rows} filas")
        if self.separable.n != self.matrix.n_cols:
            raise DimensionError(f"g tiene {self.separable.n} coordenadas pero A tiene {self.matrix.n_cols} columnas")
        object.__setattr__(self, "_col_norms_sq", self.matrix.column_norms_sq())

    # ---------------------------------------------------------
    # Atajos
    # ---------------------------------------------------------

    @property
    def d(self) -> int:
        return self.matrix.n_rows

    @property
    def n(self) -> int:
        return self.matrix.n_cols

    @property
    def tau(self) -> float:
        return self.smooth.tau

    @property
    def mu_g(self) -> float:
        return self.separable.strong_convexity

    @property
    def radius(self) -> Optional[float]:
        return self.separable.radius

    @property
    def column_norms_sq(self) -> np.ndarray:
        return self._col_norms_sq

    # ---------------------------------------------------------
    # f y g
    # ---------------------------------------------------------

    def f_eval(self, v: np.ndarray) -> float:
        return self.smooth.value(v)

    def f_grad(self, v: np.ndarray) -> np.ndarray:
        return self.smooth.grad(v)

    def f_conj(self, w: np.ndarray) -> float:
        return self.smooth.conj(w)

    def g_eval(self, i: int, u: float) -> float:
        return self.separable.value(i, u)

    def g_prox(self, i: int, z: float, step: float) -> float:
        return self.separable.prox_at(i, z, step)

    def g_conj(self, i: int, s: float) -> float:
        return self.separable.conj_at(i, s)

    # ---------------------------------------------------------
    # Objetivos
    # ---------------------------------------------------------

    def _check_x(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise DimensionError(f"x tiene forma {x.shape}, se esperaba ({self.n},)")
        return x

    def primal_objective(self, x: np.ndarray, Ax: Optional[np.ndarray] = None) -> float:
        """F_A(x)."""
        x = self._check_x(x)
        Ax = self.matrix.matvec(x) if Ax is None else Ax
        return self.f_eval(Ax) + self.separable.total(x)

    def dual_objective(self, w: np.ndarray) -> float:
        """F_B(w)."""
        s = -self.matrix.rmatvec(w)
        return self.f_conj(w) + float(np.sum(self.separable.conj_values(s)))

    def duality_gap(self, x: np.ndarray, Ax: Optional[np.ndarray] = None) -> float:
        """Brecha centralizada de CoCoA: F_A(x) + F_B(∇f(Ax))."""
        x = self._check_x(x)
        Ax = self.matrix.matvec(x) if Ax is None else Ax
        return self.primal_objective(x, Ax) + self.dual_objective(self.f_grad(Ax))

    def decentralized_objective(self, x: np.ndarray, vs: np.ndarray) -> float:
        """H_A(x, {v_k}) con ``vs`` de forma K×d."""
        vs = np.atleast_2d(np.asarray(vs, dtype=np.float64))
        fs = np.array([self.f_eval(v) for v in vs])
        return float(np.mean(fs)) + self.separable.total(self._check_x(x))

    def ridge_model(self, x: np.ndarray) -> np.ndarray:
        """Modelo de ridge w en el espacio de características."""
        if self.training_form is Formulation.B:
            return self.f_grad(self.matrix.matvec(x))
        return np.array(x, dtype=np.float64)


# -------------------------------------------------------------
# Constructores
# -------------------------------------------------------------

def lasso_lambda_max(A: SparseColMatrix, b: np.ndarray) -> float:
    """Menor λ con solución nula: ‖Aᵀb‖_∞."""
    return float(np.max(np.abs(A.rmatvec(np.asarray(b, dtype=np.float64))))) if A.n_cols else 0.0


def default_radius(A: SparseColMatrix, b: np.ndarray, lam: float) -> float:
    """Sobreestimación calculable de ‖x★‖_∞: ‖b‖²/(λ·min_i‖A_i‖²), tope 1e6.

    Cualquier L > ‖x★‖_∞ deja el problema intacto.
    """
    norms = A.column_norms_sq()
    nonzero = norms[norms > 0]
    if nonzero.size == 0 or lam <= 0:
        return RADIUS_CAP
    b = np.asarray(b, dtype=np.float64)
    return float(min(float(b @ b) / (lam * nonzero.min()), RADIUS_CAP)) or RADIUS_CAP


def make_lasso(A: SparseColMatrix, b: np.ndarray, lam: float, radius: Optional[float] = None) -> ProblemSpec:
    """Lasso sobre (A): f = ½‖· − b‖², g_i = λ|·| con soporte L-acotado."""
    if lam <= 0:
        raise ConfigError(f"λ debe ser > 0, llegó {lam}")
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (A.n_rows,):
        raise DimensionError(f"b tiene forma {b.shape}, se esperaba ({A.n_rows},)")
    L = default_radius(A, b, lam) if radius is None else float(radius)
    if L <= 0:
        raise ConfigError(f"L debe ser > 0, llegó {L}")
    logger.info("Lasso: d=%d n=%d λ=%.3g L=%.3g", A.n_rows, A.n_cols, lam, L)
    return ProblemSpec(
        name="lasso",
        matrix=A,
        smooth=SmoothPart.least_squares(b),
        separable=SeparablePart.l1_bounded(A.n_cols, lam, L),
        training_form=Formulation.A,
    )


def make_ridge(
    A: SparseColMatrix,
    b: np.ndarray,
    lam: float,
    orientation: RidgeOrientation = RidgeOrientation.PRIMAL,
) -> ProblemSpec:
    """Ridge min_w (λ/2)‖w‖² + ½‖Aᵀw − b‖², con A de columnas = muestras.

    ``primal``: CoLa sobre las columnas-muestra con f(v) = (1/(2λ))‖v‖²
    (τ = λ) y g_i(u) = ½u² − b_i u; el modelo es w = ∇f(Ax).
    ``dual``: CoLa sobre las columnas-característica de Aᵀ con
    f(u) = (1/(2λ))‖u − b‖² y g_j(w_j) = ½w_j², es decir el objetivo ridge
    dividido por λ: μ_g = 1 y F_A★·λ es el óptimo ridge. El modelo es x.
    """
    if lam <= 0:
        raise ConfigError(f"λ debe ser > 0, llegó {lam}")
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (A.n_cols,):
        raise DimensionError(f"b tiene forma {b.shape}, se esperaba ({A.n_cols},)")
    orientation = RidgeOrientation(orientation)
    if orientation is RidgeOrientation.PRIMAL:
        return ProblemSpec(
            name="ridge-primal",
            matrix=A,
            smooth=SmoothPart.scaled_quadratic(A.n_rows, lam),
            separable=SeparablePart.l2_quadratic(A.n_cols, 1.0, b),
            training_form=Formulation.B,
        )
    At = transpose(A)
    return ProblemSpec(
        name="ridge-dual",
        matrix=At,
        smooth=SmoothPart.least_squares(b, tau=lam),
        separable=SeparablePart.l2_quadratic(At.n_cols, 1.0, None),
        training_form=Formulation.A,
    )


def is_bounded_support(problem: ProblemSpec) -> bool:
    return problem.separable.kind is SeparableKind.L1_BOUNDED
