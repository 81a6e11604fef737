"""Generador de regresiones dispersas sintéticas (sustituto a escala de escritorio)."""

from __future__ import annotations

from typing import Tuple, Union

import numpy as np

from datos.matriz import SparseColMatrix
from datos.particion import shuffle_generator
from errores import ConfigError

__all__ = ["synthesize_regression"]


def synthesize_regression(
    d: int,
    n: int,
    density: float,
    noise: float,
    seed: int,
    *,
    support: float = 0.1,
    return_planted: bool = False,
) -> Union[Tuple[SparseColMatrix, np.ndarray], Tuple[SparseColMatrix, np.ndarray, np.ndarray]]:
    """A (d×n, columnas = características) con entradas gaussianas dispersas.

    Se planta un x★ con ``ceil(support·n)`` coordenadas no nulas y
    b = A x★ + noise·N(0, I). Determinista dada la semilla.
    """
    if d < 1 or n < 1:
        raise ConfigError(f"dimensiones inválidas d={d}, n={n}")
    if not 0.0 < density <= 1.0:
        raise ConfigError(f"density debe estar en (0, 1], llegó {density}")

    rng = shuffle_generator(seed)
    values = rng.standard_normal((d, n))
    mask = np.ones((d, n), dtype=bool) if density >= 1.0 else rng.random((d, n)) < density
    A = SparseColMatrix.from_dense(np.where(mask, values, 0.0), mask=mask)

    k = max(1, int(np.ceil(support * n)))
    planted = np.zeros(n)
    idx = rng.choice(n, size=k, replace=False)
    planted[idx] = rng.choice([-1.0, 1.0], size=k) * (1.0 + rng.random(k))

    b = A.matvec(planted)
    if noise > 0:
        b = b + noise * rng.standard_normal(d)
    if return_planted:
        return A, b, planted
    return A, b
