"""Constantes dependientes de los datos: σ_k, σ_max y σ.

σ_k es el mayor autovalor de A_[k]ᵀA_[k]; se obtiene por iteración de la
potencia, que basta a esta escala (la constante sólo acota σ′ y los
certificados).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from datos.matriz import SparseColMatrix
from datos.particion import Partition
from errores import ConfigError

__all__ = ["DataConstants", "compute_sigma_k", "compute_data_constants"]

logger = logging.getLogger(__name__)

POWER_MAX_ITER = 10_000
POWER_TOL = 1e-9


def compute_sigma_k(
    matrix: SparseColMatrix,
    block: Sequence[int],
    tol: float = POWER_TOL,
    *,
    max_iter: int = POWER_MAX_ITER,
    seed: int = 0,
) -> float:
    """Mayor autovalor de A_[k]ᵀA_[k] por iteración de la potencia.

    Se detiene cuando el residuo ‖Mu − λu‖ cae por debajo de ``tol·λ``, lo
    que acota el error relativo de λ por ``tol``.
    """
    block = np.asarray(block, dtype=np.int64)
    if block.size == 0:
        raise ConfigError("bloque vacío: σ_k no está definido")
    sub = matrix.select(block)
    norms = sub.column_norms_sq()
    if not np.any(norms > 0):
        return 0.0

    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.standard_normal(block.size)
    u /= np.linalg.norm(u)
    lam = 0.0
    for it in range(max_iter):
        mu = sub.rmatvec(sub.matvec(u))
        lam = float(u @ mu)
        resid = np.linalg.norm(mu - lam * u)
        norm = np.linalg.norm(mu)
        if norm == 0.0:
            # u cayó en el núcleo; reiniciamos en la columna de mayor norma
            u = np.zeros(block.size)
            u[int(np.argmax(norms))] = 1.0
            continue
        if resid <= tol * lam:
            break
        u = mu / norm
    else:
        logger.warning("σ_k no convergió en %d iteraciones (residuo relativo %.2e)", max_iter, resid / max(lam, 1e-300))
    # la cota por columna individual siempre vale
    return max(lam, float(norms.max()))


@dataclass(frozen=True)
class DataConstants:
    sigma_k: tuple
    sizes: tuple

    @property
    def sigma_max(self) -> float:
        return max(self.sigma_k) if self.sigma_k else 0.0

    @property
    def sigma(self) -> float:
        return float(sum(s * n for s, n in zip(self.sigma_k, self.sizes)))

    @property
    def sum_nk2_sigma(self) -> float:
        """Σ_k n_k² σ_k, la constante de los certificados locales."""
        return float(sum(n * n * s for s, n in zip(self.sigma_k, self.sizes)))


def compute_data_constants(matrix: SparseColMatrix, partition: Partition, tol: float = POWER_TOL) -> DataConstants:
    sigma_k = []
    for k, block in enumerate(partition.blocks):
        sigma_k.append(compute_sigma_k(matrix, block, tol, seed=k) if block.size else 0.0)
    logger.debug("σ_k = %s", sigma_k)
    return DataConstants(tuple(sigma_k), tuple(partition.sizes))
