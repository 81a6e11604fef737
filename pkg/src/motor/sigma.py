"""Elección de σ′.

La opción segura es σ′ = γK. La cota ajustada a los datos es

    σ′_min = γ · max_x ‖Ax‖² / Σ_k ‖A_[k]x_[k]‖²,

que coincide con γ por el mayor autovalor de Σ_k Q_kQ_kᵀ, con Q_k una base
ortonormal del rango de A_[k]. Ese autovalor está en [1, K].
"""

from __future__ import annotations

import logging
from typing import List

import numpy as np

from datos.matriz import SparseColMatrix
from datos.particion import Partition
from errores import PreflightError

__all__ = ["safe_sigma_prime", "data_sigma_prime", "check_sigma_prime"]

logger = logging.getLogger(__name__)

INFLATION = 1e-6


def safe_sigma_prime(gamma: float, K: int) -> float:
    return gamma * K


def _range_basis(block: np.ndarray) -> np.ndarray:
    if block.size == 0:
        return np.zeros((block.shape[0], 0))
    U, s, _ = np.linalg.svd(block, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((block.shape[0], 0))
    rank = int(np.sum(s > s[0] * max(block.shape) * np.finfo(float).eps))
    return U[:, :rank]


def data_sigma_prime(
    matrix: SparseColMatrix,
    partition: Partition,
    gamma: float,
    *,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    seed: int = 0,
) -> float:
    """γ·λ_max(Σ_k Q_kQ_kᵀ) por iteración de la potencia, inflado y con tope γK."""
    K = partition.K
    bases: List[np.ndarray] = [_range_basis(matrix.select(b).to_dense()) for b in partition.blocks]
    bases = [Q for Q in bases if Q.shape[1]]
    if not bases:
        return gamma

    rng = np.random.Generator(np.random.PCG64(seed))
    z = rng.standard_normal(matrix.n_rows)
    z /= np.linalg.norm(z)
    lam = 0.0
    for _ in range(max_iter):
        y = sum(Q @ (Q.T @ z) for Q in bases)
        lam_new = float(z @ y)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            break
        z = y / norm
        if abs(lam_new - lam) <= tol * lam_new:
            lam = lam_new
            break
        lam = lam_new
    lam = min(max(lam * (1.0 + INFLATION), 1.0), float(K))
    logger.info("σ′ ajustado a los datos: γ·%.6g (tope γK = %g)", lam, gamma * K)
    return gamma * lam


def check_sigma_prime(sigma_prime: float, gamma: float) -> None:
    if not sigma_prime >= gamma:
        raise PreflightError("sigma-prime", f"σ′ = {sigma_prime} por debajo de γ = {gamma}")
