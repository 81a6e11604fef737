"""Espectro de matrices de mezcla.

Los autovalores de una W simétrica se obtienen con Jacobi cíclico: sólo
rotaciones planas, espectro real garantizado y suficiente para K ≤ 1024.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

__all__ = ["jacobi_eigenvalues", "spectral_beta", "product_beta", "consensus_norm"]

logger = logging.getLogger(__name__)

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


def jacobi_eigenvalues(
    S: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS
) -> np.ndarray:
    """Autovalores (ascendentes) de una matriz simétrica por Jacobi cíclico."""
    A = np.array(S, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"se esperaba una matriz cuadrada, llegó {A.shape}")
    n = A.shape[0]
    if n <= 1:
        return np.diag(A).copy()
    A = 0.5 * (A + A.T)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(n)

    last = np.inf
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        # ruido de redondeo: ya no baja
        if off <= tol * scale or off >= last:
            break
        last = off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- JᵀAJ sobre las filas/columnas p y q
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = A[q, p] = 0.0
    else:
        logger.warning("Jacobi no convergió en %d barridos", max_sweeps)
    return np.sort(np.diag(A))


def spectral_beta(W: np.ndarray) -> float:
    """β = max{|λ₂(W)|, |λ_K(W)|}: el mayor módulo tras quitar el autovalor 1."""
    W = np.asarray(W, dtype=np.float64)
    if W.shape[0] <= 1:
        return 0.0
    eig = jacobi_eigenvalues(W)[::-1]
    return float(np.max(np.abs(eig[1:])))


def product_beta(matrices: Sequence[np.ndarray]) -> float:
    """σ_max(W_B ⋯ W_1 − (1/K)𝟙𝟙ᵀ) para un tramo de gossip variable en el tiempo.

    Para una única W simétrica coincide con β(W).
    """
    if not matrices:
        raise ValueError("lista de matrices vacía")
    K = np.asarray(matrices[0]).shape[0]
    if K <= 1:
        return 0.0
    P = np.eye(K)
    for W in matrices:
        P = np.asarray(W, dtype=np.float64) @ P
    M = P - np.full((K, K), 1.0 / K)
    eig = jacobi_eigenvalues(M.T @ M)
    return float(np.sqrt(max(eig[-1], 0.0)))


def consensus_norm(Z: np.ndarray) -> float:
    """‖Z − 𝟙z̄ᵀ‖_F para una pila de vectores (una fila por nodo)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    return float(np.linalg.norm(Z - Z.mean(axis=0, keepdims=True)))
