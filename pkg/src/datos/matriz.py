"""Matriz dispersa por columnas sobre ``scipy.sparse.csc_matrix``.

CoLa sólo toca A columna a columna dentro de un bloque; el adaptador
expone justo eso (columnas, submatrices por bloque, Ax y Aᵀw) y deja el
almacenamiento CSC a scipy. La forma canónica (índices ordenados, sin
duplicados) se impone al construir.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from errores import ConfigError, DimensionError

__all__ = ["SparseColMatrix", "Orientation", "transpose", "transpose_to_columns"]


Column = Tuple[np.ndarray, np.ndarray]


class Orientation(str, Enum):
    """Qué eje de una matriz muestra-mayor se convierte en columnas."""

    FEATURES = "features"  # columnas = características -> formulación (A)
    SAMPLES = "samples"    # columnas = muestras -> formulación (B)


def _read_only(arr: np.ndarray) -> np.ndarray:
    view = arr.view()
    view.setflags(write=False)
    return view


@dataclass(frozen=True, eq=False)
class SparseColMatrix:
    csc: sp.csc_matrix

    def __post_init__(self) -> None:
        m = self.csc
        if not sp.issparse(m):
            raise ConfigError(f"se esperaba una matriz dispersa de scipy, llegó {type(m).__name__}")
        m = sp.csc_matrix(m, dtype=np.float64, copy=True)
        try:
            m.check_format(full_check=True)
        except ValueError as exc:
            raise ConfigError(f"CSC inconsistente: {exc}") from None
        if not m.has_canonical_format:
            raise ConfigError("índices no estrictamente crecientes dentro de una columna")
        object.__setattr__(self, "csc", m)

    # ---------------------------------------------------------
    # Construcción
    # ---------------------------------------------------------

    @classmethod
    def from_arrays(
        cls, n_rows: int, n_cols: int, indptr: np.ndarray, indices: np.ndarray, data: np.ndarray
    ) -> "SparseColMatrix":
        """Desde los tres arrays CSC; no reordena ni suma duplicados."""
        if n_rows < 0 or n_cols < 0:
            raise ConfigError(f"dimensiones negativas: {n_rows}x{n_cols}")
        try:
            m = sp.csc_matrix(
                (np.asarray(data, dtype=np.float64), np.asarray(indices), np.asarray(indptr)),
                shape=(n_rows, n_cols),
            )
        except ValueError as exc:
            raise ConfigError(f"indptr/indices/data inconsistentes: {exc}") from None
        return cls(m)

    @classmethod
    def from_scipy(cls, matrix) -> "SparseColMatrix":
        """Cualquier matriz de scipy; se pasa a CSC canónica (los ceros explícitos se conservan)."""
        m = sp.csc_matrix(matrix, dtype=np.float64, copy=True)
        m.sum_duplicates()
        return cls(m)

    @classmethod
    def from_triplets(
        cls, n_rows: int, n_cols: int, rows: np.ndarray, cols: np.ndarray, vals: np.ndarray
    ) -> "SparseColMatrix":
        coo = sp.coo_matrix(
            (np.asarray(vals, dtype=np.float64), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=(n_rows, n_cols),
        )
        return cls.from_scipy(coo)

    @classmethod
    def from_dense(cls, dense: np.ndarray, mask: Optional[np.ndarray] = None) -> "SparseColMatrix":
        """Guarda las entradas no nulas (o las marcadas por ``mask``)."""
        dense = np.asarray(dense, dtype=np.float64)
        if dense.ndim != 2:
            raise DimensionError(f"se esperaba una matriz 2D, llegó ndim={dense.ndim}")
        keep = dense != 0 if mask is None else np.asarray(mask, dtype=bool)
        rows, cols = np.nonzero(keep)
        return cls.from_triplets(dense.shape[0], dense.shape[1], rows, cols, dense[rows, cols])

    # ---------------------------------------------------------
    # Acceso
    # ---------------------------------------------------------

    @property
    def n_rows(self) -> int:
        return int(self.csc.shape[0])

    @property
    def n_cols(self) -> int:
        return int(self.csc.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(self.csc.nnz)

    @property
    def indptr(self) -> np.ndarray:
        return _read_only(self.csc.indptr)

    @property
    def indices(self) -> np.ndarray:
        return _read_only(self.csc.indices)

    @property
    def data(self) -> np.ndarray:
        return _read_only(self.csc.data)

    def column(self, i: int) -> Column:
        """Exactamente los no nulos almacenados de A_i: (índices, valores)."""
        if not 0 <= i < self.n_cols:
            raise IndexError(f"columna {i} fuera de [0, {self.n_cols})")
        lo, hi = self.csc.indptr[i], self.csc.indptr[i + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def columns(self, ids: Optional[Iterable[int]] = None) -> List[Column]:
        ids = range(self.n_cols) if ids is None else ids
        return [self.column(int(i)) for i in ids]

    def column_norms_sq(self) -> np.ndarray:
        return np.asarray(self.csc.multiply(self.csc).sum(axis=0), dtype=np.float64).ravel()

    def select(self, ids: Sequence[int]) -> "SparseColMatrix":
        """Submatriz A_[k] con las columnas ``ids`` en ese orden."""
        ids = np.asarray(ids, dtype=np.intp).reshape(-1)
        return SparseColMatrix(self.csc[:, ids])

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n_cols,):
            raise DimensionError(f"x tiene forma {x.shape}, se esperaba ({self.n_cols},)")
        return np.asarray(self.csc @ x, dtype=np.float64)

    def rmatvec(self, w: np.ndarray) -> np.ndarray:
        """Aᵀw, una entrada por columna."""
        w = np.asarray(w, dtype=np.float64)
        if w.shape != (self.n_rows,):
            raise DimensionError(f"w tiene forma {w.shape}, se esperaba ({self.n_rows},)")
        return np.asarray(self.csc.T @ w, dtype=np.float64)

    def to_dense(self) -> np.ndarray:
        return self.csc.toarray()

    def same_structure(self, other: "SparseColMatrix") -> bool:
        return (
            self.shape == other.shape
            and np.array_equal(self.csc.indptr, other.csc.indptr)
            and np.array_equal(self.csc.indices, other.csc.indices)
            and np.array_equal(self.csc.data, other.csc.data)
        )


def transpose(matrix: SparseColMatrix) -> SparseColMatrix:
    return SparseColMatrix.from_scipy(matrix.csc.T)


def transpose_to_columns(matrix: SparseColMatrix, orientation: Orientation) -> SparseColMatrix:
    """Reorienta una matriz muestra-mayor (filas = muestras).

    FEATURES deja las características como columnas (Lasso sobre (A));
    SAMPLES pone las muestras como columnas (mapeo a (B)).
    """
    orientation = Orientation(orientation)
    if orientation is Orientation.FEATURES:
        return matrix
    return transpose(matrix)
