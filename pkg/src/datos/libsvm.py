"""Lectura y escritura del formato de texto LIBSVM.

Cada línea no vacía es ``label idx:val idx:val ...`` con ``idx`` 1-based y
estrictamente creciente. El análisis lo hace ``sklearn.datasets``; aquí
sólo se fija la convención 1-based, se traducen sus errores a
``ParseError`` con el número de línea y se devuelve la matriz como
``SparseColMatrix``.
"""

from __future__ import annotations

import io
import logging
from pathlib import Path
from typing import BinaryIO, Iterable, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
from sklearn.datasets import dump_svmlight_file, load_svmlight_file

from datos.matriz import SparseColMatrix
from errores import ParseError

__all__ = ["parse_libsvm", "load_libsvm", "serialize_libsvm"]

logger = logging.getLogger(__name__)

Source = Union[bytes, BinaryIO, Iterable[bytes]]


def _payload(source: Source) -> bytes:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source)
    if hasattr(source, "read"):
        return source.read()
    return b"\n".join(bytes(line).rstrip(b"\r\n") for line in source)


def _load(payload: bytes) -> Tuple[sp.csr_matrix, np.ndarray]:
    X, y = load_svmlight_file(io.BytesIO(payload), dtype=np.float64, zero_based=False)
    return X, y


def _failing_line(payload: bytes) -> Tuple[int, str]:
    """Primera línea que sklearn rechaza por sí sola."""
    for lineno, line in enumerate(payload.split(b"\n"), start=1):
        try:
            _load(line + b"\n")
        except (ValueError, UnicodeDecodeError) as exc:
            return lineno, str(exc)
    return 0, ""


def parse_libsvm(
    source: Source, *, n_features: Optional[int] = None
) -> Tuple[SparseColMatrix, np.ndarray]:
    """Lee un flujo LIBSVM.

    Devuelve la matriz muestra-mayor (filas = muestras, columnas =
    características) y el vector de etiquetas. La dimensión es el mayor
    índice visto, o ``n_features`` si es mayor. Líneas vacías y comentarios
    (``#``) se ignoran.
    """
    payload = _payload(source)
    try:
        X, y = _load(payload)
    except (ValueError, UnicodeDecodeError) as exc:
        lineno, why = _failing_line(payload)
        if lineno:
            raise ParseError(why, lineno) from None
        raise ParseError(str(exc)) from None

    n_samples = int(y.size)
    dim = X.shape[1] if n_samples else 0
    if n_features is not None and n_features > dim:
        dim = int(n_features)
    X = sp.csr_matrix((X.data, X.indices, X.indptr), shape=(n_samples, dim))
    matrix = SparseColMatrix.from_scipy(X)
    logger.debug("LIBSVM: %d muestras, %d características, nnz=%d", n_samples, dim, matrix.nnz)
    return matrix, np.asarray(y, dtype=np.float64)


def load_libsvm(path: Union[str, Path], *, n_features: Optional[int] = None) -> Tuple[SparseColMatrix, np.ndarray]:
    with open(path, "rb") as fh:
        return parse_libsvm(fh, n_features=n_features)


def serialize_libsvm(matrix: SparseColMatrix, labels: np.ndarray) -> bytes:
    """Inversa de ``parse_libsvm`` para una matriz muestra-mayor."""
    labels = np.asarray(labels, dtype=np.float64)
    if labels.shape != (matrix.n_rows,):
        raise ParseError(f"{labels.size} etiquetas para {matrix.n_rows} muestras")
    out = io.BytesIO()
    dump_svmlight_file(matrix.csc.tocsr(), labels, out, zero_based=False)
    return out.getvalue()
