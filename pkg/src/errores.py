"""Jerarquía de errores del proyecto.

Todas las excepciones propias heredan de ``ColaError``; las de configuración
siguen siendo ``ValueError`` para que el código que ya captura ``ValueError``
siga funcionando.
"""

from __future__ import annotations

from typing import Optional

__all__ = [
    "ColaError",
    "ConfigError",
    "ParseError",
    "DimensionError",
    "PreflightError",
    "ColumnCollisionError",
    "DivergenceError",
    "InvariantViolation",
]


class ColaError(Exception):
    """Base de todos los errores del paquete."""


class ConfigError(ColaError, ValueError):
    """Parámetros inválidos (n < K, K no soportado por la topología, etc.)."""


class ParseError(ColaError, ValueError):
    """Entrada LIBSVM mal formada. ``line`` es 1-based."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"línea {line}: {message}"
        super().__init__(message)


class DimensionError(ColaError, ValueError):
    """Vectores con dimensión incompatible."""


class PreflightError(ConfigError):
    """Falla un chequeo previo a la ronda 0.

    ``check`` es uno de ``spectral-gap``, ``connectivity`` o ``sigma-prime``.
    """

    def __init__(self, check: str, message: str) -> None:
        self.check = check
        super().__init__(f"[{check}] {message}")


class ColumnCollisionError(ConfigError):
    """Un nodo nuevo pide columnas que ya tienen dueño."""


class DivergenceError(ColaError):
    """Todos los tamaños de paso candidatos divergen."""


class InvariantViolation(ColaError, AssertionError):
    """Una aserción de ejecución (identidad de consenso) no se cumple."""
