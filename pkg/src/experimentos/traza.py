"""Escritura y lectura de trazas CSV.

Cabecera fija:

    round,FA,HA,gap,consensus_violation,active_nodes,cert_all_pass,elapsed_ms

Los reales se escriben con 17 cifras significativas (ida y vuelta exacta);
``cert_all_pass`` queda vacío en las rondas sin certificado.
"""

from __future__ import annotations

import logging
from dataclasses import asdict
from pathlib import Path
from typing import List, Union

import pandas as pd

from comparativas.diging import DigingResult
from motor.cola import RunTrace

__all__ = [
    "TRACE_COLUMNS",
    "CERT_COLUMNS",
    "trace_frame",
    "emit_trace",
    "read_trace",
    "emit_certificates",
    "read_certificates",
    "DIGING_COLUMNS",
    "emit_diging",
]

logger = logging.getLogger(__name__)

TRACE_COLUMNS: List[str] = [
    "round",
    "FA",
    "HA",
    "gap",
    "consensus_violation",
    "active_nodes",
    "cert_all_pass",
    "elapsed_ms",
]

CERT_COLUMNS: List[str] = [
    "round",
    "node",
    "local_gap",
    "local_threshold",
    "cond14",
    "grad_deviation",
    "deviation_threshold",
    "cond15",
    "gap",
    "mixed_gap",
]

FLOAT_FORMAT = "%.17g"
PathLike = Union[str, Path]


def _flag(value) -> object:
    return "" if value is None else int(bool(value))


def trace_frame(trace: RunTrace) -> pd.DataFrame:
    rows = [
        {
            "round": r.round,
            "FA": r.FA,
            "HA": r.HA,
            "gap": r.gap,
            "consensus_violation": r.consensus_violation,
            "active_nodes": r.active_nodes,
            "cert_all_pass": _flag(r.cert_all_pass),
            "elapsed_ms": r.elapsed_ms,
        }
        for r in trace.records
    ]
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def _write(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def emit_trace(trace: RunTrace, path: PathLike) -> Path:
    out = _write(trace_frame(trace), path)
    logger.info("traza: %d rondas -> %s", len(trace.records), out)
    return out


def read_trace(path: PathLike) -> pd.DataFrame:
    """Lee una traza; los reales vuelven bit a bit."""
    return pd.read_csv(path, float_precision="round_trip", keep_default_na=False, na_values={"cert_all_pass": [""]})


def emit_certificates(trace: RunTrace, path: PathLike) -> Path:
    rows = []
    for c in trace.certificates:
        row = asdict(c)
        row["cond14"] = int(c.cond14)
        row["cond15"] = int(c.cond15)
        rows.append(row)
    out = _write(pd.DataFrame(rows, columns=CERT_COLUMNS), path)
    logger.info("certificados: %d filas -> %s", len(rows), out)
    return out


def read_certificates(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


DIGING_COLUMNS: List[str] = ["round", "FB", "alpha"]


def emit_diging(result: DigingResult, path: PathLike) -> Path:
    """Objetivo F_B por paso de DIGing, mismo formato numérico que la traza."""
    frame = pd.DataFrame(
        {"round": range(len(result.objective)), "FB": result.objective, "alpha": result.alpha},
        columns=DIGING_COLUMNS,
    )
    out = _write(frame, path)
    logger.info("DIGing: %d pasos (α=%g) -> %s", len(result.objective), result.alpha, out)
    return out
