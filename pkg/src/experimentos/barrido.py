"""Barridos sobre κ, topología y probabilidad de participación p.

Cada combinación escribe su propia traza; el nombre del fichero codifica
los tres ejes, así que dos puntos distintos nunca comparten salida.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator, List, Optional, Tuple

from errores import ConfigError
from experimentos.configuracion import ExperimentConfig, RunConfig
from experimentos.construccion import run_from_config
from motor.cola import RunTrace

__all__ = ["SweepPoint", "sweep_points", "sweep_filename", "sweep"]

logger = logging.getLogger(__name__)


@dataclass
class SweepPoint:
    kappa: int
    topology: str
    dropout: float
    path: Path
    certs_path: Path
    trace: Optional[RunTrace] = None


def _fmt(p: float) -> str:
    return format(float(p), "g")


def sweep_filename(stem: str, kappa: int, topology: str, dropout: float) -> str:
    return f"{stem}_kappa{int(kappa)}_topo{topology}_p{_fmt(dropout)}.csv"


def _axes(exp: ExperimentConfig) -> Tuple[Tuple[int, ...], Tuple[str, ...], Tuple[float, ...]]:
    run, s = exp.run, exp.sweep
    return (
        s.kappa or (run.kappa,),
        s.topology or (run.topology.kind,),
        s.dropout or (run.dropout_p,),
    )


def sweep_points(exp: ExperimentConfig, *, stem: str = "traza") -> Iterator[Tuple[RunConfig, SweepPoint]]:
    """Configuración y destino de cada combinación, en orden κ, topología, p.

    Lanza ConfigError si dos combinaciones dan el mismo nombre de fichero
    (ejes con valores repetidos).
    """
    out_dir = exp.resolved_output_dir
    seen = set()
    plan: List[Tuple[RunConfig, SweepPoint]] = []
    for kappa, topo, p in itertools.product(*_axes(exp)):
        name = sweep_filename(stem, kappa, topo, p)
        if name in seen:
            raise ConfigError(f"el barrido repite el punto κ={kappa}, topología={topo}, p={p}")
        seen.add(name)
        cfg = replace(
            exp.run,
            kappa=int(kappa),
            topology=replace(exp.run.topology, kind=topo),
            dropout_p=float(p),
        )
        path = out_dir / name
        certs = out_dir / ("certs_" + name[len(stem) + 1:])
        plan.append((cfg, SweepPoint(int(kappa), topo, float(p), path, certs)))
    return iter(plan)


def sweep(exp: ExperimentConfig, *, stem: str = "traza", keep_traces: bool = True) -> List[SweepPoint]:
    """Ejecuta los puntos uno tras otro; cada uno es dueño de su fichero."""
    points: List[SweepPoint] = []
    for cfg, point in sweep_points(exp, stem=stem):
        logger.info("barrido: κ=%d topología=%s p=%s", point.kappa, point.topology, _fmt(point.dropout))
        trace = run_from_config(cfg, output=point.path, certs_output=point.certs_path)
        if keep_traces:
            point.trace = trace
        points.append(point)
    logger.info("barrido: %d puntos en %s", len(points), exp.resolved_output_dir)
    return points
