"""Óptimo de referencia F_A★ por descenso por coordenadas centralizado.

Es el mismo solver local con un solo nodo y σ′ = 1: con f cuadrática el
modelo del subproblema es exacto y cada paso es descenso proximal por
coordenadas sobre F_A. Se re-ancla en cada barrido.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from errores import ConfigError
from problema.especificacion import ProblemSpec
from solver_local.subproblema import SubproblemView, apply_updates

__all__ = ["ReferenceOptimum", "compute_reference", "cached_reference", "reference_key"]

logger = logging.getLogger(__name__)


@dataclass
class ReferenceOptimum:
    f_star: float
    updates: int
    gap: float
    converged: bool
    warning: Optional[str] = None
    x: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]


def compute_reference(
    problem: ProblemSpec,
    budget: int,
    *,
    gap_target: float = 1e-10,
    seed: int = 0,
) -> ReferenceOptimum:
    """Corre hasta que la brecha centralizada ≤ gap_target·max(1, |F_A|) o se
    agota el presupuesto (en actualizaciones).

    No alcanzar la brecha objetivo sólo deja un aviso en el resultado.
    """
    if budget < 0:
        raise ConfigError(f"presupuesto negativo: {budget}")
    n = problem.n
    rng = np.random.Generator(np.random.PCG64(seed))
    x = np.zeros(n)
    Ax = problem.matrix.matvec(x)
    fa = problem.primal_objective(x, Ax)
    gap = problem.duality_gap(x, Ax)
    used = 0
    all_cols = np.arange(n)

    def reached() -> bool:
        return gap <= gap_target * max(1.0, abs(fa))

    while used < budget and not reached() and n > 0:
        view = SubproblemView.build(problem, all_cols, Ax, x, 1.0, 1, problem.matrix)
        apply_updates(view, rng.permutation(n)[: budget - used])
        used += view.updates
        x = x + view.delta
        Ax = problem.matrix.matvec(x)
        fa = problem.primal_objective(x, Ax)
        gap = problem.duality_gap(x, Ax)

    warning = None
    if not reached():
        warning = f"brecha {gap:.3e} por encima del objetivo {gap_target:.0e} (relativo) tras {used} actualizaciones"
        logger.warning("referencia: %s", warning)
    logger.info("referencia: F_A★ ≈ %.15g, brecha %.3e, %d actualizaciones", fa, gap, used)
    return ReferenceOptimum(f_star=float(fa), updates=used, gap=float(gap), converged=warning is None, warning=warning, x=x)


def reference_key(problem: ProblemSpec, budget: int, gap_target: float) -> str:
    """sha256 del contenido del problema y de los parámetros del solver."""
    h = hashlib.sha256()
    m = problem.matrix
    for arr in (m.indptr, m.indices, m.data):
        h.update(np.ascontiguousarray(arr).tobytes())
    h.update(repr((m.shape, problem.name, problem.training_form.value)).encode())
    s, g = problem.smooth, problem.separable
    h.update(repr((s.kind.value, s.tau, g.kind.value, g.weight, g.radius)).encode())
    for arr in (s.offset, g.linear):
        if arr is not None:
            h.update(arr.tobytes())
    h.update(repr((budget, gap_target)).encode())
    return h.hexdigest()


def cached_reference(
    problem: ProblemSpec,
    budget: int,
    cache_dir: Union[str, Path],
    *,
    gap_target: float = 1e-10,
) -> ReferenceOptimum:
    """compute_reference con caché en disco (un JSON por clave de contenido)."""
    cache_dir = Path(cache_dir)
    path = cache_dir / f"referencia_{reference_key(problem, budget, gap_target)}.json"
    if path.exists():
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        logger.info("referencia desde caché: %s", path.name)
        data["x"] = np.asarray(data["x"], dtype=np.float64)
        return ReferenceOptimum(**data)
    ref = compute_reference(problem, budget, gap_target=gap_target)
    cache_dir.mkdir(parents=True, exist_ok=True)
    payload = asdict(ref)
    payload["x"] = ref.x.tolist()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
    return ref
