"""De una RunConfig a objetos listos para ejecutar."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from comparativas.diging import DigingResult, RidgeSplit, grid_search_alpha, run_diging
from datos.libsvm import load_libsvm
from datos.matriz import Orientation, SparseColMatrix, transpose_to_columns
from datos.particion import Partition, partition_columns
from datos.sinteticos import synthesize_regression
from errores import ConfigError
from experimentos.configuracion import RunConfig, TopologyConfig
from experimentos.traza import emit_certificates, emit_trace
from motor.cola import ColaEngine, Preflight, RunTrace, preflight
from problema.especificacion import ProblemSpec, lasso_lambda_max, make_lasso, make_ridge
from topologia.calendario import GossipSchedule, gossip_schedule
from topologia.grafos import Graph, GraphKind, build_graph, load_adjacency, ring_matchings
from topologia.mezcla import metropolis_weights

__all__ = [
    "Built",
    "load_samples",
    "build_problem",
    "build_topology",
    "build",
    "run_from_config",
    "validate_run_config",
    "run_diging_from_config",
]

logger = logging.getLogger(__name__)


def load_samples(cfg: RunConfig) -> Tuple[SparseColMatrix, np.ndarray]:
    """Matriz muestra-mayor (filas = muestras) y objetivos."""
    data = cfg.data
    if data.kind == "libsvm":
        if not data.path:
            raise ConfigError("data.kind = libsvm necesita data.path")
        return load_libsvm(data.path, n_features=data.n_features)
    A, b = synthesize_regression(data.d, data.n, data.density, data.noise, data.seed, support=data.support)
    return A, b


def build_problem(cfg: RunConfig) -> ProblemSpec:
    samples, y = load_samples(cfg)
    p = cfg.problem
    if p.kind == "lasso":
        A = transpose_to_columns(samples, Orientation.FEATURES)
        lam = p.lam
        if lam is None:
            if p.lam_ratio is None:
                raise ConfigError("lasso necesita problem.lam o problem.lam_ratio")
            lam = p.lam_ratio * lasso_lambda_max(A, y)
        return make_lasso(A, y, lam, p.radius)
    if p.lam is None:
        raise ConfigError("ridge necesita problem.lam")
    return make_ridge(transpose_to_columns(samples, Orientation.SAMPLES), y, p.lam, p.orientation)


def build_topology(topo: TopologyConfig, gossip_B: int = 1) -> Tuple[Graph, GossipSchedule]:
    kind = GraphKind(topo.kind)
    if kind is GraphKind.CUSTOM:
        if not topo.adjacency_path:
            raise ConfigError("topology.kind = custom necesita adjacency_path")
        graph = load_adjacency(topo.adjacency_path, topo.K)
    else:
        graph = build_graph(kind, topo.K, rows=topo.rows, wrap=topo.wrap)
    if topo.time_varying:
        if kind is not GraphKind.RING:
            raise ConfigError("el gossip variable en el tiempo sólo está definido para ring")
        even, odd = ring_matchings(topo.K)
        bases = [metropolis_weights(even, require_connected=False), metropolis_weights(odd, require_connected=False)]
        return graph, gossip_schedule(bases, gossip_B)
    return graph, gossip_schedule([metropolis_weights(graph, require_connected=False)], gossip_B)


@dataclass(frozen=True)
class Built:
    problem: ProblemSpec
    partition: Partition
    graph: Graph
    schedule: GossipSchedule


def build(cfg: RunConfig) -> Built:
    problem = build_problem(cfg)
    graph, schedule = build_topology(cfg.topology, cfg.gossip_B)
    partition = partition_columns(problem.n, cfg.topology.K, cfg.seeds.partition)
    return Built(problem, partition, graph, schedule)


def _graph_for_preflight(built: Built) -> Optional[Graph]:
    # con emparejamientos la W no vive sobre las aristas del anillo completo
    return built.graph if built.schedule.static else None


def validate_run_config(cfg: RunConfig) -> Tuple[Built, Preflight]:
    """Construye todo y pasa los chequeos previos sin ejecutar rondas."""
    built = build(cfg)
    pre = preflight(built.problem, built.partition, built.schedule, cfg.engine_config(), _graph_for_preflight(built))
    return built, pre


def run_from_config(cfg: RunConfig, *, output: Optional[Path] = None, certs_output: Optional[Path] = None) -> RunTrace:
    """Ejecuta CoLa y escribe la traza (y certs.csv si hay certificados)."""
    built = build(cfg)
    with ColaEngine(
        built.problem,
        built.partition,
        built.schedule,
        cfg.engine_config(),
        graph=_graph_for_preflight(built),
        wrap=cfg.topology.wrap,
    ) as engine:
        trace = engine.run()
    out = output or (Path(cfg.output) if cfg.output else None)
    if out is not None:
        emit_trace(trace, out)
    certs = certs_output or (Path(cfg.certs_output) if cfg.certs_output else None)
    if certs is None and out is not None and trace.certificates:
        certs = out.with_name("certs.csv")
    if certs is not None and cfg.cert_epsilon is not None:
        emit_certificates(trace, certs)
    return trace


def run_diging_from_config(cfg: RunConfig, f_star: Optional[float] = None) -> DigingResult:
    """Busca α en rejilla y corre DIGing con el mismo número de rondas."""
    built = build(cfg)
    split = RidgeSplit(built.problem, built.partition)
    W = built.schedule.bases[0].weights
    if not built.schedule.static:
        raise ConfigError("DIGing usa una W estática")
    alpha = grid_search_alpha(split, W, cfg.alpha_candidates, cfg.diging_budget, f_star)
    return run_diging(split, W, alpha, cfg.rounds)
