# -------------------------------------------------------------
# Bucle de rondas de CoLa sobre nodos simulados
#
# Cada ronda: gossip (B pasos) -> solve local en cada nodo activo ->
#   x_[k] += γΔx_[k];  v_k = v_k^{t+½} + γK·A_[k]Δx_[k]
#
# Tras cada ronda se comprueba (1/K)Σ v_k = Ax; si falla, InvariantViolation.
# -------------------------------------------------------------

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from certificados.brecha import decentralized_gap
from certificados.locales import CertConstants, evaluate_certificates, make_cert_constants
from datos.constantes import compute_data_constants
from datos.particion import Partition
from errores import ConfigError, PreflightError
from motor.configuracion import EngineConfig, FailureModel, SigmaPrimeMode
from motor.elasticidad import apply_dropout, join_node, leave_node, reset_absent
from motor.estado import NodeState, assemble_x, init_states, stack_v
from motor.sigma import check_sigma_prime, data_sigma_prime, safe_sigma_prime
from problema.especificacion import ProblemSpec
from solver_local.subproblema import SubproblemView, solve_subproblem
from topologia.calendario import GossipSchedule, gossip_schedule
from topologia.grafos import Graph, GraphKind, build_graph, is_connected
from topologia.mezcla import absorb_inactive, metropolis_weights
from validacion import check_consensus, check_mixing_matrix, consensus_error, consensus_violation

__all__ = [
    "RoundRecord",
    "CertRecord",
    "RunTrace",
    "Preflight",
    "preflight",
    "gossip_step",
    "cola_round",
    "ColaEngine",
    "run",
]

logger = logging.getLogger(__name__)


# -------------------------------------------------------------
# Traza
# -------------------------------------------------------------

@dataclass(frozen=True)
class RoundRecord:
    round: int
    FA: float
    HA: float
    gap: float
    consensus_violation: float
    active_nodes: int
    cert_all_pass: Optional[bool]
    elapsed_ms: float
    cpu_ms: float = 0.0
    updates: int = 0
    consensus_error: float = 0.0
    active: Tuple[bool, ...] = ()


@dataclass(frozen=True)
class CertRecord:
    round: int
    node: int
    local_gap: float
    local_threshold: float
    cond14: bool
    grad_deviation: float
    deviation_threshold: float
    cond15: bool
    gap: float
    mixed_gap: float


@dataclass
class RunTrace:
    records: List[RoundRecord] = field(default_factory=list)
    certificates: List[CertRecord] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)
    x: Optional[np.ndarray] = None
    V: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        if name not in {f.name for f in fields(RoundRecord)}:
            raise KeyError(name)
        return np.array([getattr(r, name) for r in self.records])

    def cert_rounds(self) -> List[int]:
        return [r.round for r in self.records if r.cert_all_pass is not None]

    def first_all_pass(self) -> Optional[int]:
        for r in self.records:
            if r.cert_all_pass:
                return r.round
        return None


# -------------------------------------------------------------
# Chequeos previos
# -------------------------------------------------------------

@dataclass(frozen=True)
class Preflight:
    K: int
    beta: float
    sigma_prime: float


def resolve_sigma_prime(problem: ProblemSpec, partition: Partition, config: EngineConfig) -> float:
    if config.sigma_prime is not None:
        return float(config.sigma_prime)
    if config.sigma_prime_mode is SigmaPrimeMode.DATA:
        return data_sigma_prime(problem.matrix, partition, config.gamma, seed=config.solver_seed)
    return safe_sigma_prime(config.gamma, partition.K)


def preflight(
    problem: ProblemSpec,
    partition: Partition,
    schedule: GossipSchedule,
    config: EngineConfig,
    graph: Optional[Graph] = None,
) -> Preflight:
    """Todo lo que debe fallar antes de la ronda 0."""
    if partition.n != problem.n:
        raise ConfigError(f"la partición cubre n={partition.n} pero el problema tiene n={problem.n}")
    K = partition.K
    if schedule.K != K:
        raise ConfigError(f"el calendario es para K={schedule.K} y la partición tiene K={K}")
    if graph is not None and graph.K != K:
        raise ConfigError(f"el grafo tiene K={graph.K} y la partición K={K}")
    for W in schedule.bases:
        check_mixing_matrix(W.weights, graph if schedule.static else None)
    beta = schedule.effective_beta
    if K > 1 and not beta < 1.0 - 1e-12:
        why = " (grafo no conexo)" if graph is not None and not is_connected(graph) else ""
        raise PreflightError("spectral-gap", f"β = {beta:.12g}: hueco espectral nulo{why}, no hay comunicación")
    if graph is not None and not is_connected(graph):
        raise PreflightError("connectivity", f"el grafo con K={K} no es conexo")
    sigma_prime = resolve_sigma_prime(problem, partition, config)
    check_sigma_prime(sigma_prime, config.gamma)
    logger.info("preflight: K=%d β=%.6g σ′=%.6g γ=%g κ=%d", K, beta, sigma_prime, config.gamma, config.kappa)
    return Preflight(K, beta, sigma_prime)


# -------------------------------------------------------------
# Una ronda
# -------------------------------------------------------------

def gossip_step(V: np.ndarray, W: np.ndarray) -> np.ndarray:
    """v_k^{t+½} = Σ_l W_kl v_l para todos los nodos a la vez."""
    return np.asarray(W) @ np.atleast_2d(V)


def cola_round(
    states: Sequence[NodeState],
    matrices: Sequence[np.ndarray],
    active: np.ndarray,
    problem: ProblemSpec,
    sigma_prime: float,
    config: EngineConfig,
    executor: Optional[ThreadPoolExecutor] = None,
) -> List[int]:
    """Gossip, solve local y actualización; devuelve las actualizaciones por nodo."""
    K = len(states)
    V = stack_v(states)
    for W in matrices:
        V = gossip_step(V, absorb_inactive(W, active))
    for s, v in zip(states, V):
        s.v = v.copy()

    jobs = [s for s, a in zip(states, active) if a]
    budget = config.budget

    def solve(s: NodeState) -> Tuple[np.ndarray, int]:
        view = SubproblemView.build(problem, s.block, s.v, s.x, sigma_prime, K, s.block_matrix)
        return solve_subproblem(view, budget, s.rng), view.updates

    if executor is not None and len(jobs) > 1:
        results = list(executor.map(solve, jobs))
    else:
        results = [solve(s) for s in jobs]

    per_node = [0] * K
    for s, (delta, n) in zip(jobs, results):
        s.x = s.x + config.gamma * delta
        # Δv recalculado exacto, no desde la caché del solver
        s.v = s.v + (config.gamma * K) * s.block_matrix.matvec(delta)
        s.updates += n
        per_node[s.k] = n
    return per_node


# -------------------------------------------------------------
# Motor
# -------------------------------------------------------------

class ColaEngine:
    """Simulación síncrona de CoLa con K nodos.

    Los solves de una ronda pueden ir en paralelo (``workers``); cada nodo
    tiene su propio flujo aleatorio, así que el resultado no depende del
    número de workers.
    """

    def __init__(
        self,
        problem: ProblemSpec,
        partition: Partition,
        schedule: GossipSchedule,
        config: EngineConfig,
        *,
        graph: Optional[Graph] = None,
        wrap: bool = False,
    ) -> None:
        self.problem = problem
        self.partition = partition
        self.schedule = schedule
        self.config = config
        self.graph = graph
        self.wrap = wrap
        self.states: List[NodeState] = init_states(problem, partition, config.solver_seed)
        self._dropout_rng = np.random.Generator(np.random.PCG64(config.dropout_seed))
        self._executor = ThreadPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
        self.t = 0
        self.elapsed_ms = 0.0
        self.cpu_ms = 0.0
        self.trace = RunTrace()
        self._configure()

    # ---------------------------------------------------------
    # Preparación (también tras una unión)
    # ---------------------------------------------------------

    def _configure(self) -> None:
        self.pre = preflight(self.problem, self.partition, self.schedule, self.config, self.graph)
        self.sigma_prime = self.pre.sigma_prime
        self.cert_constants: Optional[CertConstants] = None
        eps = self.config.cert_epsilon
        if eps is not None:
            if self.problem.separable.bounded_support:
                data = compute_data_constants(self.problem.matrix, self.partition)
                self.cert_constants = make_cert_constants(
                    eps, self.problem.radius, self.pre.beta, data,
                    tau=self.problem.smooth.tau, local_gap=self.config.cert_local_gap,
                )
            else:
                logger.info("certificados locales desactivados: g sin soporte acotado (%s)", self.problem.name)
        self.trace.meta.update(
            K=self.K,
            beta=self.pre.beta,
            sigma_prime=self.sigma_prime,
            gamma=self.config.gamma,
            kappa=self.config.kappa,
            radius=self.problem.radius,
            problem=self.problem.name,
        )

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self) -> "ColaEngine":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    # ---------------------------------------------------------
    # Vistas del estado
    # ---------------------------------------------------------

    @property
    def K(self) -> int:
        return len(self.states)

    @property
    def x(self) -> np.ndarray:
        return assemble_x(self.states, self.problem.n)

    @property
    def V(self) -> np.ndarray:
        return stack_v(self.states)

    def _record(self, active: np.ndarray, cert_pass: Optional[bool]) -> RoundRecord:
        x = self.x
        V = self.V
        Ax = self.problem.matrix.matvec(x)
        rec = RoundRecord(
            round=self.t,
            FA=self.problem.primal_objective(x, Ax),
            HA=self.problem.decentralized_objective(x, V),
            gap=decentralized_gap(self.problem, x, V),
            consensus_violation=consensus_violation(V, Ax),
            active_nodes=int(np.sum(active)),
            cert_all_pass=cert_pass,
            elapsed_ms=self.elapsed_ms,
            cpu_ms=self.cpu_ms,
            updates=sum(s.updates for s in self.states),
            consensus_error=consensus_error(V, Ax),
            active=tuple(bool(a) for a in active),
        )
        self.trace.records.append(rec)
        logger.debug(
            "ronda %d: F_A=%.12g H_A=%.12g G_H=%.3e viol=%.3e activos=%d",
            rec.round, rec.FA, rec.HA, rec.gap, rec.consensus_violation, rec.active_nodes,
        )
        return rec

    def _certify(self) -> Optional[bool]:
        c = self.cert_constants
        if c is None or self.t % self.config.cert_every:
            return None
        x, V = self.x, self.V
        report = evaluate_certificates(
            self.problem,
            self.partition,
            x,
            V,
            # W de la ronda recién hecha; β del calendario la acota
            self.schedule.round_product(max(self.t - 1, 0)),
            c,
            neighbor_average=self.config.cert_neighbor_average,
        )
        for k in range(self.K):
            self.trace.certificates.append(
                CertRecord(
                    round=self.t,
                    node=k,
                    local_gap=float(report.local_gaps[k]),
                    local_threshold=report.local_threshold,
                    cond14=bool(report.cond14[k]),
                    grad_deviation=float(report.deviations[k]),
                    deviation_threshold=report.deviation_threshold,
                    cond15=bool(report.cond15[k]),
                    gap=report.gap,
                    mixed_gap=report.mixed_gap,
                )
            )
        if report.all_pass and "first_all_pass" not in self.trace.meta:
            self.trace.meta["first_all_pass"] = self.t
            self.trace.meta["slack_ratio"] = report.gap / c.epsilon
            logger.info("ronda %d: las %d banderas pasan (G_H/ε = %.3g)", self.t, 2 * self.K, report.gap / c.epsilon)
        return report.all_pass

    def start(self) -> RoundRecord:
        """Registra la ronda 0 (x = 0, v_k = 0) si aún no está."""
        if self.trace.records:
            return self.trace.records[-1]
        return self._record(np.array([not s.frozen for s in self.states]), self._certify())

    # ---------------------------------------------------------
    # Ronda
    # ---------------------------------------------------------

    def step(self) -> RoundRecord:
        self.start()
        cfg = self.config
        cpu0 = time.process_time()
        active, _ = apply_dropout(self.states, self.schedule.bases[0].weights, cfg.dropout_p, self._dropout_rng)
        if cfg.failure_model is FailureModel.RESET:
            n_reset = reset_absent(self.states, active)
            if n_reset:
                logger.debug("ronda %d: %d nodos ausentes reiniciados", self.t + 1, n_reset)

        self.t += 1
        if not active.any():
            logger.info("ronda %d: ningún nodo activo, ronda vacía", self.t)
        else:
            per_node = cola_round(
                self.states,
                self.schedule.matrices_for_round(self.t - 1),
                active,
                self.problem,
                self.sigma_prime,
                cfg,
                self._executor,
            )
            self.elapsed_ms += cfg.cost_model.round_ms(self.schedule.B, max(per_node))
        self.cpu_ms += 1000.0 * (time.process_time() - cpu0)

        if cfg.check_consensus:
            x = self.x
            check_consensus(self.V, self.problem.matrix.matvec(x), round_=self.t)
        rec = self._record(active, self._certify())
        if cfg.log_every and self.t % cfg.log_every == 0:
            logger.info("ronda %d: F_A=%.10g G_H=%.3e activos=%d", self.t, rec.FA, rec.gap, rec.active_nodes)
        return rec

    def run(self, rounds: Optional[int] = None) -> RunTrace:
        rounds = self.config.rounds if rounds is None else rounds
        self.start()
        for _ in range(rounds):
            self.step()
        self.trace.x = self.x
        self.trace.V = self.V
        self.trace.meta["cpu_ms"] = self.cpu_ms
        return self.trace

    # ---------------------------------------------------------
    # Elasticidad permanente
    # ---------------------------------------------------------

    def leave(self, k: int) -> None:
        leave_node(self.states, k)

    def join(self, columns: Sequence[int] = (), neighbors: Optional[Sequence[int]] = None) -> int:
        """Añade un nodo; el grafo se reconstruye y el calendario pasa a estático.

        Sin ``neighbors`` se regenera la topología estándar con K + 1 nodos.
        """
        if self.graph is None:
            raise ConfigError("join_node necesita el grafo de la red")
        states, partition = join_node(self.states, self.partition, self.problem, columns, self.config.solver_seed)
        if neighbors is not None:
            graph = self.graph.with_node(neighbors)
        elif self.graph.kind is GraphKind.CUSTOM:
            raise ConfigError("grafo a medida: indica los vecinos del nodo nuevo")
        else:
            graph = build_graph(self.graph.kind, self.K + 1, wrap=self.wrap)
        self.states, self.partition, self.graph = states, partition, graph
        self.schedule = gossip_schedule([metropolis_weights(graph)], self.config.gossip_B)
        self._configure()
        return self.K - 1


def run(
    problem: ProblemSpec,
    partition: Partition,
    schedule: GossipSchedule,
    config: EngineConfig,
    *,
    graph: Optional[Graph] = None,
) -> RunTrace:
    """T rondas de CoLa desde x = 0, v_k = 0."""
    with ColaEngine(problem, partition, schedule, config, graph=graph) as engine:
        return engine.run()
