# tests/test_aceptacion.py
# Experimentos de aceptación a escala de escritorio: pytest -m slow
import numpy as np
import pytest

from comparativas.diging import RidgeSplit, grid_search_alpha, run_diging
from datos.matriz import SparseColMatrix
from datos.particion import UNASSIGNED, Partition, partition_columns
from datos.sinteticos import synthesize_regression
from experimentos.analisis import (
    compare_with_diging,
    linear_rate_fit,
    relative_suboptimality,
    rounds_to_target,
    trace_suboptimality,
)
from experimentos.referencia import compute_reference
from motor.cola import ColaEngine, gossip_step, run
from motor.configuracion import EngineConfig
from problema.especificacion import lasso_lambda_max, make_lasso, make_ridge
from topologia.calendario import gossip_schedule
from topologia.grafos import build_graph
from topologia.mezcla import metropolis_weights, uniform_weights

pytestmark = pytest.mark.slow

TARGET = 1e-4
# orden por β creciente a K=16; la rejilla es el toro 4x4
TOPOLOGIES = [("complete", {}), ("grid2d", {"wrap": True}), ("cycle3", {}), ("cycle2", {}), ("ring", {})]


def lasso_problem(d=50, n=64, seed=0, radius=None):
    A, b = synthesize_regression(d, n, 0.3, 0.1, seed=seed)
    return make_lasso(A, b, 0.1 * lasso_lambda_max(A, b), radius)


def standard_lasso():
    """d=100 muestras, n=400 coordenadas."""
    return lasso_problem(d=100, n=400)


def ridge_data(d=10, n=64, seed=0):
    rng = np.random.default_rng(seed)
    dense = rng.standard_normal((d, n))
    return SparseColMatrix.from_dense(dense), rng.standard_normal(n)


def ridge_problem(d=10, n=64, seed=0, lam=1.0, orientation="primal"):
    A, b = ridge_data(d, n, seed)
    return make_ridge(A, b, lam, orientation)


def network(kind, K, **graph_kw):
    graph = build_graph(kind, K, **graph_kw)
    return graph, gossip_schedule([metropolis_weights(graph)], 1)


def cola(problem, K=8, kind="ring", seed=0, graph_kw=None, **cfg):
    graph, schedule = network(kind, K, **(graph_kw or {}))
    partition = partition_columns(problem.n, K, seed)
    return run(problem, partition, schedule, EngineConfig(**cfg), graph=graph)


def rounds_until(problem, f_star, target, cap, K=8, kind="ring", graph_kw=None, **cfg):
    """Primera ronda con subóptimo ≤ target, parando ahí; None si no llega en ``cap``."""
    graph, schedule = network(kind, K, **(graph_kw or {}))
    partition = partition_columns(problem.n, K, 0)
    with ColaEngine(problem, partition, schedule, EngineConfig(**cfg), graph=graph) as engine:
        while engine.t < cap:
            rec = engine.step()
            if relative_suboptimality([rec.FA], f_star)[0] <= target:
                return rec.round
    return None


def reference(problem):
    return compute_reference(problem, 5_000_000, gap_target=1e-11)


def rounds_needed(trace, f_star, target=TARGET):
    return rounds_to_target(trace_suboptimality(trace, f_star), target, trace.column("round"))


def sound_along(trace, eps):
    """Todas las banderas ⇒ G_H ≤ ε, en cada evaluación de la traza."""
    return all(r.gap <= eps + 1e-9 for r in trace.records if r.cert_all_pass)


@pytest.fixture(scope="module")
def lasso():
    problem = lasso_problem()
    ref = reference(problem)
    assert ref.converged
    return problem, ref


# -------------------------------------------------------------
# Instancia estándar: identidad de consenso y descenso de H_A
# -------------------------------------------------------------

def test_standard_instance_keeps_consensus_and_descends():
    problem = standard_lasso()
    eps = 1e-2 * problem.primal_objective(np.zeros(problem.n))
    trace = cola(problem, K=16, kind="ring", rounds=300, kappa=5, cert_epsilon=eps, cert_every=10)
    assert trace.meta["sigma_prime"] == 16.0
    assert len(trace.records) == 301
    assert np.all(trace.column("consensus_error") <= 1e-9)
    HA = trace.column("HA")
    assert np.all(np.diff(HA) <= 1e-9 * (1.0 + np.abs(HA[:-1])))
    FA = trace.column("FA")
    assert FA[-1] < FA[0]
    assert sound_along(trace, eps)

def test_lasso_ring_reaches_the_reference(lasso):
    problem, ref = lasso
    trace = cola(problem, rounds=1500, kappa=5)
    sub = trace_suboptimality(trace, ref.f_star)
    assert sub[-1] <= 1e-6
    viol = trace.column("consensus_violation")
    assert viol[0] == 0.0
    Ax = problem.matrix.matvec(trace.x)
    assert viol[-1] <= 1e-8 * float(Ax @ Ax)
    assert np.all(trace.column("consensus_error") <= 1e-9)

def test_ridge_converges_linearly():
    problem = ridge_problem()
    assert problem.mu_g == 1.0
    ref = reference(problem)
    trace = cola(problem, rounds=300)
    fit = linear_rate_fit(trace_suboptimality(trace, ref.f_star))
    assert fit.slope < 0.0
    assert fit.r2 >= 0.98


# -------------------------------------------------------------
# Ejes de los experimentos: κ, topología, participación
# -------------------------------------------------------------

def test_more_local_work_needs_fewer_rounds(lasso):
    problem, ref = lasso
    needed = [rounds_until(problem, ref.f_star, TARGET, 20_000, kappa=k) for k in (1, 5, 20)]
    assert None not in needed
    assert needed[0] > needed[1] > needed[2]

def test_spectral_gap_orders_the_standard_topologies():
    betas = [metropolis_weights(build_graph(kind, 16, **kw)).beta for kind, kw in TOPOLOGIES]
    assert betas[0] < 1e-12
    assert all(a < b for a, b in zip(betas, betas[1:]))
    assert betas[-1] < 1.0

def test_better_connected_graphs_need_fewer_rounds(lasso):
    problem, ref = lasso
    needed = [
        rounds_until(problem, ref.f_star, TARGET, 20_000, K=16, kind=kind, graph_kw=kw, kappa=5)
        for kind, kw in TOPOLOGIES
    ]
    assert None not in needed
    for better, worse in zip(needed, needed[1:]):
        assert better <= 1.05 * worse

def test_fewer_participants_need_more_rounds(lasso):
    problem, ref = lasso
    at_300 = []
    for p in (0.5, 0.8, 1.0):
        graph, schedule = network("ring", 8)
        partition = partition_columns(problem.n, 8, 0)
        config = EngineConfig(kappa=5, dropout_p=p, dropout_seed=1)
        with ColaEngine(problem, partition, schedule, config, graph=graph) as engine:
            trace = engine.run(300)
            at_300.append(trace_suboptimality(trace, ref.f_star)[-1])
            while relative_suboptimality([trace.records[-1].FA], ref.f_star)[0] > 1e-3 and engine.t < 10_000:
                engine.step()
            assert relative_suboptimality([trace.records[-1].FA], ref.f_star)[0] <= 1e-3
    assert at_300[0] >= at_300[1] >= at_300[2]


# -------------------------------------------------------------
# Certificados
# -------------------------------------------------------------

def test_certificates_pass_at_ten_times_the_final_gap():
    problem = standard_lasso()
    K = 4
    plain = cola(problem, K=K, kind="complete", rounds=20, kappa=5)
    eps = 10.0 * plain.records[-1].gap
    assert eps > 0.0
    trace = cola(problem, K=K, kind="complete", rounds=20, kappa=5, cert_epsilon=eps, cert_every=1)
    np.testing.assert_array_equal(trace.column("gap"), plain.column("gap"))
    assert sound_along(trace, eps)
    assert trace.first_all_pass() is not None
    assert trace.meta["slack_ratio"] <= 1.0

def test_certificates_are_sound_with_dropout(lasso):
    problem, ref = lasso
    eps = 1e-3 * ref.f_star
    trace = cola(problem, K=8, kind="cycle2", rounds=600, kappa=5, dropout_p=0.8, dropout_seed=3,
                 cert_epsilon=eps, cert_every=5)
    assert trace.cert_rounds()
    assert sound_along(trace, eps)


# -------------------------------------------------------------
# Degeneración, determinismo, elasticidad
# -------------------------------------------------------------

def test_uniform_mixing_degenerates_to_centralized_averaging(lasso):
    problem, _ = lasso
    K = 8
    graph = build_graph("complete", K)
    schedule = gossip_schedule([uniform_weights(K)], 1)
    partition = partition_columns(problem.n, K, 0)
    with ColaEngine(problem, partition, schedule, EngineConfig(kappa=3), graph=graph) as engine:
        for _ in range(20):
            engine.step()
            mixed = gossip_step(engine.V, uniform_weights(K).weights)
            Ax = problem.matrix.matvec(engine.x)
            for row in mixed:
                assert np.linalg.norm(row - Ax) <= 1e-9 * (1.0 + np.linalg.norm(Ax))

def test_runs_are_reproducible(lasso):
    problem, _ = lasso
    a = cola(problem, rounds=100, kappa=3, dropout_p=0.7, dropout_seed=2, workers=1)
    b = cola(problem, rounds=100, kappa=3, dropout_p=0.7, dropout_seed=2, workers=3)
    for name in ("FA", "HA", "gap", "consensus_violation", "active_nodes", "elapsed_ms"):
        np.testing.assert_array_equal(a.column(name), b.column(name))
    np.testing.assert_array_equal(a.x, b.x)

def test_joining_node_keeps_the_optimum(lasso):
    problem, ref = lasso
    labels = [0 if i % 2 == 0 else UNASSIGNED for i in range(problem.n)]
    partition = Partition.from_assignments(labels, 1)
    graph, schedule = network("ring", 1)
    with ColaEngine(problem, partition, schedule, EngineConfig(kappa=5), graph=graph) as engine:
        engine.run(50)
        engine.join(partition.unassigned)
        trace = engine.run(1500)
    assert engine.K == 2
    assert trace_suboptimality(trace, ref.f_star)[-1] <= 1e-6


# -------------------------------------------------------------
# Línea base DIGing
# -------------------------------------------------------------

def test_cola_not_slower_than_diging():
    lam = 1.0
    primal = ridge_problem(d=20, n=64, seed=4, lam=lam)
    dual = ridge_problem(d=20, n=64, seed=4, lam=lam, orientation="dual")
    ridge_star = -reference(primal).f_star
    dual_ref = reference(dual)
    assert lam * dual_ref.f_star == pytest.approx(ridge_star, rel=1e-9)

    K = 8
    graph, schedule = network("ring", K)
    trace = run(dual, partition_columns(dual.n, K, 0), schedule, EngineConfig(rounds=400, kappa=5), graph=graph)

    split = RidgeSplit(primal, partition_columns(primal.n, K, 0))
    W = schedule.bases[0].weights
    alpha = grid_search_alpha(split, W, [1e-3, 3e-3, 1e-2, 3e-2], 200, ridge_star)
    dig = run_diging(split, W, alpha, 2000)
    # mismo óptimo
    assert dig.suboptimality(ridge_star)[-1] <= 1e-6

    cmp = compare_with_diging(trace, dig, dual_ref.f_star, primal.n, target=TARGET, diging_f_star=ridge_star)
    assert cmp.cola_rounds is not None
    assert cmp.cola_not_slower
