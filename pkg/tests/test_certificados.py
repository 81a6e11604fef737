# tests/test_certificados.py
import math
from dataclasses import replace

import numpy as np
import pytest

from certificados.brecha import decentralized_gap, mixed_gap
from certificados.locales import (
    CertConstants,
    LocalGap,
    NeighborAverage,
    certificate_threshold,
    evaluate_certificates,
    local_certificate,
    make_cert_constants,
    neighborhood_threshold,
)
from datos.constantes import compute_data_constants
from datos.matriz import SparseColMatrix
from datos.particion import partition_columns
from datos.sinteticos import synthesize_regression
from errores import ConfigError
from experimentos.referencia import compute_reference
from motor.cola import ColaEngine, run
from motor.configuracion import EngineConfig
from problema.especificacion import lasso_lambda_max, make_lasso, make_ridge
from topologia.calendario import gossip_schedule
from topologia.grafos import build_graph
from topologia.mezcla import metropolis_weights, uniform_weights


def lasso(seed=0, n=20, d=25, radius=None):
    A, b = synthesize_regression(d, n, 0.6, 0.1, seed=seed)
    return make_lasso(A, b, 0.2 * lasso_lambda_max(A, b), radius)


def constants(problem, partition, beta=0.5, epsilon=1.0):
    data = compute_data_constants(problem.matrix, partition)
    return make_cert_constants(epsilon, problem.radius, beta, data)


def sound(all_pass: bool, gap: float, epsilon: float) -> bool:
    """Todas las banderas ⇒ G_H ≤ ε."""
    return (not all_pass) or gap <= epsilon + 1e-9


# -------------------------------------------------------------
# Brecha descentralizada
# -------------------------------------------------------------

def test_gap_at_origin_matches_closed_form():
    p = lasso()
    lam = p.separable.weight
    L = p.radius
    want = L * np.sum(np.maximum(0.0, np.abs(p.matrix.rmatvec(p.smooth.offset)) - lam))
    got = decentralized_gap(p, np.zeros(p.n), np.zeros((4, p.d)))
    assert got == pytest.approx(want, rel=1e-12)

def test_consensus_recovers_centralized_gap():
    p = lasso(seed=1)
    x = np.random.default_rng(1).uniform(-0.5, 0.5, p.n)
    V = np.tile(p.matrix.matvec(x), (5, 1))
    assert decentralized_gap(p, x, V) == pytest.approx(p.duality_gap(x), rel=1e-10, abs=1e-10)

def test_gap_ignores_node_order():
    p = lasso(seed=2)
    rng = np.random.default_rng(2)
    x = rng.uniform(-0.5, 0.5, p.n)
    V = rng.standard_normal((6, p.d))
    perm = rng.permutation(6)
    assert decentralized_gap(p, x, V[perm]) == pytest.approx(decentralized_gap(p, x, V), rel=1e-13)

def test_gap_is_nonnegative_when_average_is_ax():
    p = lasso(seed=3)
    rng = np.random.default_rng(3)
    for _ in range(10):
        x = rng.uniform(-0.2, 0.2, p.n)
        D = rng.standard_normal((4, p.d))
        V = p.matrix.matvec(x) + D - D.mean(axis=0)
        assert decentralized_gap(p, x, V) >= -1e-9

def test_mixed_gap_with_uniform_w_is_centralized_at_the_mean():
    p = lasso(seed=4)
    rng = np.random.default_rng(4)
    x = rng.uniform(-0.3, 0.3, p.n)
    V = rng.standard_normal((4, p.d))
    got = mixed_gap(p, x, V, uniform_weights(4).weights)
    assert got == pytest.approx(decentralized_gap(p, x, V.mean(axis=0)), rel=1e-12)


# -------------------------------------------------------------
# Umbral de desacuerdo
# -------------------------------------------------------------

def test_threshold_small_example():
    c = CertConstants(epsilon=1.0, radius=1.0, beta=0.0, sum_nk2_sigma=2.0, K=2)
    assert certificate_threshold(c) == pytest.approx(0.25, rel=1e-15)
    assert c.local_threshold == 0.25

def test_doubling_radius_halves_threshold():
    c = CertConstants(0.3, 2.0, 0.4, 17.0, 4)
    d = CertConstants(0.3, 4.0, 0.4, 17.0, 4)
    assert certificate_threshold(d) == pytest.approx(certificate_threshold(c) / 2.0, rel=1e-15)

def test_threshold_monotone_in_epsilon_and_gap():
    base = certificate_threshold(CertConstants(1.0, 1.0, 0.5, 9.0, 3))
    assert certificate_threshold(CertConstants(2.0, 1.0, 0.5, 9.0, 3)) > base
    assert certificate_threshold(CertConstants(1.0, 1.0, 0.2, 9.0, 3)) > base
    assert certificate_threshold(CertConstants(1.0, 1.0, 1.0 - 1e-12, 9.0, 3)) < 1e-10

def test_threshold_rejects_no_spectral_gap():
    with pytest.raises(ConfigError):
        certificate_threshold(CertConstants(1.0, 1.0, 1.0, 1.0, 2))

def test_make_constants_inflates_sigma():
    p = lasso()
    part = partition_columns(p.n, 4, seed=0)
    data = compute_data_constants(p.matrix, part)
    c = make_cert_constants(0.1, p.radius, 0.3, data)
    assert c.sum_nk2_sigma >= data.sum_nk2_sigma
    assert c.K == 4
    with pytest.raises(ConfigError):
        make_cert_constants(0.0, p.radius, 0.3, data)


# -------------------------------------------------------------
# Condiciones locales
# -------------------------------------------------------------

def test_local_gaps_sum_to_global_gap_at_consensus():
    p = lasso(seed=5)
    part = partition_columns(p.n, 4, seed=5)
    x = np.random.default_rng(5).uniform(-0.3, 0.3, p.n)
    V = np.tile(p.matrix.matvec(x), (4, 1))
    W = metropolis_weights(build_graph("ring", 4)).weights
    report = evaluate_certificates(p, part, x, V, W, constants(p, part))
    assert np.sum(report.local_gaps) == pytest.approx(report.gap, rel=1e-10, abs=1e-10)
    np.testing.assert_allclose(report.deviations, 0.0, atol=1e-12)
    assert report.cond15.all()

def test_single_node_deviation_is_vacuous():
    p = lasso(seed=6)
    part = partition_columns(p.n, 1, seed=6)
    x = np.zeros(p.n)
    v = np.random.default_rng(6).standard_normal(p.d)
    c = constants(p, part, beta=0.0)
    c14, c15, local, dev = local_certificate(p, part.blocks[0], v, x, p.f_grad(v)[None, :], c)
    assert dev == 0.0 and c15

def test_uniform_and_mixing_neighbor_averages_differ():
    p = lasso(seed=7)
    part = partition_columns(p.n, 4, seed=7)
    rng = np.random.default_rng(7)
    x = rng.uniform(-0.3, 0.3, p.n)
    V = rng.standard_normal((4, p.d))
    # estrella: las filas de W no son uniformes
    W = np.array([[0.25, 0.25, 0.25, 0.25], [0.25, 0.75, 0, 0], [0.25, 0, 0.75, 0], [0.25, 0, 0, 0.75]])
    c = constants(p, part)
    a = evaluate_certificates(p, part, x, V, W, c, neighbor_average=NeighborAverage.MIXING)
    b = evaluate_certificates(p, part, x, V, W, c, neighbor_average="uniform")
    assert a.deviations[0] == pytest.approx(b.deviations[0])
    assert a.deviations[1] != pytest.approx(b.deviations[1])

def test_plain_and_scaled_local_gaps_differ_by_the_share():
    p = lasso(seed=8)
    part = partition_columns(p.n, 4, seed=8)
    v = np.random.default_rng(8).standard_normal(p.d)
    c = constants(p, part)
    block = part.blocks[0]
    g = p.f_grad(v)
    x0 = np.zeros(block.size)
    _, _, scaled, _ = local_certificate(p, block, v, x0, g[None, :], replace(c, local_gap=LocalGap.SCALED))
    _, _, full, _ = local_certificate(p, block, v, x0, g[None, :], replace(c, local_gap="plain"))
    assert full - scaled == pytest.approx((1.0 - 1.0 / 4) * float(v @ g), rel=1e-10)
    # un solo vecino (el propio nodo): la conjugada se evalúa en el mismo punto
    _, _, own, _ = local_certificate(p, block, v, x0, g[None, :], c)
    assert own == pytest.approx(scaled - float(v @ g) / 4, rel=1e-10, abs=1e-12)

def test_neighborhood_local_gaps_are_nonnegative():
    p = lasso(seed=13, radius=2.0)
    part = partition_columns(p.n, 4, seed=13)
    W = metropolis_weights(build_graph("ring", 4)).weights
    rng = np.random.default_rng(13)
    for _ in range(10):
        x = rng.uniform(-0.5, 0.5, p.n)
        V = rng.standard_normal((4, p.d))
        report = evaluate_certificates(p, part, x, V, W, constants(p, part))
        assert np.all(report.local_gaps >= -1e-9)

def test_neighborhood_local_gaps_vanish_at_a_consensus_optimum():
    p = lasso(seed=14)
    part = partition_columns(p.n, 4, seed=14)
    ref = compute_reference(p, 200_000, gap_target=1e-13)
    V = np.tile(p.matrix.matvec(ref.x), (4, 1))
    W = metropolis_weights(build_graph("ring", 4)).weights
    report = evaluate_certificates(p, part, ref.x, V, W, constants(p, part, epsilon=1e-6))
    assert np.all(report.local_gaps >= -1e-9)
    assert np.sum(report.local_gaps) == pytest.approx(report.gap, abs=1e-10)
    assert report.all_pass

def test_gap_beyond_local_terms_is_within_the_disagreement_bound():
    # G_H − Σ ℓ_k ≤ (τ/K)D² + 2L·S·βD cuando (1/K)Σ v_k = Ax
    p = lasso(seed=15, radius=2.0)
    K = 4
    part = partition_columns(p.n, K, seed=15)
    mixing = metropolis_weights(build_graph("ring", K))
    W, beta = mixing.weights, mixing.beta
    c = constants(p, part, beta=beta)
    rng = np.random.default_rng(15)
    for scale in (1e-3, 1e-1, 1.0):
        x = rng.uniform(-0.5, 0.5, p.n)
        D = scale * rng.standard_normal((K, p.d))
        V = p.matrix.matvec(x) + D - D.mean(axis=0)
        report = evaluate_certificates(p, part, x, V, W, c)
        G = p.f_grad(V)
        spread = float(np.linalg.norm(G - G.mean(axis=0)))
        bound = c.tau / K * spread**2 + 2.0 * c.radius * math.sqrt(c.sum_nk2_sigma) * beta * spread
        assert report.gap - np.sum(report.local_gaps) <= bound + 1e-9
        # el desacuerdo global se controla con el local
        assert spread <= np.linalg.norm(report.deviations) / (1.0 - beta) + 1e-12

def test_neighborhood_threshold_closed_form():
    c = CertConstants(epsilon=1.0, radius=1.0, beta=0.0, sum_nk2_sigma=2.0, K=2)
    # sin término lineal: u = √(Kε/(2τ)) = 1
    assert neighborhood_threshold(c) == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-15)
    assert c.deviation_threshold == neighborhood_threshold(c)
    d = CertConstants(0.3, 2.0, 0.4, 17.0, 4, tau=0.5)
    u = neighborhood_threshold(d) * math.sqrt(4) / (1.0 - 0.4)
    lhs = 0.5 / 4 * u**2 + 2.0 * 2.0 * math.sqrt(17.0) * 0.4 * u
    assert lhs == pytest.approx(0.15, rel=1e-12)
    assert replace(d, local_gap=LocalGap.SCALED).deviation_threshold == certificate_threshold(d)

def test_ridge_has_no_local_certificates():
    rng = np.random.default_rng(9)
    p = make_ridge(SparseColMatrix.from_dense(rng.standard_normal((4, 8))), rng.standard_normal(8), 1.0)
    part = partition_columns(8, 2, seed=0)
    c = CertConstants(1.0, 1.0, 0.5, 1.0, 2)
    with pytest.raises(ConfigError):
        evaluate_certificates(p, part, np.zeros(8), np.zeros((2, 4)), np.full((2, 2), 0.5), c)

def test_engine_skips_certificates_for_ridge():
    rng = np.random.default_rng(10)
    p = make_ridge(SparseColMatrix.from_dense(rng.standard_normal((4, 12))), rng.standard_normal(12), 1.0)
    part = partition_columns(12, 3, seed=0)
    graph = build_graph("ring", 3)
    trace = run(p, part, gossip_schedule([metropolis_weights(graph)], 1),
                EngineConfig(rounds=10, cert_epsilon=1e-3, cert_every=1), graph=graph)
    assert all(r.cert_all_pass is None for r in trace.records)
    assert trace.certificates == []


# -------------------------------------------------------------
# Certificados a lo largo de una corrida
# -------------------------------------------------------------

def test_certificates_run_every_c_rounds():
    p = lasso(seed=11)
    part = partition_columns(p.n, 4, seed=11)
    graph = build_graph("ring", 4)
    trace = run(p, part, gossip_schedule([metropolis_weights(graph)], 1),
                EngineConfig(rounds=25, cert_epsilon=1e-2, cert_every=10), graph=graph)
    assert trace.cert_rounds() == [0, 10, 20]
    assert len(trace.certificates) == 3 * 4

def test_flags_are_sound_along_a_run():
    p = lasso(seed=12)
    part = partition_columns(p.n, 4, seed=12)
    graph = build_graph("complete", 4)
    eps = 1e-2
    trace = run(p, part, gossip_schedule([metropolis_weights(graph)], 1),
                EngineConfig(rounds=80, kappa=3, cert_epsilon=eps, cert_every=1), graph=graph)
    for r in trace.records:
        assert r.cert_all_pass is not None
        assert sound(r.cert_all_pass, r.gap, eps)
    for c in trace.certificates:
        assert c.local_threshold == pytest.approx(eps / 8)
        assert math.isfinite(c.deviation_threshold)

def test_first_all_pass_at_ten_times_the_final_gap():
    p = lasso(seed=16)
    part = partition_columns(p.n, 4, seed=16)
    graph = build_graph("complete", 4)
    schedule = gossip_schedule([metropolis_weights(graph)], 1)
    plain = run(p, part, schedule, EngineConfig(rounds=15, kappa=3), graph=graph)
    eps = 10.0 * plain.records[-1].gap
    trace = run(p, part, schedule, EngineConfig(rounds=15, kappa=3, cert_epsilon=eps, cert_every=1), graph=graph)
    assert trace.first_all_pass() is not None
    for r in trace.records:
        assert sound(r.cert_all_pass, r.gap, eps)

def test_certificates_use_the_mixing_matrix_of_the_round():
    p = lasso(seed=17)
    part = partition_columns(p.n, 4, seed=17)
    ring = metropolis_weights(build_graph("ring", 4))
    complete = metropolis_weights(build_graph("complete", 4))
    schedule = gossip_schedule([ring, complete], 1)
    config = EngineConfig(kappa=2, cert_epsilon=1e-2, cert_every=1)
    with ColaEngine(p, part, schedule, config, graph=build_graph("ring", 4)) as engine:
        for t in (1, 2):
            engine.step()
            W = (ring if t == 1 else complete).weights
            want = evaluate_certificates(p, part, engine.x, engine.V, W, engine.cert_constants)
            got = [c.grad_deviation for c in engine.trace.certificates if c.round == t]
            np.testing.assert_allclose(got, want.deviations, rtol=1e-12, atol=1e-15)
