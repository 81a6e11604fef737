# tests/test_topologia.py
import numpy as np
import pytest

from errores import ConfigError, ParseError, PreflightError
from topologia.calendario import gossip_schedule
from topologia.espectro import consensus_norm, jacobi_eigenvalues, product_beta, spectral_beta
from topologia.grafos import (
    GraphKind,
    build_graph,
    graph_from_edges,
    is_connected,
    load_adjacency,
    ring_matchings,
)
from topologia.mezcla import MixingMatrix, absorb_inactive, metropolis_weights, uniform_weights
from validacion import check_mixing_matrix

STANDARD = ["ring", "cycle2", "cycle3", "grid2d", "complete"]


def is_valid_mixing(W: np.ndarray, graph=None) -> bool:
    try:
        check_mixing_matrix(W, graph)
    except ConfigError:
        return False
    return True


# -------------------------------------------------------------
# Grafos
# -------------------------------------------------------------

def test_ring_four_nodes():
    g = build_graph("ring", 4)
    assert g.n_edges == 4
    assert g.degrees == (2, 2, 2, 2)

def test_complete_five_nodes():
    assert build_graph(GraphKind.COMPLETE, 5).n_edges == 10

def test_cycle2_degrees():
    assert set(build_graph("cycle2", 6).degrees) == {4}

def test_cycle3_degrees():
    assert set(build_graph("cycle3", 16).degrees) == {6}

def test_grid_needs_square_or_rows():
    with pytest.raises(ConfigError):
        build_graph("grid2d", 12)
    g = build_graph("grid2d", 12, rows=3)
    assert g.K == 12 and is_connected(g)

def test_grid_without_and_with_wrap():
    flat = build_graph("grid2d", 16)
    torus = build_graph("grid2d", 16, wrap=True)
    assert flat.n_edges == 24
    assert torus.n_edges == 32
    assert set(torus.degrees) == {4}

@pytest.mark.parametrize("kind", STANDARD)
@pytest.mark.parametrize("K", [4, 9, 16])
def test_standard_graphs_are_connected_and_loop_free(kind, K):
    g = build_graph(kind, K)
    assert is_connected(g)
    assert all(i != j for i, j in g.edges)
    for i in range(K):
        for j in g.neighbors(i):
            assert i in g.neighbors(j)

def test_single_node_graph():
    g = build_graph("ring", 1)
    assert g.n_edges == 0 and is_connected(g)

def test_custom_requires_adjacency_file():
    with pytest.raises(ConfigError):
        build_graph("custom", 4)

def test_load_adjacency(tmp_path):
    path = tmp_path / "grafo.txt"
    path.write_text("# estrella\n0 1\n0 2\n\n", encoding="utf-8")
    g = load_adjacency(path)
    assert g.K == 3 and g.n_edges == 2
    assert g.degrees == (2, 1, 1)

def test_load_adjacency_reports_line(tmp_path):
    path = tmp_path / "malo.txt"
    path.write_text("0 1\n1 x\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        load_adjacency(path)
    assert info.value.line == 2

def test_ring_matchings_cover_the_ring():
    even, odd = ring_matchings(8)
    assert not is_connected(even) and not is_connected(odd)
    assert even.edges | odd.edges == build_graph("ring", 8).edges
    assert not (even.edges & odd.edges)


# -------------------------------------------------------------
# Pesos de Metropolis
# -------------------------------------------------------------

def test_metropolis_ring_four():
    W = metropolis_weights(build_graph("ring", 4)).weights
    assert W[0, 1] == pytest.approx(1 / 3) and W[0, 3] == pytest.approx(1 / 3)
    np.testing.assert_allclose(np.diag(W), 1 / 3)
    assert W[0, 2] == 0.0

def test_metropolis_star():
    W = metropolis_weights(graph_from_edges(3, [(0, 1), (0, 2)])).weights
    assert W[0, 1] == pytest.approx(1 / 3) and W[0, 2] == pytest.approx(1 / 3)
    assert W[0, 0] == pytest.approx(1 / 3)
    assert W[1, 1] == pytest.approx(2 / 3) and W[2, 2] == pytest.approx(2 / 3)

def test_metropolis_complete_is_uniform():
    K = 6
    W = metropolis_weights(build_graph("complete", K)).weights
    np.testing.assert_allclose(W, np.full((K, K), 1 / K), atol=1e-15)

@pytest.mark.parametrize("kind", STANDARD)
def test_metropolis_invariants(kind):
    g = build_graph(kind, 16)
    W = metropolis_weights(g)
    assert is_valid_mixing(W.weights, g)
    assert 0.0 <= W.beta < 1.0

def test_metropolis_rejects_disconnected():
    g = graph_from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(PreflightError) as info:
        metropolis_weights(g)
    assert info.value.check == "connectivity"

def test_check_detects_asymmetry_and_foreign_edges():
    W = np.array([[0.5, 0.5, 0.0], [0.4, 0.5, 0.1], [0.1, 0.0, 0.9]])
    assert not is_valid_mixing(W)
    g = build_graph("ring", 3)
    assert is_valid_mixing(uniform_weights(3).weights, g)
    path = graph_from_edges(3, [(0, 1), (1, 2)])
    assert not is_valid_mixing(uniform_weights(3).weights, path)

def test_mixing_matrix_neighbors():
    W = metropolis_weights(build_graph("ring", 5))
    assert W.neighbors(0) == (0, 1, 4)


# -------------------------------------------------------------
# Espectro
# -------------------------------------------------------------

def test_uniform_matrix_beta_zero():
    assert spectral_beta(uniform_weights(7).weights) == pytest.approx(0.0, abs=1e-12)

def test_identity_beta_one():
    assert spectral_beta(np.eye(5)) == pytest.approx(1.0)

@pytest.mark.parametrize("kind", STANDARD)
def test_beta_matches_dense_eigensolver(kind):
    W = metropolis_weights(build_graph(kind, 16)).weights
    eig = np.linalg.eigvalsh(W)[::-1]
    want = float(np.max(np.abs(eig[1:])))
    assert abs(spectral_beta(W) - want) <= 1e-10

def test_jacobi_on_random_symmetric():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((9, 9))
    S = M + M.T
    np.testing.assert_allclose(jacobi_eigenvalues(S), np.linalg.eigvalsh(S), atol=1e-10)

def test_beta_ordering_k16():
    betas = {
        "complete": metropolis_weights(build_graph("complete", 16)).beta,
        "grid2d": metropolis_weights(build_graph("grid2d", 16, wrap=True)).beta,
        "cycle3": metropolis_weights(build_graph("cycle3", 16)).beta,
        "cycle2": metropolis_weights(build_graph("cycle2", 16)).beta,
        "ring": metropolis_weights(build_graph("ring", 16)).beta,
    }
    order = ["complete", "grid2d", "cycle3", "cycle2", "ring"]
    values = [betas[k] for k in order]
    assert all(a < b for a, b in zip(values, values[1:]))
    # 4x4 sin vuelta: entre cycle2 y ring
    flat = metropolis_weights(build_graph("grid2d", 16)).beta
    assert betas["cycle2"] < flat < betas["ring"]

def test_ring_beta_closed_form():
    K = 16
    beta = metropolis_weights(build_graph("ring", K)).beta
    assert beta == pytest.approx((1 + 2 * np.cos(2 * np.pi / K)) / 3, abs=1e-12)

def test_geometric_consensus_decay():
    W = metropolis_weights(build_graph("cycle2", 12))
    rng = np.random.default_rng(1)
    z = rng.standard_normal((12, 3))
    start = consensus_norm(z)
    for t in range(1, 30):
        z = W.weights @ z
        assert consensus_norm(z) <= W.beta ** t * start * (1 + 1e-9) + 1e-14

def test_product_beta_of_single_matrix_is_beta():
    W = metropolis_weights(build_graph("ring", 10))
    assert product_beta([W.weights]) == pytest.approx(W.beta, abs=1e-10)


# -------------------------------------------------------------
# Calendarios de gossip
# -------------------------------------------------------------

def test_static_schedule_repeats_w():
    W = metropolis_weights(build_graph("ring", 6))
    s = gossip_schedule([W], 1)
    assert s.static
    for t in range(3):
        (M,) = s.matrices_for_round(t)
        np.testing.assert_array_equal(M, W.weights)

def test_three_steps_equal_cube():
    W = metropolis_weights(build_graph("ring", 6))
    s = gossip_schedule([W], 3)
    np.testing.assert_allclose(s.round_product(0), np.linalg.matrix_power(W.weights, 3), atol=1e-15)
    assert s.effective_beta == pytest.approx(W.beta ** 3)

def test_alternating_matchings_contract():
    even, odd = ring_matchings(8)
    bases = [metropolis_weights(even, require_connected=False), metropolis_weights(odd, require_connected=False)]
    assert bases[0].beta == pytest.approx(1.0)
    s = gossip_schedule(bases, 2)
    assert not s.static
    assert s.effective_beta < 1.0
    assert s.matrices_for_round(0)[0] is bases[0].weights
    assert s.matrices_for_round(0)[1] is bases[1].weights

def test_odd_b_alternates_offsets():
    even, odd = ring_matchings(6)
    bases = [metropolis_weights(even, require_connected=False), metropolis_weights(odd, require_connected=False)]
    s = gossip_schedule(bases, 1)
    assert s.matrices_for_round(0)[0] is bases[0].weights
    assert s.matrices_for_round(1)[0] is bases[1].weights
    # un solo emparejamiento por ronda no mezcla
    assert s.effective_beta == pytest.approx(1.0)

def test_schedule_rejects_bad_b():
    with pytest.raises(ConfigError):
        gossip_schedule([uniform_weights(3)], 0)


# -------------------------------------------------------------
# Nodos inactivos
# -------------------------------------------------------------

def test_absorb_inactive_isolates_and_stays_stochastic():
    g = build_graph("ring", 6)
    W = metropolis_weights(g).weights
    active = np.array([True, False, True, True, False, True])
    Wt = absorb_inactive(W, active)
    assert is_valid_mixing(Wt, g)
    assert Wt[1, 1] == 1.0 and Wt[4, 4] == 1.0
    assert Wt[0, 5] == W[0, 5]

def test_absorb_inactive_all_active_is_identity_map():
    W = metropolis_weights(build_graph("ring", 4)).weights
    assert absorb_inactive(W, np.ones(4, dtype=bool)) is W

def test_mixing_matrix_is_read_only():
    W = MixingMatrix(np.eye(2))
    with pytest.raises(ValueError):
        W.weights[0, 0] = 0.5
