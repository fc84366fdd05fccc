import numpy as np
import pytest

from lskin_qrc.fock import enumerate_sector, number_operator
from lskin_qrc.network import NetworkSpec, build_hamiltonian, sample_network


def test_open_chain_has_no_boundary_edge():
    net = sample_network(10, "chain", J=1.0, W=0.0, epsilon=0.0)
    assert len(net.edges) == 9
    assert all({i, j} != {1, 10} for i, j, _ in net.edges)


def test_periodic_chain_boundary_equals_bulk():
    net = sample_network(10, "chain", J=0.7, epsilon=1.0)
    assert len(net.edges) == 10
    assert (10, 1, 0.7) in net.edges


def test_zero_width_disorder():
    net = sample_network(6, "chain", W=0.0, seed=3)
    assert net.disorder == (0.0,) * 6


def test_disorder_bounds_and_determinism():
    a = sample_network(50, "chain", W=2.0, seed=11)
    b = sample_network(50, "chain", W=2.0, seed=11)
    c = sample_network(50, "chain", W=2.0, seed=12)
    assert a == b
    assert a != c
    assert max(abs(w) for w in a.disorder) <= 1.0


def test_irregular_edges_distinct():
    net = sample_network(8, "irregular", edge_count=20, seed=4)
    pairs = {frozenset((i, j)) for i, j, _ in net.edges}
    assert len(pairs) == 20
    assert all(i != j for i, j, _ in net.edges)
    assert all(a == 1.0 for *_, a in net.edges)
    assert sample_network(8, "irregular", seed=4).edge_count == 16


def test_irregular_ignores_epsilon_in_couplings():
    a = sample_network(8, "irregular", epsilon=0.0, seed=4)
    b = sample_network(8, "irregular", epsilon=0.9, seed=4)
    assert a.edges == b.edges


def test_sampling_errors():
    with pytest.raises(ValueError):
        sample_network(5, "irregular", edge_count=11)
    with pytest.raises(ValueError):
        sample_network(5, "chain", epsilon=1.5)
    with pytest.raises(ValueError):
        sample_network(1, "chain")
    with pytest.raises(ValueError):
        sample_network(5, "ring")


def test_spec_rejects_self_loops_and_duplicates():
    with pytest.raises(ValueError):
        NetworkSpec(3, "irregular", 1.0, 0.0, 0.0, (0.0,) * 3, ((1, 1, 1.0),))
    with pytest.raises(ValueError):
        NetworkSpec(3, "irregular", 1.0, 0.0, 0.0, (0.0,) * 3, ((1, 2, 1.0), (2, 1, 1.0)))


def test_two_site_hamiltonian():
    net = NetworkSpec(2, "chain", 0.8, 1.0, 0.0, (0.3, -0.2), ((1, 2, 0.8),))
    H = build_hamiltonian(net, enumerate_sector(2, 1)).matrix
    np.testing.assert_allclose(H, [[0.3, 0.8], [0.8, -0.2]])


def test_boundary_coupling_scales_with_epsilon():
    net = sample_network(10, "chain", J=1.0, W=0.0, epsilon=0.5)
    H = build_hamiltonian(net, enumerate_sector(10, 1)).matrix
    assert H[9, 0] == 0.5 and H[0, 9] == 0.5


@pytest.mark.parametrize("topology,N", [("chain", 1), ("irregular", 1), ("chain", 2), ("irregular", 3)])
def test_hamiltonian_hermitian_and_number_conserving(topology, N):
    net = sample_network(5, topology, J=1.0, W=1.0, epsilon=0.4, seed=9)
    basis = enumerate_sector(5, N)
    H = build_hamiltonian(net, basis).matrix
    assert np.array_equal(H, H.conj().T)
    total = sum(number_operator(basis, l).matrix for l in range(1, 6))
    assert np.abs(H @ total - total @ H).max() < 1e-13


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        build_hamiltonian(sample_network(4), enumerate_sector(5, 1))


def test_round_trip_serialization():
    net = sample_network(7, "irregular", W=0.5, epsilon=0.3, seed=2)
    assert NetworkSpec.from_dict(net.to_dict()) == net
    assert net.with_epsilon(0.3) == net


def test_irregular_default_capped_on_small_lattices():
    net = sample_network(4, "irregular", seed=0)
    assert net.edge_count == 6
    assert len({frozenset((i, j)) for i, j, _ in net.edges}) == 6
