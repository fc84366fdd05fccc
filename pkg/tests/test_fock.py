from itertools import product
from math import comb, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lskin_qrc.fock import enumerate_sector, hop_operator, number_operator


def brute_force_states(L, N):
    return [s for s in product(range(N + 1), repeat=L) if sum(s) == N]


def ladder_apply(state, source, target):
    """a_target^dag a_source on an occupation tuple, with 0-based sites."""
    n = list(state)
    amp = sqrt(n[source])
    if amp == 0:
        return 0.0, None
    n[source] -= 1
    amp *= sqrt(n[target] + 1)
    n[target] += 1
    return amp, tuple(n)


def test_single_excitation_is_site_basis():
    basis = enumerate_sector(10, 1)
    assert basis.dim == 10
    for i, state in enumerate(basis.states):
        assert state == tuple(1 if l == i else 0 for l in range(10))


def test_two_bosons_two_sites():
    assert enumerate_sector(2, 2).states == ((2, 0), (1, 1), (0, 2))


def test_four_sites_three_bosons_matches_enumeration():
    basis = enumerate_sector(4, 3)
    expected = brute_force_states(4, 3)
    assert basis.dim == len(expected) == 20
    assert set(basis.states) == set(expected)
    assert list(basis.states) == sorted(expected, reverse=True)


def test_rejects_empty_lattice_and_large_sectors():
    with pytest.raises(ValueError):
        enumerate_sector(0, 1)
    with pytest.raises(ValueError):
        enumerate_sector(20, 6)
    assert enumerate_sector(20, 6, max_states=10**6).dim == comb(25, 6)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 4))
def test_sector_invariants(L, N):
    basis = enumerate_sector(L, N)
    assert basis.dim == comb(L + N - 1, N)
    assert all(sum(s) == N for s in basis.states)
    assert all(basis.index[s] == k for k, s in enumerate(basis.states))


def test_hop_single_particle():
    basis = enumerate_sector(3, 1)
    m = hop_operator(basis, 1, 2).matrix
    expected = np.zeros((3, 3))
    expected[basis.index[(0, 1, 0)], basis.index[(1, 0, 0)]] = 1.0
    np.testing.assert_array_equal(m, expected)


def test_hop_bosonic_enhancement():
    basis = enumerate_sector(2, 2)
    m = hop_operator(basis, 1, 2).matrix
    assert m[basis.index[(1, 1)], basis.index[(2, 0)]] == pytest.approx(sqrt(2))


@pytest.mark.parametrize("L,N", [(3, 2), (4, 3), (2, 4)])
def test_hop_matches_ladder_algebra(L, N):
    basis = enumerate_sector(L, N)
    for source in range(1, L + 1):
        for target in range(1, L + 1):
            if source == target:
                continue
            oracle = np.zeros((basis.dim, basis.dim))
            for col, state in enumerate(brute_force_states(L, N)):
                amp, new = ladder_apply(state, source - 1, target - 1)
                if new is not None:
                    oracle[basis.index[new], basis.index[state]] = amp
            np.testing.assert_allclose(hop_operator(basis, source, target).matrix, oracle, atol=0)


def test_hop_errors():
    basis = enumerate_sector(3, 1)
    with pytest.raises(IndexError):
        hop_operator(basis, 0, 2)
    with pytest.raises(IndexError):
        hop_operator(basis, 1, 4)
    with pytest.raises(ValueError):
        hop_operator(basis, 2, 2)


def test_number_operators():
    basis = enumerate_sector(5, 1)
    np.testing.assert_array_equal(np.diag(number_operator(basis, 3).matrix), [0, 0, 1, 0, 0])
    basis = enumerate_sector(2, 2)
    np.testing.assert_array_equal(np.diag(number_operator(basis, 1).matrix), [2, 1, 0])
    with pytest.raises(IndexError):
        number_operator(basis, 3)


@pytest.mark.parametrize("L,N", [(4, 1), (3, 3), (5, 2)])
def test_total_number_and_adjoints(L, N):
    basis = enumerate_sector(L, N)
    total = sum(number_operator(basis, l).matrix for l in range(1, L + 1))
    np.testing.assert_array_equal(total, N * np.eye(basis.dim))
    for i in range(1, L + 1):
        for j in range(1, L + 1):
            if i != j:
                np.testing.assert_array_equal(hop_operator(basis, i, j).matrix,
                                              hop_operator(basis, j, i).matrix.conj().T)
                comm = total @ hop_operator(basis, i, j).matrix - hop_operator(basis, i, j).matrix @ total
                assert np.abs(comm).max() == 0
