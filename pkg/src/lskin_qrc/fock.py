"""Fixed-excitation bosonic Fock sectors and ladder-operator products on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, sqrt

import numpy as np

DEFAULT_MAX_STATES = 5000


def _compositions(total, parts):
    # lexicographically descending occupation vectors
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class FockBasis:
    """Ordered basis of the ``n_bosons`` excitation sector on ``n_sites`` modes.

    Sites are 1-based in every public method, matching the lattice labels
    used throughout the package.
    """

    n_sites: int
    n_bosons: int
    states: tuple = field(repr=False)
    index: dict = field(repr=False, compare=False)

    @property
    def dim(self):
        return len(self.states)

    @property
    def occupations(self):
        """(dim, n_sites) integer array of occupation numbers."""
        return np.array(self.states, dtype=int).reshape(self.dim, self.n_sites)

    def identity(self):
        return SectorOperator(self, np.eye(self.dim, dtype=complex))

    def check_site(self, site):
        if not 1 <= site <= self.n_sites:
            raise IndexError(f"site {site} outside 1..{self.n_sites}")


@dataclass(frozen=True, eq=False)
class SectorOperator:
    """Dense operator restricted to a Fock sector."""

    basis: FockBasis
    matrix: np.ndarray

    def __post_init__(self):
        d = self.basis.dim
        if self.matrix.shape != (d, d):
            raise ValueError(f"operator shape {self.matrix.shape} does not match sector dimension {d}")

    def dag(self):
        return SectorOperator(self.basis, self.matrix.conj().T)

    def __add__(self, other):
        return SectorOperator(self.basis, self.matrix + other.matrix)

    def __mul__(self, scalar):
        return SectorOperator(self.basis, scalar * self.matrix)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return SectorOperator(self.basis, self.matrix @ other.matrix)


def sector_dimension(n_sites, n_bosons):
    return comb(n_sites + n_bosons - 1, n_bosons)


def enumerate_sector(n_sites, n_bosons, max_states=DEFAULT_MAX_STATES):
    """Enumerate all occupation vectors with ``sum(n) == n_bosons``.

    States are ordered lexicographically descending, so for a single boson
    state ``i`` (0-based) is the particle sitting on site ``i + 1``.
    """
    if n_sites < 1:
        raise ValueError("need at least one site")
    if n_bosons < 0:
        raise ValueError("boson number must be non-negative")
    size = sector_dimension(n_sites, n_bosons)
    if size > max_states:
        raise ValueError(
            f"sector with L={n_sites}, N_b={n_bosons} has {size} states, above the cap of {max_states}"
        )
    states = tuple(_compositions(n_bosons, n_sites))
    index = {s: k for k, s in enumerate(states)}
    return FockBasis(n_sites, n_bosons, states, index)


def hop_operator(basis, source, target):
    """Embed ``a_target^dagger a_source`` on the sector."""
    basis.check_site(source)
    basis.check_site(target)
    if source == target:
        raise ValueError("hop requires distinct sites; use number_operator for the diagonal")
    i, j = source - 1, target - 1
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for col, state in enumerate(basis.states):
        n_from = state[i]
        if n_from == 0:
            continue
        moved = list(state)
        moved[i] -= 1
        moved[j] += 1
        row = basis.index[tuple(moved)]
        mat[row, col] = sqrt(n_from) * sqrt(state[j] + 1)
    return SectorOperator(basis, mat)


def number_operator(basis, site):
    basis.check_site(site)
    diag = [state[site - 1] for state in basis.states]
    return SectorOperator(basis, np.diag(np.asarray(diag, dtype=complex)))


def total_number_operator(basis):
    return SectorOperator(basis, basis.n_bosons * np.eye(basis.dim, dtype=complex))
