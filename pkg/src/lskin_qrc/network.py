"""Network topologies, on-site disorder and the coherent Hamiltonian."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .fock import SectorOperator, hop_operator, number_operator

TOPOLOGIES = ("chain", "irregular")


@dataclass(frozen=True)
class NetworkSpec:
    """A fully realized network: topology, couplings and site energies.

    ``edges`` holds ``(i, j, amplitude)`` triples with 1-based sites. For the
    chain the boundary link ``(L, 1)`` carries ``epsilon * J`` and is omitted
    when ``epsilon == 0``.
    """

    n_sites: int
    topology: str
    J: float
    W: float
    epsilon: float
    disorder: tuple
    edges: tuple
    seed: int | None = None
    edge_count: int | None = None
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon={self.epsilon} outside [0, 1]")
        if self.W < 0:
            raise ValueError("disorder width W must be non-negative")
        if len(self.disorder) != self.n_sites:
            raise ValueError("need one on-site energy per site")
        half = self.W / 2
        if any(abs(w) > half + 1e-15 for w in self.disorder):
            raise ValueError("on-site energy outside [-W/2, W/2]")
        seen = set()
        for i, j, _ in self.edges:
            if i == j:
                raise ValueError(f"self-loop on site {i}")
            if not (1 <= i <= self.n_sites and 1 <= j <= self.n_sites):
                raise ValueError(f"edge ({i}, {j}) references a missing site")
            pair = frozenset((i, j))
            # L=2 chain with a boundary link is the one legitimate double edge
            if pair in seen and not (self.topology == "chain" and self.n_sites == 2):
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add(pair)

    def to_dict(self):
        return {
            "n_sites": self.n_sites,
            "topology": self.topology,
            "J": self.J,
            "W": self.W,
            "epsilon": self.epsilon,
            "disorder": [float(w) for w in self.disorder],
            "edges": [[int(i), int(j), float(a)] for i, j, a in self.edges],
            "seed": self.seed,
            "edge_count": self.edge_count,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            n_sites=int(data["n_sites"]),
            topology=data["topology"],
            J=float(data["J"]),
            W=float(data["W"]),
            epsilon=float(data["epsilon"]),
            disorder=tuple(float(w) for w in data["disorder"]),
            edges=tuple((int(i), int(j), float(a)) for i, j, a in data["edges"]),
            seed=data.get("seed"),
            edge_count=data.get("edge_count"),
        )

    def fingerprint(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha1(blob).hexdigest()[:16]

    def with_epsilon(self, epsilon):
        """Same realization at a different boundary parameter."""
        if self.topology == "chain":
            edges = _chain_edges(self.n_sites, self.J, epsilon)
        else:
            edges = self.edges
        return NetworkSpec(self.n_sites, self.topology, self.J, self.W, epsilon,
                           self.disorder, edges, self.seed, self.edge_count)


def _chain_edges(n_sites, J, epsilon):
    edges = [(l, l + 1, J) for l in range(1, n_sites)]
    if epsilon > 0:
        edges.append((n_sites, 1, epsilon * J))
    return tuple(edges)


def sample_network(n_sites, topology="chain", J=1.0, W=0.0, epsilon=0.0,
                   edge_count=None, seed=None):
    """Draw a network realization.

    Parameters
    ----------
    n_sites : int
        Number of lattice sites, at least 2.
    topology : {"chain", "irregular"}
        Nearest-neighbour chain, or ``edge_count`` random distinct pairs with
        amplitude ``J`` each. Irregular couplings do not depend on ``epsilon``.
    edge_count : int, optional
        Irregular graphs only; defaults to ``2 * n_sites``, capped at the number
        of distinct pairs.
    seed : int or numpy.random.SeedSequence, optional
        Source of the disorder (and of the graph for irregular topologies).
    """
    if n_sites < 2:
        raise ValueError("a network needs at least two sites")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon={epsilon} outside [0, 1]")
    if W < 0:
        raise ValueError("disorder width W must be non-negative")
    rng = np.random.default_rng(seed)
    disorder = tuple(float(w) for w in rng.uniform(-W / 2, W / 2, size=n_sites)) if W > 0 \
        else (0.0,) * n_sites

    if topology == "chain":
        edges = _chain_edges(n_sites, J, epsilon)
        edge_count = None
    elif topology == "irregular":
        pairs = list(combinations(range(1, n_sites + 1), 2))
        if edge_count is None:
            # small lattices cannot host 2L distinct links
            edge_count = min(2 * n_sites, len(pairs))
        if edge_count > len(pairs):
            raise ValueError(f"edge_count={edge_count} exceeds the {len(pairs)} available pairs")
        if edge_count < 0:
            raise ValueError("edge_count must be non-negative")
        picks = np.sort(rng.choice(len(pairs), size=edge_count, replace=False))
        edges = tuple((pairs[k][0], pairs[k][1], J) for k in picks)
    else:
        raise ValueError(f"unknown topology {topology!r}")

    seed_repr = seed if isinstance(seed, (int, type(None))) else None
    return NetworkSpec(n_sites, topology, float(J), float(W), float(epsilon),
                       disorder, edges, seed_repr, edge_count)


def build_hamiltonian(spec, basis):
    """H = sum_l w_l n_l + sum_edges J_ij (a_i a_j^dag + a_i^dag a_j) on ``basis``."""
    if spec.n_sites != basis.n_sites:
        raise ValueError(f"network has {spec.n_sites} sites but the basis has {basis.n_sites}")
    d = basis.dim
    H = np.zeros((d, d), dtype=complex)
    for l, w in enumerate(spec.disorder, start=1):
        if w:
            H += w * number_operator(basis, l).matrix
    for i, j, amp in spec.edges:
        forward = hop_operator(basis, i, j).matrix
        H += amp * forward
        H += amp * forward.conj().T
    # symmetric fill keeps H bit-identical to its adjoint
    H = 0.5 * (H + H.conj().T)
    return SectorOperator(basis, H)
