"""GKLS superoperators for input-driven asymmetric hopping on a ring.

Vectorization is column-stacking throughout: ``vec(A @ rho @ B) ==
kron(B.T, A) @ vec(rho)`` with ``vec(x) = x.reshape(-1, order="F")``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace

import numpy as np

from .fock import hop_operator, number_operator
from .network import build_hamiltonian

BOUNDARIES = ("open", "periodic", "interpolated")

DUMP_MAGIC = b"LSKINSO\x01"
DUMP_CONVENTION = b"colstack"


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, d=None):
    if d is None:
        d = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape(d, d, order="F")


@dataclass(frozen=True)
class DissipatorSpec:
    """Rates for the input-encoded hopping and the on-site dephasing.

    Right hops get ``gamma * s``, left hops ``gamma * (1 - s)``; the two
    boundary hops between sites ``L`` and ``1`` are additionally scaled by
    ``epsilon``. ``dephasing_gamma=None`` reuses ``gamma``.
    """

    gamma: float = 0.1
    s: float = 0.5
    epsilon: float = 0.0
    dephasing_gamma: float | None = None
    dephasing: bool = True

    def __post_init__(self):
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"input s={self.s} outside [0, 1]")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon={self.epsilon} outside [0, 1]")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.dephasing_gamma is not None and self.dephasing_gamma < 0:
            raise ValueError("dephasing_gamma must be non-negative")

    @property
    def dephasing_rate(self):
        if not self.dephasing:
            return 0.0
        return self.gamma if self.dephasing_gamma is None else self.dephasing_gamma

    def with_input(self, s):
        return replace(self, s=float(s))


@dataclass(frozen=True, eq=False)
class Liouvillian:
    basis: object
    matrix: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.basis.dim

    def apply(self, rho):
        """Action on a density matrix (returns a matrix)."""
        return unvec(self.matrix @ vec(rho), self.dim)


def _boundary_scale(boundary, epsilon):
    if boundary == "open":
        return 0.0
    if boundary == "periodic":
        return 1.0
    if boundary == "interpolated":
        return epsilon
    raise ValueError(f"unknown boundary {boundary!r}; expected one of {BOUNDARIES}")


def hopping_jumps(basis, spec, boundary="interpolated"):
    """Right/left hopping jumps ``(rate, operator)`` along the ring 1..L."""
    L = basis.n_sites
    right = spec.gamma * spec.s
    left = spec.gamma * (1.0 - spec.s)
    jumps = []
    for l in range(1, L):
        jumps.append((right, hop_operator(basis, l, l + 1)))
        jumps.append((left, hop_operator(basis, l + 1, l)))
    scale = _boundary_scale(boundary, spec.epsilon)
    if scale > 0 and L >= 2:
        jumps.append((scale * right, hop_operator(basis, L, 1)))
        jumps.append((scale * left, hop_operator(basis, 1, L)))
    return jumps


def jump_set(basis, spec, boundary="interpolated"):
    """All jumps of the generator: hopping pairs plus one dephasing per site."""
    jumps = hopping_jumps(basis, spec, boundary)
    rate = spec.dephasing_rate
    if rate > 0:
        jumps.extend((rate, number_operator(basis, l)) for l in range(1, basis.n_sites + 1))
    return jumps


def hamiltonian_superoperator(H):
    d = H.shape[0]
    eye = np.eye(d)
    return -1j * (np.kron(eye, H) - np.kron(H.T, eye))


def dissipator_superoperator(jumps, d):
    eye = np.eye(d)
    out = np.zeros((d * d, d * d), dtype=complex)
    for rate, op in jumps:
        if rate == 0:
            continue
        A = op.matrix if hasattr(op, "matrix") else np.asarray(op)
        AdA = A.conj().T @ A
        out += rate * (np.kron(A.conj(), A) - 0.5 * np.kron(eye, AdA) - 0.5 * np.kron(AdA.T, eye))
    return out


def build_liouvillian(H, jumps, provenance=None):
    """Superoperator of ``-i[H, rho] + sum_i r_i (A rho A^+ - {A^+ A, rho}/2)``."""
    basis = H.basis
    d = basis.dim
    for _, op in jumps:
        if op.matrix.shape != (d, d):
            raise ValueError("jump operator does not live on the Hamiltonian's sector")
    mat = hamiltonian_superoperator(H.matrix) + dissipator_superoperator(jumps, d)
    return Liouvillian(basis, mat, dict(provenance or {}))


def interpolated_dissipator(basis, spec):
    """Hopping dissipator ``D_OB + epsilon (D_PB - D_OB)`` (no dephasing, no H)."""
    jumps = hopping_jumps(basis, spec, "interpolated")
    mat = dissipator_superoperator(jumps, basis.dim)
    return Liouvillian(basis, mat, {"dissipator": spec, "part": "hopping"})


def boundary_dissipator(basis, spec, boundary):
    """Hopping dissipator with explicit ``open`` or ``periodic`` boundaries."""
    jumps = hopping_jumps(basis, spec, boundary)
    return Liouvillian(basis, dissipator_superoperator(jumps, basis.dim),
                       {"dissipator": spec, "part": "hopping", "boundary": boundary})


def liouvillian_for(network, basis, spec, H=None):
    """Full generator for a network realization at the input stored in ``spec``."""
    if H is None:
        H = build_hamiltonian(network, basis)
    return build_liouvillian(H, jump_set(basis, spec),
                             {"network": network.fingerprint(), "dissipator": spec})


class InputAffineLiouvillian:
    """``L(s) = L(0) + s (L(1) - L(0))`` from two assembled endpoints."""

    def __init__(self, network, basis, spec):
        self.network = network
        self.basis = basis
        self.spec = spec
        H = build_hamiltonian(network, basis)
        self.L0 = liouvillian_for(network, basis, spec.with_input(0.0), H).matrix
        self.dL = liouvillian_for(network, basis, spec.with_input(1.0), H).matrix - self.L0

    def matrix(self, s):
        return self.L0 + s * self.dL

    def at(self, s):
        return Liouvillian(self.basis, self.matrix(s),
                           {"network": self.network.fingerprint(),
                            "dissipator": self.spec.with_input(s)})


def write_superoperator(path, liouvillian):
    """Dump as: magic, uint64 d, 8-byte convention tag, row-major complex128 LE."""
    d = liouvillian.dim
    with open(path, "wb") as fh:
        fh.write(DUMP_MAGIC)
        fh.write(struct.pack("<Q", d))
        fh.write(DUMP_CONVENTION)
        fh.write(np.ascontiguousarray(liouvillian.matrix, dtype="<c16").tobytes(order="C"))


def read_superoperator(path):
    """Inverse of :func:`write_superoperator`; returns ``(d, matrix)``."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != DUMP_MAGIC:
            raise ValueError(f"{path}: not a superoperator dump")
        (d,) = struct.unpack("<Q", fh.read(8))
        tag = fh.read(8)
        if tag != DUMP_CONVENTION:
            raise ValueError(f"{path}: unsupported vectorization convention {tag!r}")
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != d ** 4:
        raise ValueError(f"{path}: expected {d ** 4} entries, found {data.size}")
    return d, data.reshape(d * d, d * d).astype(complex)
