"""Propagation, stationary states, spectra and convergence diagnostics."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .fock import hop_operator, number_operator
from .liouvillian import Liouvillian, liouvillian_for, unvec, vec

ZERO_MODE_TOL = 1e-9
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = -1e-9


class StateValidationError(ValueError):
    """A matrix violates the density-matrix invariants."""


class DegenerateSteadyStateError(RuntimeError):
    """The generator has more than one zero mode on the sector."""


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    basis: object
    matrix: np.ndarray

    def __post_init__(self):
        d = self.basis.dim
        if self.matrix.shape != (d, d):
            raise StateValidationError(f"state shape {self.matrix.shape} does not match sector dimension {d}")

    @property
    def dim(self):
        return self.basis.dim

    def hermiticity_residual(self):
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def trace(self):
        return complex(np.trace(self.matrix))

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T)).min())

    def validate(self, hermitian_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL, psd_tol=PSD_TOL):
        herm = self.hermiticity_residual()
        if herm > hermitian_tol:
            raise StateValidationError(f"not Hermitian (residual {herm:.3e})")
        tr = self.trace()
        if abs(tr - 1) > trace_tol:
            raise StateValidationError(f"trace {tr} differs from 1")
        lam = self.min_eigenvalue()
        if lam < psd_tol:
            raise StateValidationError(f"negative eigenvalue {lam:.3e}")
        return self

    @classmethod
    def maximally_mixed(cls, basis):
        return cls(basis, np.eye(basis.dim, dtype=complex) / basis.dim)


@dataclass(frozen=True, eq=False)
class Propagator:
    basis: object
    matrix: np.ndarray
    s: float | None = None
    epsilon: float | None = None
    dt: float | None = None

    def apply(self, rho):
        mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
        out = unvec(self.matrix @ vec(mat), self.basis.dim)
        if isinstance(rho, DensityMatrix):
            return DensityMatrix(self.basis, out)
        return out

    def __matmul__(self, other):
        return Propagator(self.basis, self.matrix @ other.matrix)


def expm(liouvillian, dt):
    """``exp(L dt)`` by Pade scaling-and-squaring."""
    if not dt > 0:
        raise ValueError("time step must be positive")
    mat = liouvillian.matrix
    if not np.all(np.isfinite(mat)):
        raise ValueError("generator has non-finite entries")
    prov = liouvillian.provenance or {}
    spec = prov.get("dissipator")
    out = scipy.linalg.expm(mat * dt)
    return Propagator(liouvillian.basis, out,
                      getattr(spec, "s", None), getattr(spec, "epsilon", None), dt)


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    gap: float
    n_zero_modes: int

    @property
    def mixing_time(self):
        return np.inf if self.gap <= 0 else 1.0 / self.gap


def spectrum(liouvillian, zero_tol=ZERO_MODE_TOL):
    """Full spectrum sorted by decreasing real part, with the dissipative gap."""
    lam = np.linalg.eigvals(liouvillian.matrix)
    lam = lam[np.lexsort((lam.imag, -lam.real))]
    zero = np.abs(lam) < zero_tol
    rest = lam[~zero]
    gap = float(-rest.real.max()) if rest.size else np.inf
    return Spectrum(lam, gap, int(zero.sum()))


@dataclass(frozen=True, eq=False)
class SteadyState:
    state: DensityMatrix
    residual: float
    gap: float

    @property
    def matrix(self):
        return self.state.matrix


def steady_state(liouvillian, zero_tol=ZERO_MODE_TOL):
    """Unique trace-one fixed point of the generator on its sector.

    Raises
    ------
    DegenerateSteadyStateError
        If more than one eigenvalue has modulus below ``zero_tol``.
    """
    spec = spectrum(liouvillian, zero_tol)
    if spec.n_zero_modes != 1:
        raise DegenerateSteadyStateError(
            f"found {spec.n_zero_modes} zero modes (|lambda| < {zero_tol}); "
            "the stationary state is not unique"
        )
    M = liouvillian.matrix
    _, _, vh = np.linalg.svd(M)
    null = vh[-1].conj()
    rho = unvec(null, liouvillian.dim)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-14:
        raise DegenerateSteadyStateError("null vector is traceless")
    rho = rho / tr
    state = DensityMatrix(liouvillian.basis, rho).validate()
    residual = float(np.linalg.norm(M @ vec(rho)))
    return SteadyState(state, residual, spec.gap)


def trace_distance(a, b):
    a = a.matrix if isinstance(a, DensityMatrix) else a
    b = b.matrix if isinstance(b, DensityMatrix) else b
    diff = a - b
    return 0.5 * float(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())


def _fixed_epsilon(network, dissipator, epsilon):
    if epsilon is None:
        return network, dissipator
    return network.with_epsilon(epsilon), replace(dissipator, epsilon=epsilon)


def separability_check(network, basis, dissipator, s1, s2, epsilon=None):
    """Frobenius distance between the steady states at inputs ``s1`` and ``s2``."""
    network, dissipator = _fixed_epsilon(network, dissipator, epsilon)
    if s1 == s2:
        return 0.0
    r1 = steady_state(liouvillian_for(network, basis, dissipator.with_input(s1))).matrix
    r2 = steady_state(liouvillian_for(network, basis, dissipator.with_input(s2))).matrix
    return float(np.linalg.norm(r1 - r2))


class PropagatorCache:
    """Propagators keyed by ``(s, epsilon, dt, network fingerprint)``.

    Reads are lock-free; inserts take an exclusive lock. ``max_entries``
    bounds memory for continuous input alphabets.
    """

    def __init__(self, max_entries=64):
        self.max_entries = max_entries
        self._store = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def __len__(self):
        return len(self._store)

    def get(self, key, build):
        value = self._store.get(key)
        if value is not None:
            self.hits += 1
            return value
        self.misses += 1
        value = build()
        with self._lock:
            if key not in self._store and len(self._store) < self.max_entries:
                self._store[key] = value
        return value


def esp_check(network, basis, dissipator, inputs, rho1, rho2, dt, cache=None):
    """Trace distance between two trajectories driven by the same inputs.

    Returns the distance before the first input followed by the distance
    after every step (length ``len(inputs) + 1``).
    """
    states = []
    for rho in (rho1, rho2):
        if isinstance(rho, DensityMatrix):
            if rho.basis.n_bosons != basis.n_bosons or rho.basis.n_sites != basis.n_sites:
                raise StateValidationError(
                    "initial states must lie in the same excitation sector as the basis"
                )
            states.append(rho.matrix)
        else:
            rho = np.asarray(rho)
            if rho.shape != (basis.dim, basis.dim):
                raise StateValidationError("initial state is not supported on the sector")
            states.append(rho)
    a, b = (vec(x) for x in states)
    if cache is None:
        cache = PropagatorCache()
    key_net = network.fingerprint()
    out = [trace_distance(states[0], states[1])]
    for s in inputs:
        s = float(s)
        P = cache.get((s, dissipator.epsilon, dt, key_net),
                      lambda: expm(liouvillian_for(network, basis, dissipator.with_input(s)), dt).matrix)
        a = P @ a
        b = P @ b
        out.append(trace_distance(unvec(a, basis.dim), unvec(b, basis.dim)))
    return np.asarray(out)


@dataclass(frozen=True, eq=False)
class Profile:
    populations: np.ndarray
    coherences: np.ndarray


def population_profile(rho):
    """``<n_l>`` and ``<a_1 a_l^dagger>`` for every site ``l``."""
    basis = rho.basis
    mat = rho.matrix
    L = basis.n_sites
    pops = np.array([np.trace(mat @ number_operator(basis, l).matrix).real for l in range(1, L + 1)])
    coh = np.empty(L, dtype=complex)
    coh[0] = np.trace(mat @ (number_operator(basis, 1).matrix + np.eye(basis.dim)))
    for l in range(2, L + 1):
        # a_1 a_l^dag == a_l^dag a_1 for l != 1
        coh[l - 1] = np.trace(mat @ hop_operator(basis, 1, l).matrix)
    return Profile(pops, coh)


def loglog_slope(x, y):
    """Least-squares slope of ``log y`` against ``log x``."""
    slope, _ = np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)
    return float(slope)
