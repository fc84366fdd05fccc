"""Quantum reservoir pipeline: propagation, shot noise, readout and capacity."""

from __future__ import annotations

import logging
import time
import warnings
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import scipy.linalg

from .dynamics import DensityMatrix, PropagatorCache
from .features import from_features, real_generator, to_features
from .fock import enumerate_sector
from .liouvillian import DissipatorSpec, InputAffineLiouvillian
from .network import sample_network
from .tasks import generate_inputs, target_series
from .validation import (as_seed_sequence, check_features, check_input_series,
                         check_n_samples, check_targets, child_seed)

log = logging.getLogger(__name__)

DEFAULT_RCOND = 1e-10
# alphabets larger than this are treated as continuous and not cached
CACHE_ALPHABET = 64


@dataclass(frozen=True)
class ReservoirConfig:
    """Physical and pipeline hyperparameters (units of ``J``, ``hbar = 1``).

    The network itself is resampled per realization from these values;
    ``n_samples=None`` is the ideal, noiseless readout.
    """

    n_sites: int = 10
    n_bosons: int = 1
    topology: str = "chain"
    J: float = 1.0
    W: float = 0.01
    epsilon: float = 0.0
    gamma: float = 0.1
    dephasing_gamma: float | None = None
    dephasing: bool = True
    dt: float = 1.0
    edge_count: int | None = None
    n_samples: float | None = None
    noise_phase: str = "both"
    realizations: int = 100
    seed: int = 0
    ridge: float = 0.0
    rcond: float = DEFAULT_RCOND

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        if self.noise_phase not in ("both", "test"):
            raise ValueError("noise_phase must be 'both' or 'test'")
        check_n_samples(self.n_samples)
        self.dissipator()

    def dissipator(self, s=0.5):
        return DissipatorSpec(self.gamma, s, self.epsilon, self.dephasing_gamma, self.dephasing)

    def sample_network(self, seed):
        return sample_network(self.n_sites, self.topology, self.J, self.W, self.epsilon,
                              self.edge_count, seed)

    def to_dict(self):
        out = asdict(self)
        if out["n_samples"] is not None and np.isinf(out["n_samples"]):
            out["n_samples"] = None
        return out


def initial_state(basis, seed=None):
    """Random pure state from a normalized complex Gaussian vector."""
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
    psi /= np.linalg.norm(psi)
    return DensityMatrix(basis, np.outer(psi, psi.conj()))


class FeatureDynamics:
    """Step propagators in the real feature representation.

    ``step(s)`` returns ``exp(L(s) dt)`` acting on feature vectors; inputs
    from small alphabets (e.g. XOR bits) hit a cache.
    """

    def __init__(self, network, basis, dissipator, dt):
        self.network = network
        self.basis = basis
        self.dissipator = dissipator
        self.dt = dt
        family = InputAffineLiouvillian(network, basis, dissipator)
        self.R0 = real_generator(family.L0)
        self.dR = real_generator(family.dL)
        self.cache = PropagatorCache(max_entries=CACHE_ALPHABET)
        self._key = network.fingerprint()

    def _build(self, s):
        return scipy.linalg.expm((self.R0 + s * self.dR) * self.dt)

    def step(self, s, cached=True):
        if not cached:
            return self._build(s)
        return self.cache.get((s, self.dissipator.epsilon, self.dt, self._key), lambda: self._build(s))

    def run(self, inputs, f0):
        inputs = np.asarray(inputs, dtype=float)
        cached = np.unique(inputs).size <= CACHE_ALPHABET
        out = np.empty((inputs.size, f0.size))
        f = np.asarray(f0, dtype=float)
        for k, s in enumerate(inputs):
            f = self.step(float(s), cached) @ f
            out[k] = f
        if not np.all(np.isfinite(out)):
            raise FloatingPointError("reservoir state became non-finite during propagation")
        return out


def evolve_sequence(config, inputs, seed=None, network=None, rho0=None):
    """Feature vector after each input, starting from ``rho0``.

    Row ``k`` is the state after injecting ``inputs[k]``. When ``network``
    or ``rho0`` are omitted they are drawn from ``seed``.
    """
    inputs = check_input_series(inputs, "inputs")
    seq = as_seed_sequence(seed)
    basis = enumerate_sector(config.n_sites, config.n_bosons)
    if network is None:
        network = config.sample_network(child_seed(seq, 0))
    if rho0 is None:
        rho0 = initial_state(basis, child_seed(seq, 1))
    dyn = FeatureDynamics(network, basis, config.dissipator(), config.dt)
    return dyn.run(inputs, to_features(rho0.matrix))


def add_shot_noise(features, n_samples, rng=None):
    """Add i.i.d. Gaussian noise of width ``1/sqrt(n_samples)`` to every entry."""
    n = check_n_samples(n_samples)
    features = np.asarray(features, dtype=float)
    if np.isinf(n):
        return features.copy()
    rng = np.random.default_rng(rng)
    return features + rng.standard_normal(features.shape) / np.sqrt(n)


@dataclass(frozen=True, eq=False)
class Readout:
    coef: np.ndarray
    intercept: float

    def predict(self, X):
        return np.asarray(X) @ self.coef + self.intercept


def train_readout(X, y, ridge=0.0, rcond=DEFAULT_RCOND):
    """Least-squares linear readout with intercept.

    Solved by an SVD pseudoinverse of ``[1, X]`` that discards singular
    values below ``rcond * s_max``; ``ridge > 0`` adds a Tikhonov penalty on
    the feature weights. ``rcond <= 0`` disables the cutoff, in which case a
    rank-deficient design is an error.
    """
    X = check_features(X)
    y = check_targets(y, X.shape[0])
    n, p = X.shape
    if n < p + 1:
        warnings.warn(f"{n} training rows for {p + 1} weights; the fit is underdetermined",
                      stacklevel=2)
    A = np.hstack([np.ones((n, 1)), X])
    if ridge > 0:
        penalty = np.sqrt(ridge) * np.eye(p + 1)[1:]
        A = np.vstack([A, penalty])
        y = np.concatenate([y, np.zeros(p)])
    if rcond <= 0:
        if np.linalg.matrix_rank(A) < A.shape[1]:
            raise np.linalg.LinAlgError("design matrix is rank deficient and no cutoff was requested")
        w = np.linalg.lstsq(A, y, rcond=None)[0]
    else:
        w = np.linalg.lstsq(A, y, rcond=rcond)[0]
    return Readout(w[1:], float(w[0]))


def capacity(predictions, targets):
    """Squared correlation ``cov(y, p)^2 / (var(y) var(p))``.

    Constant predictions give 0; constant targets are rejected.
    """
    p = np.asarray(predictions, dtype=float).ravel()
    y = np.asarray(targets, dtype=float).ravel()
    if p.size != y.size:
        raise ValueError("predictions and targets differ in length")
    if y.size < 2:
        raise ValueError("need at least two points")
    yc = y - y.mean()
    pc = p - p.mean()
    vy = yc @ yc
    if vy == 0:
        raise ValueError("target series is constant; capacity is undefined")
    vp = pc @ pc
    # spread at rounding level of the mean counts as constant
    if vp <= (1e-13 * max(1.0, abs(p.mean()))) ** 2 * p.size:
        return 0.0
    return float((yc @ pc) ** 2 / (vy * vp))


@dataclass
class RealizationResult:
    index: int
    capacity: float
    coef: np.ndarray = field(repr=False)
    intercept: float = 0.0
    predictions: np.ndarray = field(default=None, repr=False)
    seconds: float = 0.0


@dataclass
class RunResult:
    config: ReservoirConfig
    task: object
    realizations: list
    failures: list = field(default_factory=list)

    @property
    def capacities(self):
        return np.array([r.capacity for r in self.realizations])

    @property
    def mean(self):
        return float(self.capacities.mean()) if self.realizations else float("nan")

    @property
    def std(self):
        return float(self.capacities.std()) if self.realizations else float("nan")

    @property
    def coef(self):
        return self.realizations[0].coef if self.realizations else None

    @property
    def intercept(self):
        return self.realizations[0].intercept if self.realizations else None

    @property
    def predictions(self):
        return self.realizations[0].predictions if self.realizations else None

    def rows(self):
        ns = self.config.n_samples
        for r in self.realizations:
            yield {
                "seed": self.config.seed,
                "realization": r.index,
                "epsilon": self.config.epsilon,
                "n_samples": "inf" if ns is None or np.isinf(ns) else ns,
                "W": self.config.W,
                "topology": self.config.topology,
                "task": self.task.label(),
                "capacity": r.capacity,
            }

    def summary(self):
        return {
            "mean": self.mean,
            "std": self.std,
            "n_realizations": len(self.realizations),
            "failures": list(self.failures),
            "config": self.config.to_dict(),
            "task": asdict(self.task),
        }


def realization_seeds(master_seed, index):
    """Independent streams for one realization: reservoir, inputs, noise."""
    root = child_seed(np.random.SeedSequence(master_seed), index)
    return child_seed(root, 0), child_seed(root, 1), child_seed(root, 2)


def realization_features(config, task, index):
    """Clean features, inputs and targets of one realization (noise not applied)."""
    from .estimator import QuantumReservoir

    res_seed, input_seed, _ = realization_seeds(config.seed, index)
    inputs = generate_inputs(task, np.random.default_rng(input_seed))
    targets = target_series(task, inputs)
    reservoir = QuantumReservoir.from_config(config, random_state=res_seed).fit()
    return reservoir.transform(inputs), inputs, targets


def score_features(features, targets, task, config, n_samples, noise_seed):
    """Noise, train, test; returns ``(capacity, readout, test predictions)``."""
    _, train, test = task.segments()
    rng = np.random.default_rng(noise_seed)
    Xtr, Xte = features[train], features[test]
    # draw both blocks from one stream so train/test noise is independent of the phase flag
    noisy_tr = add_shot_noise(Xtr, n_samples, rng)
    noisy_te = add_shot_noise(Xte, n_samples, rng)
    if config.noise_phase == "test":
        noisy_tr = Xtr
    readout = train_readout(noisy_tr, targets[train], config.ridge, config.rcond)
    pred = readout.predict(noisy_te)
    return capacity(pred, targets[test]), readout, pred


def _one_realization(config, task, index):
    t0 = time.perf_counter()
    features, _, targets = realization_features(config, task, index)
    *_, noise_seed = realization_seeds(config.seed, index)
    c, readout, pred = score_features(features, targets, task, config, config.n_samples, noise_seed)
    return RealizationResult(index, c, readout.coef, readout.intercept, pred,
                             time.perf_counter() - t0)


def _map(fn, items, n_jobs):
    if n_jobs in (None, 1):
        return [fn(i) for i in items]
    from joblib import Parallel, delayed
    return Parallel(n_jobs=n_jobs)(delayed(fn)(i) for i in items)


def _guarded(fn):
    def call(index):
        try:
            return fn(index)
        except (ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
            return exc
    return call


def run_experiment(config, task, n_jobs=1, progress=None):
    """Average the task capacity over ``config.realizations`` realizations.

    Every realization draws fresh disorder (and graph), inputs, initial
    state and noise from ``config.seed``. Failed realizations are logged,
    listed in ``failures`` and excluded from the statistics.
    """
    outcomes = _map(_guarded(lambda i: _one_realization(config, task, i)),
                    range(config.realizations), n_jobs)
    result = RunResult(config, task, [])
    for index, out in enumerate(outcomes):
        if isinstance(out, Exception):
            log.warning("realization %d failed: %s", index, out)
            warnings.warn(f"realization {index} failed and was excluded: {out}", stacklevel=2)
            result.failures.append({"realization": index, "error": str(out)})
            continue
        result.realizations.append(out)
        if progress is not None:
            progress(out)
    return result


def sweep_noise(config, task, n_samples_grid, n_jobs=1, progress=None):
    """Capacities on a grid of sample counts, sharing clean trajectories.

    All grid points of a realization reuse the same noise stream, so the
    comparison across ``N_s`` differs only in noise amplitude.
    """
    grid = [check_n_samples(n) for n in n_samples_grid]

    def one(index):
        t0 = time.perf_counter()
        features, _, targets = realization_features(config, task, index)
        *_, noise_seed = realization_seeds(config.seed, index)
        out = []
        for n in grid:
            c, readout, pred = score_features(features, targets, task, config, n, noise_seed)
            out.append(RealizationResult(index, c, readout.coef, readout.intercept, pred,
                                         time.perf_counter() - t0))
        return out

    outcomes = _map(_guarded(one), range(config.realizations), n_jobs)
    results = {n: RunResult(replace(config, n_samples=None if np.isinf(n) else n), task, [])
               for n in grid}
    for index, out in enumerate(outcomes):
        for n_i, n in enumerate(grid):
            if isinstance(out, Exception):
                results[n].failures.append({"realization": index, "error": str(out)})
            else:
                results[n].realizations.append(out[n_i])
        if isinstance(out, Exception):
            warnings.warn(f"realization {index} failed and was excluded: {out}", stacklevel=2)
        elif progress is not None:
            progress(out[0])
    return [results[n] for n in grid]


def memory_profile(config, task, delays, n_jobs=1, progress=None):
    """STM capacity for several delays from one trajectory per realization."""
    tasks = [replace(task, kind="stm", delay=int(tau)) for tau in delays]

    def one(index):
        t0 = time.perf_counter()
        features, inputs, _ = realization_features(config, tasks[0], index)
        *_, noise_seed = realization_seeds(config.seed, index)
        out = []
        for t in tasks:
            targets = target_series(t, inputs)
            c, readout, pred = score_features(features, targets, t, config, config.n_samples, noise_seed)
            out.append(RealizationResult(index, c, readout.coef, readout.intercept, pred,
                                         time.perf_counter() - t0))
        return out

    outcomes = _map(_guarded(one), range(config.realizations), n_jobs)
    results = [RunResult(config, t, []) for t in tasks]
    for index, out in enumerate(outcomes):
        if isinstance(out, Exception):
            warnings.warn(f"realization {index} failed and was excluded: {out}", stacklevel=2)
            for r in results:
                r.failures.append({"realization": index, "error": str(out)})
            continue
        for r, o in zip(results, out):
            r.realizations.append(o)
        if progress is not None:
            progress(out[0])
    return results


def state_after(config, inputs, seed=None):
    """Density matrix after driving a fresh realization with ``inputs``."""
    features = evolve_sequence(config, inputs, seed)
    d = enumerate_sector(config.n_sites, config.n_bosons).dim
    return from_features(features[-1], d)
