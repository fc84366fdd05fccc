"""scikit-learn compatible front end.

``QuantumReservoir`` maps a scalar input series to density-matrix features,
``ShotNoise`` perturbs them like finite measurement statistics would, and
``LinearReadout`` is the least-squares output layer scored by capacity.
Washout trimming is left to the caller because it changes the row count.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .features import feature_labels, to_features
from .fock import enumerate_sector
from .network import NetworkSpec
from .reservoir import (FeatureDynamics, ReservoirConfig, add_shot_noise, capacity,
                        initial_state, train_readout)
from .validation import as_seed_sequence, check_features, check_input_series, check_n_samples, child_seed


class QuantumReservoir(TransformerMixin, BaseEstimator):
    """Input-driven open bosonic network used as a reservoir.

    Parameters
    ----------
    n_sites, n_bosons : int
        Lattice size and excitation sector.
    topology : {"chain", "irregular"}
    J, W : float
        Coherent hopping amplitude and on-site disorder width.
    epsilon : float
        Boundary parameter in [0, 1]; 0 is open, 1 periodic.
    gamma : float
        Incoherent hopping strength. Inputs set the right/left rates to
        ``gamma * s`` and ``gamma * (1 - s)``.
    dephasing_gamma : float or None
        On-site dephasing rate, ``None`` reuses ``gamma``.
    dt : float
        Evolution time per input.
    network : NetworkSpec or dict, optional
        A fixed realization to use instead of sampling one.
    random_state : int, SeedSequence or None
        Seeds the network draw and the random initial state.
    """

    def __init__(self, n_sites=10, n_bosons=1, topology="chain", J=1.0, W=0.01,
                 epsilon=0.0, gamma=0.1, dephasing_gamma=None, dephasing=True, dt=1.0,
                 edge_count=None, network=None, random_state=None):
        self.n_sites = n_sites
        self.n_bosons = n_bosons
        self.topology = topology
        self.J = J
        self.W = W
        self.epsilon = epsilon
        self.gamma = gamma
        self.dephasing_gamma = dephasing_gamma
        self.dephasing = dephasing
        self.dt = dt
        self.edge_count = edge_count
        self.network = network
        self.random_state = random_state

    @classmethod
    def from_config(cls, config, **overrides):
        params = {k: getattr(config, k) for k in (
            "n_sites", "n_bosons", "topology", "J", "W", "epsilon", "gamma",
            "dephasing_gamma", "dephasing", "dt", "edge_count")}
        params.update(overrides)
        return cls(**params)

    def _config(self):
        return ReservoirConfig(
            n_sites=self.n_sites, n_bosons=self.n_bosons, topology=self.topology, J=self.J,
            W=self.W, epsilon=self.epsilon, gamma=self.gamma,
            dephasing_gamma=self.dephasing_gamma, dephasing=self.dephasing, dt=self.dt,
            edge_count=self.edge_count, realizations=1)

    def fit(self, X=None, y=None):
        """Draw the network and initial state. ``X`` is only validated."""
        if X is not None:
            check_input_series(X)
        config = self._config()
        seq = as_seed_sequence(self.random_state)
        self.basis_ = enumerate_sector(self.n_sites, self.n_bosons)
        if self.network is None:
            self.network_ = config.sample_network(child_seed(seq, 0))
        else:
            net = self.network
            self.network_ = net if isinstance(net, NetworkSpec) else NetworkSpec.from_dict(net)
            if self.network_.n_sites != self.n_sites:
                raise ValueError("supplied network size differs from n_sites")
        self.initial_state_ = initial_state(self.basis_, child_seed(seq, 1))
        self.dynamics_ = FeatureDynamics(self.network_, self.basis_, config.dissipator(), self.dt)
        self.n_features_out_ = self.basis_.dim ** 2
        return self

    def transform(self, X):
        """Features after each input, always starting from the fitted initial state."""
        check_is_fitted(self, "dynamics_")
        s = check_input_series(X)
        return self.dynamics_.run(s, to_features(self.initial_state_.matrix))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "basis_")
        return np.asarray(feature_labels(self.basis_.dim), dtype=object)


class ShotNoise(TransformerMixin, BaseEstimator):
    """Gaussian readout noise of width ``1/sqrt(n_samples)``; ``None`` is a no-op."""

    def __init__(self, n_samples=None, random_state=None):
        self.n_samples = n_samples
        self.random_state = random_state

    def fit(self, X, y=None):
        check_n_samples(self.n_samples)
        self.rng_ = np.random.default_rng(self.random_state)
        return self

    def transform(self, X):
        check_is_fitted(self, "rng_")
        return add_shot_noise(check_features(X), self.n_samples, self.rng_)


class LinearReadout(RegressorMixin, BaseEstimator):
    """Least-squares output layer; ``score`` returns the capacity."""

    def __init__(self, ridge=0.0, rcond=1e-10):
        self.ridge = ridge
        self.rcond = rcond

    def fit(self, X, y):
        readout = train_readout(X, y, self.ridge, self.rcond)
        self.coef_ = readout.coef
        self.intercept_ = readout.intercept
        self.n_features_in_ = self.coef_.size
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        return check_features(X, self.n_features_in_) @ self.coef_ + self.intercept_

    def score(self, X, y, sample_weight=None):
        return capacity(self.predict(X), y)
