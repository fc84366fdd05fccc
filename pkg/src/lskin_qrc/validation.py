"""Input validation shared by the estimators and the pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array


def check_input_series(X, name="X"):
    """Coerce a scalar input series to a 1-D float array inside [0, 1].

    Accepts shape ``(n_steps,)`` or ``(n_steps, 1)``.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"{name} must hold a single input channel, got {arr.shape[1]} columns")
        arr = arr[:, 0]
    arr = check_array(arr.reshape(-1, 1), ensure_all_finite=True, input_name=name)[:, 0]
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError(f"{name} must lie in [0, 1]; rescale it first (see tasks.rescale_unit)")
    return arr


def check_features(X, n_features=None):
    X = check_array(X, ensure_all_finite=True, dtype=float)
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"expected {n_features} features, got {X.shape[1]}")
    return X


def check_targets(y, n_rows):
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != n_rows:
        raise ValueError(f"targets have {y.shape[0]} rows, features have {n_rows}")
    if not np.all(np.isfinite(y)):
        raise ValueError("targets contain non-finite values")
    return y


def check_n_samples(n_samples):
    """``None`` or ``inf`` mean ideal readout; otherwise a count >= 1."""
    if n_samples is None:
        return np.inf
    n = float(n_samples)
    if np.isnan(n) or n < 1:
        raise ValueError(f"number of measurement samples must be >= 1, got {n_samples}")
    return n


def as_seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(2**63)))
    return np.random.SeedSequence(seed)


def child_seed(seq, index):
    """Deterministic ``index``-th child of ``seq`` (does not mutate ``seq``)."""
    seq = as_seed_sequence(seq)
    return np.random.SeedSequence(seq.entropy, spawn_key=tuple(seq.spawn_key) + (int(index),))
