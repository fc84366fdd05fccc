"""Real parameterization of Hermitian matrices used as readout features.

A Hermitian ``d x d`` matrix carries exactly ``d**2`` real degrees of freedom:
``Re rho[i, j]`` for ``i <= j`` followed by ``Im rho[i, j]`` for ``i < j``,
both in row-major (lexicographic) order.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def _indices(d):
    iu_re = np.triu_indices(d)
    iu_im = np.triu_indices(d, k=1)
    return iu_re, iu_im


def n_features(d):
    return d * d


def feature_labels(d):
    (ri, rj), (ii, ij) = _indices(d)
    return [f"re_{i}_{j}" for i, j in zip(ri, rj)] + [f"im_{i}_{j}" for i, j in zip(ii, ij)]


def to_features(rho):
    """Feature vector(s) of Hermitian matrix/matrices ``rho`` (..., d, d)."""
    rho = np.asarray(rho)
    d = rho.shape[-1]
    (ri, rj), (ii, ij) = _indices(d)
    return np.concatenate([rho[..., ri, rj].real, rho[..., ii, ij].imag], axis=-1)


def from_features(f, d=None):
    """Rebuild the Hermitian matrix from :func:`to_features` output."""
    f = np.asarray(f, dtype=float)
    if d is None:
        d = int(round(np.sqrt(f.shape[-1])))
    if f.shape[-1] != d * d:
        raise ValueError(f"expected {d * d} features, got {f.shape[-1]}")
    (ri, rj), (ii, ij) = _indices(d)
    n_re = len(ri)
    rho = np.zeros(f.shape[:-1] + (d, d), dtype=complex)
    rho[..., ri, rj] = f[..., :n_re]
    rho[..., ii, ij] += 1j * f[..., n_re:]
    rho[..., rj, ri] = rho[..., ri, rj].conj()
    return rho


@lru_cache(maxsize=32)
def _maps(d):
    # B: features -> vec(rho) (column stacking); G: vec(rho) -> features via Re(G v)
    (ri, rj), (ii, ij) = _indices(d)
    n = d * d
    B = np.zeros((n, n), dtype=complex)
    G = np.zeros((n, n), dtype=complex)
    k = 0
    for i, j in zip(ri, rj):
        B[i + j * d, k] += 1.0
        if i != j:
            B[j + i * d, k] += 1.0
        G[k, i + j * d] = 1.0
        k += 1
    for i, j in zip(ii, ij):
        B[i + j * d, k] = 1j
        B[j + i * d, k] = -1j
        G[k, i + j * d] = -1j
        k += 1
    return B, G


def real_generator(superop):
    """Real ``d^2 x d^2`` matrix acting on features, equivalent to ``superop``.

    Only valid for Hermiticity-preserving maps, which every GKLS generator
    and its exponential are.
    """
    n = superop.shape[0]
    d = int(round(np.sqrt(n)))
    B, G = _maps(d)
    return (G @ superop @ B).real


def identity_features(d):
    return to_features(np.eye(d) / d)


def trace_functional(d):
    """Row vector ``t`` with ``t @ f == Tr rho``."""
    (ri, rj), _ = _indices(d)
    t = np.zeros(d * d)
    t[: len(ri)][ri == rj] = 1.0
    return t
