"""Benchmark input sequences and targets (short-term memory and XOR)."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

TASK_KINDS = ("stm", "xor")


@dataclass(frozen=True)
class TaskSpec:
    """Benchmark definition.

    ``delay`` is the STM lag ``tau``; XOR always looks two steps back.
    Total sequence length is ``washout + train + test``.
    """

    kind: str = "stm"
    delay: int = 5
    washout: int = 1000
    train: int = 1000
    test: int = 1000
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in TASK_KINDS:
            raise ValueError(f"unknown task {self.kind!r}; expected one of {TASK_KINDS}")
        if min(self.washout, self.train, self.test) <= 0:
            raise ValueError("washout, train and test lengths must be positive")
        if self.delay < 0:
            raise ValueError("delay must be non-negative")
        if self.lookback >= self.train:
            raise ValueError("lookback must be shorter than the training segment")
        if self.lookback > self.washout:
            raise ValueError(f"washout of {self.washout} steps cannot resolve a lookback of {self.lookback}")

    @property
    def lookback(self):
        return self.delay if self.kind == "stm" else 2

    @property
    def length(self):
        return self.washout + self.train + self.test

    def segments(self):
        """Slices of the washout, train and test phases."""
        w, t = self.washout, self.train
        return slice(0, w), slice(w, w + t), slice(w + t, w + t + self.test)

    def label(self):
        return f"stm(tau={self.delay})" if self.kind == "stm" else "xor"


def generate_inputs(spec, rng=None):
    """Uniform ``[0, 1]`` draws (STM) or fair bits (XOR)."""
    rng = np.random.default_rng(spec.seed if rng is None else rng)
    if spec.kind == "stm":
        return rng.uniform(0.0, 1.0, size=spec.length)
    return rng.integers(0, 2, size=spec.length).astype(float)


def target_series(spec, inputs):
    """Targets aligned with ``inputs``; entries without enough history are NaN.

    Only washout positions can be NaN, and those are never scored.
    """
    s = np.asarray(inputs, dtype=float)
    k = spec.lookback
    if s.size - k < spec.train + spec.test:
        raise ValueError(f"series of length {s.size} lacks the {k}-step prefix the task needs")
    y = np.full(s.size, np.nan)
    if spec.kind == "stm":
        y[k:] = s[: s.size - k]
    else:
        y[2:] = np.mod(s[1:-1] + s[:-2], 2)
    return y


def rescale_unit(series):
    """Affinely map an arbitrary real series onto ``[0, 1]``."""
    x = np.asarray(series, dtype=float)
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.full_like(x, 0.5)
    return (x - lo) / (hi - lo)


def write_series_csv(path, inputs, targets):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "s", "y"])
        for k, (s, y) in enumerate(zip(inputs, targets)):
            writer.writerow([k, repr(float(s)), "" if np.isnan(y) else repr(float(y))])


def read_series_csv(path):
    steps, s, y = [], [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            steps.append(int(row["step"]))
            s.append(float(row["s"]))
            y.append(float(row["y"]) if row["y"] != "" else np.nan)
    if steps != list(range(len(steps))):
        raise ValueError(f"{path}: steps must be 0..n-1 in order")
    return np.asarray(s), np.asarray(y)
