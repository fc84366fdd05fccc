"""YAML experiment configuration with field-level validation.

Schema (every section optional; physical quantities in units of J)::

    seed: 0
    output: out/steady
    network:    {n_sites, topology, J, W, edge_count, realized}
    dissipator: {gamma, epsilon, dephasing_gamma, dephasing}
    reservoir:  {n_bosons, dt, n_samples, noise_phase, realizations, ridge, rcond}
    task:       {kind, delay, washout, train, test}
    grids:      {epsilon, s, n_samples, delay, n_sites, cases}
    esp:        {steps, pairs}
    pattern:    {steps}
    dump_superoperator: false

``network.realized`` is a serialized ``NetworkSpec`` (disorder and edge
list) that replaces sampling for the single-network modes. ``n_samples``
entries accept ``inf``/``null`` for the ideal readout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import yaml

from .network import TOPOLOGIES, NetworkSpec
from .reservoir import ReservoirConfig
from .tasks import TASK_KINDS, TaskSpec

MODES = ("steady-profile", "spectrum", "esp", "run-task", "sweep-eps", "sweep-noise",
         "disorder-compare")

SECTIONS = {
    "network": {"n_sites", "topology", "J", "W", "edge_count", "realized"},
    "dissipator": {"gamma", "epsilon", "dephasing_gamma", "dephasing"},
    "reservoir": {"n_bosons", "dt", "n_samples", "noise_phase", "realizations", "ridge", "rcond"},
    "task": {"kind", "delay", "washout", "train", "test"},
    "grids": {"epsilon", "s", "n_samples", "delay", "n_sites", "cases"},
    "esp": {"steps", "pairs"},
    "pattern": {"steps"},
}
TOP_LEVEL = {"mode", "seed", "output", "dump_superoperator", *SECTIONS}


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n" + "\n".join(f"  {e}" for e in self.errors))


def parse_n_samples(value):
    if value is None:
        return None
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "ideal"):
        return None
    v = float(value)
    return None if math.isinf(v) else v


@dataclass
class ExperimentConfig:
    mode: str
    reservoir: ReservoirConfig
    task: TaskSpec
    grids: dict = field(default_factory=dict)
    esp: dict = field(default_factory=dict)
    pattern: dict = field(default_factory=dict)
    realized: NetworkSpec | None = None
    output: str = "out"
    dump_superoperator: bool = False
    raw: dict = field(default_factory=dict)

    @property
    def seed(self):
        return self.reservoir.seed

    def echo(self):
        """Resolved configuration, sufficient to rerun with no other state."""
        r = self.reservoir.to_dict()
        return {
            "mode": self.mode,
            "seed": r["seed"],
            "output": self.output,
            "dump_superoperator": self.dump_superoperator,
            "network": {k: r[k] for k in ("n_sites", "topology", "J", "W", "edge_count")}
            | {"realized": self.realized.to_dict() if self.realized else None},
            "dissipator": {k: r[k] for k in ("gamma", "epsilon", "dephasing_gamma", "dephasing")},
            "reservoir": {k: r[k] for k in ("n_bosons", "dt", "n_samples", "noise_phase",
                                            "realizations", "ridge", "rcond")},
            "task": {f.name: getattr(self.task, f.name) for f in fields(self.task) if f.name != "seed"},
            "grids": self.grids,
            "esp": self.esp,
            "pattern": self.pattern,
        }


def _check_grid(errors, grids, key, kind=float, lo=None, hi=None):
    if key not in grids:
        return
    values = grids[key]
    if not isinstance(values, list) or not values:
        errors.append(f"grids.{key}: must be a non-empty list")
        return
    out = []
    for i, v in enumerate(values):
        try:
            v = kind(v)
        except (TypeError, ValueError):
            errors.append(f"grids.{key}[{i}]: cannot interpret {v!r}")
            continue
        if v is not None and ((lo is not None and v < lo) or (hi is not None and v > hi)):
            errors.append(f"grids.{key}[{i}]: {v} outside [{lo}, {hi}]")
        out.append(v)
    grids[key] = out


def build_config(data, mode=None, seed=None, output=None):
    """Validate a parsed YAML mapping; raises :class:`ConfigError` listing every problem."""
    errors = []
    data = dict(data or {})
    for key in data:
        if key not in TOP_LEVEL:
            errors.append(f"{key}: unknown top-level field")
    for section, allowed in SECTIONS.items():
        sec = data.get(section) or {}
        if not isinstance(sec, dict):
            errors.append(f"{section}: must be a mapping")
            data[section] = {}
            continue
        for key in sec:
            if key not in allowed:
                errors.append(f"{section}.{key}: unknown field")
        data[section] = dict(sec)

    file_mode = data.get("mode")
    mode = mode or file_mode
    if mode not in MODES:
        errors.append(f"mode: {mode!r} is not one of {', '.join(MODES)}")
    elif file_mode and file_mode != mode:
        errors.append(f"mode: config declares {file_mode!r} but {mode!r} was requested")

    net, dis, res, tsk = (data[k] for k in ("network", "dissipator", "reservoir", "task"))
    if net.get("topology", "chain") not in TOPOLOGIES:
        errors.append(f"network.topology: expected one of {TOPOLOGIES}")
    if tsk.get("kind", "stm") not in TASK_KINDS:
        errors.append(f"task.kind: expected one of {TASK_KINDS}")
    eps = dis.get("epsilon", 0.0)
    if not isinstance(eps, (int, float)) or not 0 <= eps <= 1:
        errors.append("dissipator.epsilon: must be a number in [0, 1]")
    for section, key in (("network", "W"), ("dissipator", "gamma"), ("reservoir", "dt")):
        v = data[section].get(key)
        if v is not None and (not isinstance(v, (int, float)) or v < 0 or (key == "dt" and v == 0)):
            errors.append(f"{section}.{key}: must be a {'positive' if key == 'dt' else 'non-negative'} number")
    try:
        n_samples = parse_n_samples(res.get("n_samples"))
        if n_samples is not None and n_samples < 1:
            errors.append("reservoir.n_samples: must be >= 1 or inf")
    except (TypeError, ValueError):
        errors.append("reservoir.n_samples: must be a number or 'inf'")
        n_samples = None

    grids = dict(data.get("grids") or {})
    _check_grid(errors, grids, "epsilon", float, 0.0, 1.0)
    _check_grid(errors, grids, "s", float, 0.0, 1.0)
    _check_grid(errors, grids, "n_samples", parse_n_samples, 1.0)
    _check_grid(errors, grids, "delay", int, 0)
    _check_grid(errors, grids, "n_sites", int, 2)
    if "cases" in grids:
        cases = grids["cases"]
        if not isinstance(cases, list) or not cases:
            errors.append("grids.cases: must be a non-empty list of mappings")
        else:
            for i, case in enumerate(cases):
                if not isinstance(case, dict):
                    errors.append(f"grids.cases[{i}]: must be a mapping")
                    continue
                for k in case:
                    if k not in ("name", "topology", "W", "epsilon"):
                        errors.append(f"grids.cases[{i}].{k}: unknown field")

    realized = None
    if net.get("realized") is not None:
        try:
            realized = NetworkSpec.from_dict(net["realized"])
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"network.realized: {exc}")

    if seed is None:
        seed = data.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        errors.append("seed: must be a non-negative integer")

    if errors:
        raise ConfigError(errors)

    try:
        reservoir = ReservoirConfig(
            n_sites=int(net.get("n_sites", 10)), n_bosons=int(res.get("n_bosons", 1)),
            topology=net.get("topology", "chain"), J=float(net.get("J", 1.0)),
            W=float(net.get("W", 0.01)), epsilon=float(eps), gamma=float(dis.get("gamma", 0.1)),
            dephasing_gamma=dis.get("dephasing_gamma"), dephasing=bool(dis.get("dephasing", True)),
            dt=float(res.get("dt", 1.0)), edge_count=net.get("edge_count"), n_samples=n_samples,
            noise_phase=res.get("noise_phase", "both"),
            realizations=int(res.get("realizations", 100)), seed=seed,
            ridge=float(res.get("ridge", 0.0)), rcond=float(res.get("rcond", 1e-10)))
    except (TypeError, ValueError) as exc:
        raise ConfigError([f"reservoir: {exc}"]) from exc
    try:
        task = TaskSpec(kind=tsk.get("kind", "stm"), delay=int(tsk.get("delay", 5)),
                        washout=int(tsk.get("washout", 1000)), train=int(tsk.get("train", 1000)),
                        test=int(tsk.get("test", 1000)))
    except (TypeError, ValueError) as exc:
        raise ConfigError([f"task: {exc}"]) from exc
    if realized is not None and realized.n_sites != reservoir.n_sites:
        raise ConfigError(["network.realized: site count differs from network.n_sites"])

    return ExperimentConfig(
        mode=mode, reservoir=reservoir, task=task, grids=grids,
        esp=dict(data.get("esp") or {}), pattern=dict(data.get("pattern") or {}),
        realized=realized, output=output or data.get("output") or "out",
        dump_superoperator=bool(data.get("dump_superoperator", False)), raw=data)


def load_config(path, mode=None, seed=None, output=None):
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if data is not None and not isinstance(data, dict):
        raise ConfigError([f"{path}: top level must be a mapping"])
    return build_config(data, mode=mode, seed=seed, output=output)
