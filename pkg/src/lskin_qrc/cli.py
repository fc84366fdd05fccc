"""Command line entry point: ``lskin-qrc <mode> --config FILE``.

Every mode writes one or more CSV files whose first line is a ``#`` comment
naming the mode and schema version, followed by a header row, plus a
``manifest.json`` with the resolved configuration, library versions and
timings. Standard output only receives the list of written files.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import platform
import sys
import time
from dataclasses import replace

import numpy as np

from . import __version__
from .config import MODES, ConfigError, load_config
from .dynamics import (DensityMatrix, esp_check, population_profile, spectrum, steady_state)
from .features import from_features
from .fock import enumerate_sector
from .liouvillian import liouvillian_for, write_superoperator
from .reservoir import (evolve_sequence, initial_state, memory_profile, run_experiment,
                        sweep_noise)
from .validation import child_seed

SCHEMA_VERSION = 1


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if np.isinf(v):
            return "inf"
        return repr(v)
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


class Outputs:
    """Tracks files written by a run so a failure can remove them."""

    def __init__(self, directory, mode):
        self.directory = directory
        self.mode = mode
        self.written = []

    def path(self, name):
        return os.path.join(self.directory, name)

    def csv(self, name, columns, rows):
        os.makedirs(self.directory, exist_ok=True)
        path = self.path(name)
        self.written.append(path)
        with open(path, "w", newline="") as fh:
            fh.write(f"# lskin-qrc {self.mode} {name} schema={SCHEMA_VERSION}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(row[c]) for c in columns])
        return path

    def binary(self, name, liouvillian):
        os.makedirs(self.directory, exist_ok=True)
        path = self.path(name)
        self.written.append(path)
        write_superoperator(path, liouvillian)
        return path

    def json(self, name, payload):
        os.makedirs(self.directory, exist_ok=True)
        path = self.path(name)
        self.written.append(path)
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")
        return path

    def cleanup(self):
        for path in self.written:
            try:
                os.remove(path)
            except FileNotFoundError:
                pass
        self.written.clear()


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return None if np.isinf(obj) else float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _progress(label):
    def report(realization):
        print(f"[{label}] realization {realization.index}: C={realization.capacity:.4f} "
              f"({realization.seconds:.2f}s)", file=sys.stderr)
    return report


def _network(cfg, epsilon=None):
    eps = cfg.reservoir.epsilon if epsilon is None else epsilon
    if cfg.realized is not None:
        return cfg.realized.with_epsilon(eps)
    base = cfg.reservoir.sample_network(child_seed(np.random.SeedSequence(cfg.seed), 0))
    return base.with_epsilon(eps)


def _ns_label(n):
    return "inf" if n is None or np.isinf(n) else n


def mode_steady_profile(cfg, out, jobs):
    res = cfg.reservoir
    basis = enumerate_sector(res.n_sites, res.n_bosons)
    eps_grid = cfg.grids.get("epsilon", [res.epsilon])
    s_grid = cfg.grids.get("s", list(np.round(np.linspace(0, 1, 11), 10)))
    rows = []
    for eps in eps_grid:
        net = _network(cfg, eps)
        dis = replace(res.dissipator(), epsilon=eps)
        for s in s_grid:
            ss = steady_state(liouvillian_for(net, basis, dis.with_input(s)))
            prof = population_profile(ss.state)
            for l in range(res.n_sites):
                c = abs(prof.coherences[l])
                rows.append({"epsilon": eps, "s": s, "site": l + 1,
                             "population": prof.populations[l], "coherence_abs": c,
                             "residual": ss.residual, "gap": ss.gap})
    out.csv("steady_profile.csv",
            ["epsilon", "s", "site", "population", "coherence_abs", "residual", "gap"], rows)
    return {"network": _network(cfg).to_dict()}


def mode_spectrum(cfg, out, jobs):
    res = cfg.reservoir
    sizes = cfg.grids.get("n_sites", [res.n_sites])
    eps_grid = cfg.grids.get("epsilon", [res.epsilon])
    s_grid = cfg.grids.get("s", [0.5])
    rows, eig_rows = [], []
    for L in sizes:
        rcfg = replace(res, n_sites=L)
        basis = enumerate_sector(L, res.n_bosons)
        sub = replace(cfg, reservoir=rcfg, realized=cfg.realized if L == res.n_sites else None)
        for eps in eps_grid:
            net = _network(sub, eps)
            for s in s_grid:
                liou = liouvillian_for(net, basis, replace(rcfg.dissipator(), epsilon=eps).with_input(s))
                sp = spectrum(liou)
                rows.append({"n_sites": L, "epsilon": eps, "s": s, "gap": sp.gap,
                             "mixing_time": sp.mixing_time, "zero_modes": sp.n_zero_modes})
                for k, lam in enumerate(sp.eigenvalues):
                    eig_rows.append({"n_sites": L, "epsilon": eps, "s": s, "index": k,
                                     "re": lam.real, "im": lam.imag})
                if cfg.dump_superoperator:
                    out.binary(f"liouvillian_L{L}_eps{eps}_s{s}.bin", liou)
    out.csv("spectrum.csv", ["n_sites", "epsilon", "s", "gap", "mixing_time", "zero_modes"], rows)
    out.csv("eigenvalues.csv", ["n_sites", "epsilon", "s", "index", "re", "im"], eig_rows)
    return {}


def mode_esp(cfg, out, jobs):
    res = cfg.reservoir
    basis = enumerate_sector(res.n_sites, res.n_bosons)
    steps = int(cfg.esp.get("steps", 200))
    pairs = int(cfg.esp.get("pairs", 1))
    eps_grid = cfg.grids.get("epsilon", [res.epsilon])
    root = np.random.SeedSequence(cfg.seed)
    inputs = np.random.default_rng(child_seed(root, 1)).uniform(size=steps)
    rows = []
    for eps in eps_grid:
        net = _network(cfg, eps)
        dis = replace(res.dissipator(), epsilon=eps)
        for p in range(pairs):
            r1 = initial_state(basis, child_seed(root, 10 + 2 * p))
            r2 = initial_state(basis, child_seed(root, 11 + 2 * p))
            dist = esp_check(net, basis, dis, inputs, r1, r2, res.dt)
            rows.extend({"epsilon": eps, "pair": p, "step": k, "trace_distance": d}
                        for k, d in enumerate(dist))
    out.csv("esp.csv", ["epsilon", "pair", "step", "trace_distance"], rows)
    return {}


REALIZATION_COLUMNS = ["seed", "realization", "epsilon", "n_samples", "W", "topology", "task",
                       "capacity"]
SUMMARY_COLUMNS = ["epsilon", "n_samples", "W", "topology", "task", "mean", "std",
                   "n_realizations", "n_failures"]


def _summary_row(result):
    c = result.config
    return {"epsilon": c.epsilon, "n_samples": _ns_label(c.n_samples), "W": c.W,
            "topology": c.topology, "task": result.task.label(), "mean": result.mean,
            "std": result.std, "n_realizations": len(result.realizations),
            "n_failures": len(result.failures)}


def _task(cfg):
    return replace(cfg.task, seed=cfg.seed)


def mode_run_task(cfg, out, jobs):
    result = run_experiment(cfg.reservoir, _task(cfg), n_jobs=jobs, progress=_progress("run-task"))
    out.csv("realizations.csv", REALIZATION_COLUMNS, list(result.rows()))
    out.json("summary.json", result.summary())
    return {"mean": result.mean, "std": result.std}


def mode_sweep_eps(cfg, out, jobs):
    res = cfg.reservoir
    eps_grid = cfg.grids.get("epsilon", [0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
    ns_grid = cfg.grids.get("n_samples", [res.n_samples])
    rows, summary = [], []
    for eps in eps_grid:
        results = sweep_noise(replace(res, epsilon=eps), _task(cfg),
                              [np.inf if n is None else n for n in ns_grid], n_jobs=jobs,
                              progress=_progress(f"eps={eps}"))
        for r in results:
            rows.extend(r.rows())
            summary.append(_summary_row(r))
    out.csv("realizations.csv", REALIZATION_COLUMNS, rows)
    out.csv("summary.csv", SUMMARY_COLUMNS, summary)
    return {}


def mode_sweep_noise(cfg, out, jobs):
    res = cfg.reservoir
    ns_grid = cfg.grids.get("n_samples", [None, 1e8, 1e6, 1e4])
    results = sweep_noise(res, _task(cfg), [np.inf if n is None else n for n in ns_grid],
                          n_jobs=jobs, progress=_progress("sweep-noise"))
    rows = [row for r in results for row in r.rows()]
    out.csv("realizations.csv", REALIZATION_COLUMNS, rows)
    out.csv("summary.csv", SUMMARY_COLUMNS, [_summary_row(r) for r in results])
    return {}


DEFAULT_CASES = [
    {"name": "chain-ordered", "topology": "chain", "W": 0.0, "epsilon": 0.0},
    {"name": "chain-disordered", "topology": "chain", "W": 0.01, "epsilon": 0.0},
    {"name": "irregular-ordered", "topology": "irregular", "W": 0.0, "epsilon": 0.0},
    {"name": "chain-periodic", "topology": "chain", "W": 0.0, "epsilon": 1.0},
]


def density_pattern(config, steps, seed):
    """Matrix of log10|Re rho_ij| (i >= j) and log10|Im rho_ij| (i < j)."""
    inputs = np.random.default_rng(child_seed(seed, 1)).uniform(size=steps)
    feats = evolve_sequence(config, inputs, child_seed(seed, 0))
    d = enumerate_sector(config.n_sites, config.n_bosons).dim
    rho = from_features(feats[-1], d)
    DensityMatrix(enumerate_sector(config.n_sites, config.n_bosons), rho).validate()
    vals = np.where(np.tril(np.ones((d, d), bool)), np.abs(rho.real), np.abs(rho.imag))
    with np.errstate(divide="ignore"):
        return rho, np.log10(vals)


def mode_disorder_compare(cfg, out, jobs):
    res = cfg.reservoir
    delays = cfg.grids.get("delay", list(range(0, 11)))
    cases = cfg.grids.get("cases", DEFAULT_CASES)
    steps = int(cfg.pattern.get("steps", 300))
    rows, summary, pattern_rows = [], [], []
    root = np.random.SeedSequence(cfg.seed)
    for ci, case in enumerate(cases):
        name = case.get("name", f"case{ci}")
        rcfg = replace(res, topology=case.get("topology", res.topology),
                       W=float(case.get("W", res.W)), epsilon=float(case.get("epsilon", res.epsilon)))
        results = memory_profile(rcfg, _task(cfg), delays, n_jobs=jobs, progress=_progress(name))
        for r in results:
            for row in r.rows():
                rows.append({"case": name, **row})
            summary.append({"case": name, **_summary_row(r)})
        _, logs = density_pattern(rcfg, steps, child_seed(root, 1000))
        d = logs.shape[0]
        for i in range(d):
            for j in range(d):
                pattern_rows.append({"case": name, "i": i + 1, "j": j + 1,
                                     "part": "re" if i >= j else "im", "log10_abs": logs[i, j]})
    out.csv("realizations.csv", ["case"] + REALIZATION_COLUMNS, rows)
    out.csv("summary.csv", ["case"] + SUMMARY_COLUMNS, summary)
    out.csv("density_patterns.csv", ["case", "i", "j", "part", "log10_abs"], pattern_rows)
    return {}


MODE_HANDLERS = {
    "steady-profile": mode_steady_profile,
    "spectrum": mode_spectrum,
    "esp": mode_esp,
    "run-task": mode_run_task,
    "sweep-eps": mode_sweep_eps,
    "sweep-noise": mode_sweep_noise,
    "disorder-compare": mode_disorder_compare,
}


def _versions():
    import scipy
    import sklearn
    return {"lskin_qrc": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__, "sklearn": sklearn.__version__}


def run(mode, config_path, jobs=1, seed=None, out_dir=None):
    """Execute one mode; returns the list of written files."""
    cfg = load_config(config_path, mode=mode, seed=seed, output=out_dir)
    os.makedirs(cfg.output, exist_ok=True)
    if not os.access(cfg.output, os.W_OK):
        raise ConfigError([f"output: directory {cfg.output!r} is not writable"])
    outputs = Outputs(cfg.output, mode)
    t0 = time.perf_counter()
    try:
        extra = MODE_HANDLERS[mode](cfg, outputs, jobs)
        data_files = [os.path.basename(p) for p in outputs.written]
        outputs.json("manifest.json", {
            "mode": mode,
            "config": cfg.echo(),
            "versions": _versions(),
            "timings": {"total_seconds": time.perf_counter() - t0},
            "outputs": data_files,
            "results": extra,
        })
    except BaseException:
        outputs.cleanup()
        raise
    return list(outputs.written)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lskin-qrc",
        description="Open bosonic network reservoirs with tunable dissipative boundaries.")
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", required=True, help="YAML experiment file")
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers over realizations")
    parser.add_argument("--seed", type=int, default=None, help="override the master seed")
    parser.add_argument("--out", default=None, help="output directory (overrides the config)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("lskin-qrc: --jobs must be at least 1", file=sys.stderr)
        return 2
    try:
        written = run(args.mode, args.config, jobs=args.jobs, seed=args.seed, out_dir=args.out)
    except ConfigError as exc:
        print(f"lskin-qrc: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"lskin-qrc: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"lskin-qrc: {args.mode} failed, partial outputs removed: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
