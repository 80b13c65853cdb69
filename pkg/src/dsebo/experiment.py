"""Seeded experiment runner, summaries, and hyperparameter sweeps.

Output layout of ``run_experiment``::

    out/
      config.json           the resolved configuration
      run_000.csv           trace: iter,dim,f,best,elapsed_ms
      run_000.meta.json     seed, config digest, expansion history, wall clock
      ...
      summary.json          mean/std of final best, overall best, mean time

Trace CSVs are byte-identical across reruns of the same config unless
``wall_clock_in_trace`` is set, in which case ``elapsed_ms`` is filled in.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .acquisition import AcquisitionConfig
from .bandits import DEFAULT_ARMS, STRATEGIES, StrategyConfig, run_mab
from .baselines import run_fixed_embedding, run_random_search
from .benchmarks import FUNCTION_NAMES, make_function
from .controller import DseboConfig, run_dsebo
from .errors import ConfigurationError, DataError
from .trace import read_trace_csv

log = logging.getLogger(__name__)

WORKERS_ENV = "DSEBO_WORKERS"
SWEEP_PARAMS = ("beta", "d_h")

_PARAM_KEYS = {
    "dsebo": {"d_l", "d_h", "beta", "alpha_threshold"},
    "fixed_embedding": {"d"},
    "random_search": set(),
    "mab": {"arms", "epsilon", "ucb_e_c", "tau"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    function: str = "sphere"
    D: int = 1000
    d_f: int = 30
    c: float = 0.1
    K: float = 1e4
    algorithm: str = "dsebo"
    params: dict = field(default_factory=dict)
    budget: int = 500
    repetitions: int = 10
    seed: int = 0
    acquisition: dict = field(default_factory=dict)
    output_dir: str | None = None
    workers: int = 1
    wall_clock_in_trace: bool = False

    def __post_init__(self):
        validate(self)

    @property
    def family(self):
        return self.algorithm.split(":", 1)[0]

    @property
    def digest(self):
        """SHA-256 over the fields that affect results."""
        d = asdict(self)
        for k in ("output_dir", "workers", "repetitions"):
            d.pop(k)
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigurationError("config must be a JSON object")
        unknown = set(raw) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    @classmethod
    def load(cls, path):
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(raw)


def validate(cfg):
    if cfg.function not in FUNCTION_NAMES:
        raise ConfigurationError(f"unknown function {cfg.function!r}; choose from {FUNCTION_NAMES}")
    family = cfg.family
    if family not in _PARAM_KEYS:
        raise ConfigurationError(f"unknown algorithm {cfg.algorithm!r}")
    if family == "mab":
        kind = cfg.algorithm.partition(":")[2]
        if kind not in STRATEGIES:
            raise ConfigurationError(f"unknown bandit strategy {kind!r}; choose from {STRATEGIES}")
    elif ":" in cfg.algorithm:
        raise ConfigurationError(f"algorithm {cfg.algorithm!r} takes no ':' suffix")
    unknown = set(cfg.params) - _PARAM_KEYS[family]
    if unknown:
        raise ConfigurationError(f"unknown params for {family}: {sorted(unknown)}")
    if family == "fixed_embedding" and "d" not in cfg.params:
        raise ConfigurationError("fixed_embedding needs params.d")
    if cfg.repetitions < 1 or cfg.budget < 1 or cfg.workers < 1:
        raise ConfigurationError("repetitions, budget and workers must be positive")
    if cfg.D <= cfg.d_f:
        raise ConfigurationError(f"D={cfg.D} must exceed d_f={cfg.d_f}")
    unknown = set(cfg.acquisition) - set(AcquisitionConfig.__dataclass_fields__)
    if unknown:
        raise ConfigurationError(f"unknown acquisition keys: {sorted(unknown)}")
    AcquisitionConfig(**cfg.acquisition)
    # build everything once so bad values fail before any evaluation
    make_function(cfg.function, cfg.D, cfg.d_f, cfg.c, cfg.K)
    if family == "dsebo":
        _dsebo_cfg(cfg, 0).resolved(cfg.D)
    elif family == "fixed_embedding":
        if not 1 <= int(cfg.params["d"]) <= cfg.D:
            raise ConfigurationError(f"params.d={cfg.params['d']} outside [1, {cfg.D}]")
    elif family == "mab":
        arms = cfg.params.get("arms", DEFAULT_ARMS)
        _strategy(cfg)
        if cfg.budget < len(arms) or any(not 1 <= int(d) <= cfg.D for d in arms):
            raise ConfigurationError(f"invalid arms {arms} for D={cfg.D}, budget={cfg.budget}")


def _dsebo_cfg(cfg, seed):
    return DseboConfig(budget=cfg.budget, seed=seed, acquisition=AcquisitionConfig(**cfg.acquisition),
                       **cfg.params)


def _strategy(cfg):
    extra = {k: v for k, v in cfg.params.items() if k != "arms"}
    return StrategyConfig(cfg.algorithm.partition(":")[2], **extra)


def run_single(cfg, rep):
    """Run repetition ``rep`` (seed ``cfg.seed + rep``) and return its trace."""
    seed = cfg.seed + rep
    objective = make_function(cfg.function, cfg.D, cfg.d_f, cfg.c, cfg.K)
    acq = AcquisitionConfig(**cfg.acquisition)
    family = cfg.family
    if family == "dsebo":
        trace = run_dsebo(objective, cfg.D, _dsebo_cfg(cfg, seed))
    elif family == "fixed_embedding":
        trace = run_fixed_embedding(objective, cfg.D, int(cfg.params["d"]), cfg.budget, seed, acq)
    elif family == "random_search":
        trace = run_random_search(objective, cfg.D, cfg.budget, seed)
    else:
        arms = cfg.params.get("arms", DEFAULT_ARMS)
        trace = run_mab(objective, cfg.D, arms, _strategy(cfg), cfg.budget, seed, acq)
    trace.config_digest = cfg.digest
    return trace


def _write_run(trace, out, rep, wall_clock):
    stem = out / f"run_{rep:03d}"
    trace.write_csv(stem.with_suffix(".csv"), wall_clock=wall_clock)
    meta = {
        "seed": trace.seed,
        "algorithm": trace.algorithm,
        "config_digest": trace.config_digest,
        "evaluations": len(trace),
        "final_best": trace.final_best,
        "history": [list(r) for r in trace.history],
        "deltas": list(trace.deltas),
        "pulls": {str(k): v for k, v in trace.pulls.items()},
        "wall_clock_s": trace.wall_clock_s,
        "error": trace.error,
    }
    Path(str(stem) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def _run_and_write(cfg, rep, out):
    try:
        trace = run_single(cfg, rep)
    except DataError as exc:
        if exc.trace is not None:
            exc.trace.config_digest = cfg.digest
            _write_run(exc.trace, out, rep, cfg.wall_clock_in_trace)
        return rep, str(exc)
    _write_run(trace, out, rep, cfg.wall_clock_in_trace)
    log.info("run %d done: final best %.6g in %.1fs", rep, trace.final_best, trace.wall_clock_s)
    return rep, None


def _prepare_out(out):
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigurationError(f"output directory {out} is not writable: {exc}") from exc
    return out


def resolve_workers(requested):
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ConfigurationError(f"{WORKERS_ENV}={env!r} is not an integer") from exc
        if n < 1:
            raise ConfigurationError(f"{WORKERS_ENV} must be positive")
        return n
    return requested


def run_experiment(cfg, out_dir=None):
    """Run every repetition, write traces and ``summary.json``; return the summary."""
    out_dir = out_dir or cfg.output_dir
    if out_dir is None:
        raise ConfigurationError("no output directory given")
    out = _prepare_out(out_dir)
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n",
                                     encoding="utf-8")
    workers = min(resolve_workers(cfg.workers), cfg.repetitions)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_and_write, [cfg] * cfg.repetitions, range(cfg.repetitions),
                                    [out] * cfg.repetitions))
    else:
        results = [_run_and_write(cfg, rep, out) for rep in range(cfg.repetitions)]
    errors = [f"run {rep}: {msg}" for rep, msg in results if msg]
    if errors:
        raise DataError("; ".join(errors))
    return summarize(out)


def summarize(in_dir):
    """Recompute ``summary.json`` from the trace files in ``in_dir``."""
    in_dir = Path(in_dir)
    traces = sorted(in_dir.glob("run_*.csv"))
    if not traces:
        raise ConfigurationError(f"no trace files in {in_dir}")
    finals, times, deltas = [], [], []
    for path in traces:
        rows = read_trace_csv(path)
        finals.append(rows[-1].best)
        meta_path = path.with_name(path.stem + ".meta.json")
        if meta_path.exists():
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            times.append(meta["wall_clock_s"])
            deltas.extend(meta.get("deltas", []))
    finals = np.array(finals)
    summary = {
        "runs": len(finals),
        "final_best": finals.tolist(),
        "convergence_mean": float(np.mean(finals)),
        "convergence_std": float(np.std(finals)),
        "best_solution": float(np.min(finals)),
        "time_mean_s": float(np.mean(times)) if times else None,
        "mean_delta_d": float(np.mean(deltas)) if deltas else None,
        "expansions": len(deltas),
    }
    (in_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return summary


def _sweep_value(cfg, param, value):
    if param == "beta":
        return float(value)
    v = int(value)
    if v > cfg.D:
        log.warning("d_h=%d clipped to D=%d", v, cfg.D)
    return min(v, cfg.D)


def sweep(cfg, param, values, out_dir):
    """One ``run_experiment`` per value in ``out_dir/<param>=<value>/`` plus a cross-value table."""
    if param not in SWEEP_PARAMS:
        raise ConfigurationError(f"cannot sweep {param!r}; choose from {SWEEP_PARAMS}")
    if cfg.family != "dsebo":
        raise ConfigurationError(f"{param} only applies to the dsebo algorithm")
    if not values:
        raise ConfigurationError("no sweep values")
    out = _prepare_out(out_dir)
    subs = []
    for raw in values:
        value = _sweep_value(cfg, param, raw)
        sub_cfg = replace(cfg, params={**cfg.params, param: value})
        label = f"{param}={value:g}" if param == "beta" else f"{param}={value}"
        subs.append((label, value, sub_cfg))
    rows = []
    for label, value, sub_cfg in subs:
        s = run_experiment(sub_cfg, out / label)
        rows.append({"param": param, "value": value, **{k: s[k] for k in (
            "runs", "convergence_mean", "convergence_std", "best_solution", "time_mean_s", "mean_delta_d")}})
    with open(out / "sweep_summary.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) and not math.isnan(v) else v)
                        for k, v in r.items()})
    return rows
