"""DSEBO: random-embedding BO that grows its subspace when progress stalls.

The run starts in a ``d_l``-dimensional subspace of a shared embedding.
Once the best value has not improved by more than ``alpha_threshold`` for
``T`` consecutive evaluations, the subspace is declared converged, its
dimension and best value are recorded, and the dimension grows by an
increment scaled with the most recent improvement-per-dimension slope.
Existing data is zero-padded into the new subspace.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field, replace

import numpy as np

from ._rng import stream
from .acquisition import AcquisitionConfig, kappa_schedule, propose
from .embedding import embed, init_dataset, new_shared_embedding, slice_embedding
from .errors import ConfigurationError, DataError, UsageError
from .surrogate import DEFAULT_NOISE, fit_gp
from .trace import RunTrace


@dataclass(frozen=True)
class DseboConfig:
    budget: int = 500
    d_l: int = 5
    d_h: int | None = None  # None -> min(D, 100)
    beta: float = 12.0
    alpha_threshold: float = 0.5
    seed: int = 0
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    restart_every: int = 25
    n_restarts: int = 3
    noise_variance: float = DEFAULT_NOISE

    def resolved(self, D):
        """Fill in ``d_h`` for ambient dimension ``D`` and validate."""
        cfg = self if self.d_h is not None else replace(self, d_h=min(int(D), 100))
        if not 1 <= cfg.d_l <= cfg.d_h <= D:
            raise ConfigurationError(f"need 1 <= d_l <= d_h <= D, got d_l={cfg.d_l}, d_h={cfg.d_h}, D={D}")
        if not cfg.beta > 0:
            raise ConfigurationError(f"beta must be positive, got {cfg.beta}")
        if cfg.budget < 1:
            raise ConfigurationError(f"budget must be at least 1, got {cfg.budget}")
        if cfg.alpha_threshold < 0:
            raise ConfigurationError("alpha_threshold must be non-negative")
        return cfg


@dataclass
class ExpansionHistory:
    records: list = field(default_factory=list)

    def append(self, d, b):
        if self.records and d <= self.records[-1][0]:
            raise UsageError(f"history dimensions must increase: {self.records[-1][0]} -> {d}")
        self.records.append((int(d), float(b)))

    def __len__(self):
        return len(self.records)


@dataclass
class ControllerState:
    d_current: int
    delta_d: int
    T: int
    stall_counter: int = 0
    b: float = float("inf")


def convergence_threshold(d, cfg):
    """Stall length ``T`` after which the subspace of dimension ``d`` counts as converged."""
    span = cfg.d_h - cfg.d_l
    frac = Fraction(0) if span == 0 else Fraction(d - cfg.d_l, span)
    return max(1, math.floor((1 + frac) * cfg.budget / (2 * Fraction(cfg.beta))))


def slopes(records):
    """Improvement per added dimension between consecutive history records.

    Exact rationals: the floor in the increment rule must not flip on
    rounding when ``k * delta_d`` lands on an integer.
    """
    return [-(Fraction(b1) - Fraction(b0)) / (d1 - d0) for (d0, b0), (d1, b1) in zip(records, records[1:])]


def next_dimension(hist, state, cfg):
    """Return ``(d_next, delta_d)`` for a converged subspace."""
    if state.d_current >= cfg.d_h:
        raise UsageError("subspace already at d_h; expansion must be disabled")
    records = hist.records if isinstance(hist, ExpansionHistory) else list(hist)
    if len(records) < 2:
        delta = max(1, math.floor((cfg.d_h - cfg.d_l) / Fraction(cfg.beta)))
    else:
        s = slopes(records)
        s_min, s_max = min(s), max(s)
        if s_min == s_max:
            delta = state.delta_d
        else:
            k = (s[-1] - s_min) / (s_max - s_min) + Fraction(1, 2)
            delta = max(1, math.floor(k * state.delta_d))
    return min(state.d_current + delta, cfg.d_h), delta


class SubspaceOptimizer:
    """GP surrogate plus LCB proposals over whatever dataset it is handed.

    Hyperparameters are warm-started from the previous fit; every
    ``restart_every``-th fit (including the first) adds random restarts.
    """

    def __init__(self, acq_cfg, acq_rng, gp_rng, restart_every=25, n_restarts=3,
                 noise_variance=DEFAULT_NOISE, fit_callback=None):
        self.acq_cfg = acq_cfg
        self.acq_rng = acq_rng
        self.gp_rng = gp_rng
        self.restart_every = restart_every
        self.n_restarts = n_restarts
        self.noise_variance = noise_variance
        self.fit_callback = fit_callback
        self.params = None
        self.n_fits = 0

    def suggest(self, data, t):
        restarts = self.n_restarts if self.n_fits % self.restart_every == 0 else 0
        model = fit_gp(data, warm=self.params, rng=self.gp_rng, n_restarts=restarts,
                       noise_variance=self.noise_variance)
        self.n_fits += 1
        self.params = model.params
        if self.fit_callback is not None:
            self.fit_callback(model, data)
        kappa = self.acq_cfg.kappa_scale * kappa_schedule(t, data.d, self.acq_cfg.delta)
        incumbent = data.points[data.best_index()]
        return propose(model, incumbent, kappa, self.acq_rng, self.acq_cfg)


def _checked(objective, x, trace):
    y = float(objective(x))
    if not np.isfinite(y):
        trace.error = f"non-finite objective value {y} at evaluation {len(trace) + 1}"
        trace.finish()
        raise DataError(trace.error, trace)
    return y


def run_dsebo(objective, D, cfg, box=(-1.0, 1.0), fit_callback=None, algorithm="dsebo"):
    """Minimize ``objective`` over the ambient box with exactly ``cfg.budget`` evaluations.

    The first evaluation is the random initialization point; each later one
    is an LCB proposal from a GP refitted on the current subspace dataset.
    """
    cfg = cfg.resolved(D)
    lower, upper = box
    emb = new_shared_embedding(D, cfg.d_h, cfg.seed)
    trace = RunTrace(algorithm, cfg.seed)
    opt = SubspaceOptimizer(cfg.acquisition, stream(cfg.seed, "acquisition"), stream(cfg.seed, "gp"),
                            cfg.restart_every, cfg.n_restarts, cfg.noise_variance, fit_callback)
    hist = ExpansionHistory()

    d = cfg.d_l
    A = slice_embedding(emb, d)

    def evaluate(z):
        x = embed(A, z, lower, upper)
        y = _checked(objective, x, trace)
        trace.record(d, y, z, x)
        return y

    data = init_dataset(None, 0, d, stream(cfg.seed, "init"), evaluate)
    state = ControllerState(d, 0, convergence_threshold(d, cfg), 0, min(data.values))
    sub_best = min(data.values)

    for t in range(2, cfg.budget + 1):
        z = opt.suggest(data, t)
        y = evaluate(z)
        data.add(z, y)
        sub_best = min(sub_best, y)
        if y < state.b - cfg.alpha_threshold:
            state.b = y
            state.stall_counter = 0
        else:
            state.stall_counter += 1

        if state.stall_counter >= state.T and d < cfg.d_h:
            hist.append(d, sub_best)
            d_next, delta = next_dimension(hist, state, cfg)
            trace.deltas.append(delta)
            data = init_dataset(data, d, d_next, None)
            d = d_next
            A = slice_embedding(emb, d)
            state = ControllerState(d, delta, convergence_threshold(d, cfg), 0, min(data.values))
            sub_best = float("inf")

    trace.history = list(hist.records)
    return trace.finish()
