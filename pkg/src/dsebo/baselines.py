"""Reference optimizers: fixed-dimension random embedding and random search."""

from __future__ import annotations

from dataclasses import replace

from ._rng import stream
from .acquisition import AcquisitionConfig
from .controller import DseboConfig, _checked, run_dsebo
from .errors import ConfigurationError
from .trace import RunTrace


def run_fixed_embedding(objective, D, d, budget, seed, acquisition=None, box=(-1.0, 1.0), **kwargs):
    """DSEBO with expansion disabled: one ``d``-dimensional embedding for the whole run."""
    if not 1 <= d <= D:
        raise ConfigurationError(f"fixed dimension {d} outside [1, {D}]")
    cfg = DseboConfig(budget=budget, d_l=d, d_h=d, seed=seed,
                      acquisition=acquisition or AcquisitionConfig(), **kwargs)
    return run_dsebo(objective, D, cfg, box=box, algorithm="fixed_embedding")


def run_random_search(objective, D, budget, seed, box=(-1.0, 1.0)):
    """Uniform samples from the ambient box."""
    if budget < 1:
        raise ConfigurationError(f"budget must be at least 1, got {budget}")
    lower, upper = box
    rng = stream(seed, "random_search")
    trace = RunTrace("random_search", seed)
    for _ in range(budget):
        x = rng.uniform(lower, upper, size=D)
        trace.record(D, _checked(objective, x, trace), x=x)
    return trace.finish()


def dsebo_config(budget, seed, acquisition=None, **params):
    """Convenience constructor mirroring the harness ``params`` block."""
    cfg = DseboConfig(budget=budget, seed=seed, acquisition=acquisition or AcquisitionConfig())
    return replace(cfg, **params)
