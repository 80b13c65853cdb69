"""Lower-confidence-bound acquisition and its candidate-set minimizer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import sample_box, subspace_bound
from .errors import ConfigurationError, UsageError


@dataclass(frozen=True)
class AcquisitionConfig:
    delta: float = 0.1
    n_uniform: int = 1000
    n_local: int = 1000
    local_sigma_scale: float = 0.1
    kappa_scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ConfigurationError(f"delta must lie in (0, 1), got {self.delta}")
        if self.n_uniform < 0 or self.n_local < 0 or self.n_uniform + self.n_local < 1:
            raise ConfigurationError("candidate counts must be non-negative and not both zero")
        if not self.local_sigma_scale > 0:
            raise ConfigurationError("local_sigma_scale must be positive")
        if not self.kappa_scale > 0:
            raise ConfigurationError("kappa_scale must be positive")


def kappa_schedule(t, d, delta=0.1):
    """GP-UCB exploration weight ``2 log(d t^2 pi^2 / (6 delta))``."""
    if t < 1 or d < 1:
        raise UsageError(f"kappa schedule needs t >= 1 and d >= 1, got t={t}, d={d}")
    return 2.0 * np.log(d * t * t * np.pi**2 / (6.0 * delta))


def lcb(mean, std, kappa):
    """Lower confidence bound ``mean - sqrt(kappa) * std`` (minimization)."""
    return mean - np.sqrt(kappa) * std


def candidates(d, incumbent, rng, cfg):
    """Uniform box samples followed by clamped Gaussian perturbations of the incumbent."""
    r = subspace_bound(d)
    parts = []
    if cfg.n_uniform:
        parts.append(sample_box(d, rng, cfg.n_uniform))
    if cfg.n_local:
        noise = rng.normal(0.0, cfg.local_sigma_scale * r, size=(cfg.n_local, d))
        parts.append(np.clip(incumbent[None, :] + noise, -r, r))
    return np.vstack(parts)


def select_lcb(mean, std, kappa):
    """Index minimizing the LCB; ``argmin`` returns the earliest index on ties."""
    return int(np.argmin(lcb(mean, std, kappa)))


def propose(model, incumbent, kappa, rng, cfg=None):
    """Pick the LCB-minimizing candidate over the model's subspace box."""
    cfg = cfg or AcquisitionConfig()
    incumbent = np.asarray(incumbent, dtype=float)
    d = model.d
    if incumbent.shape != (d,):
        raise UsageError(f"incumbent shape {incumbent.shape} does not match model dimension {d}")
    cand = candidates(d, incumbent, rng, cfg)
    mean, std = model.predict(cand)
    return cand[select_lcb(mean, std, kappa)].copy()
