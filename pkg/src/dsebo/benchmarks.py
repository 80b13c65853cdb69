"""Synthetic test functions on [-1, 1]^d_f and their high-dimensional wrapper.

Each base function is evaluated by mapping ``u`` in ``[-1, 1]^d_f`` affinely
onto its usual domain.  :class:`HighDimFunction` embeds a base function in
``D`` dimensions: the first ``d_f`` coordinates (shifted by ``c``) drive the
base function and the remaining ones only enter a small penalty, giving an
optimal eps-effective dimension of ``d_f``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, UsageError

MICHALEWICZ_M = 10


def sphere(x):
    return float(np.sum(x**2))


def rosenbrock(x):
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2))


def levy(x):
    w = 1.0 + (x - 1.0) / 4.0
    head = np.sin(np.pi * w[0]) ** 2
    mid = np.sum((w[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * w[:-1] + 1.0) ** 2))
    tail = (w[-1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[-1]) ** 2)
    return float(head + mid + tail)


def griewank(x):
    i = np.arange(1, x.shape[0] + 1)
    return float(np.sum(x**2) / 4000.0 - np.prod(np.cos(x / np.sqrt(i))) + 1.0)


def dixon_price(x):
    i = np.arange(2, x.shape[0] + 1)
    return float((x[0] - 1.0) ** 2 + np.sum(i * (2.0 * x[1:] ** 2 - x[:-1]) ** 2))


def michalewicz(x):
    i = np.arange(1, x.shape[0] + 1)
    return float(-np.sum(np.sin(x) * np.sin(i * x**2 / np.pi) ** (2 * MICHALEWICZ_M)))


def _dixon_price_argmin(d):
    i = np.arange(1, d + 1)
    return 2.0 ** (-(2.0**i - 2.0) / 2.0**i)


# name -> (closed form, canonical domain, canonical minimizer or None, minimum or None)
_REGISTRY = {
    "sphere": (sphere, (-5.12, 5.12), lambda d: np.zeros(d), 0.0),
    "rosenbrock": (rosenbrock, (-2.048, 2.048), lambda d: np.ones(d), 0.0),
    "levy": (levy, (-10.0, 10.0), lambda d: np.ones(d), 0.0),
    "griewank": (griewank, (-600.0, 600.0), lambda d: np.zeros(d), 0.0),
    "dixon_price": (dixon_price, (-10.0, 10.0), _dixon_price_argmin, 0.0),
    "michalewicz": (michalewicz, (0.0, np.pi), None, None),
}

FUNCTION_NAMES = tuple(_REGISTRY)


@dataclass(frozen=True)
class BaseFunction:
    name: str
    d_f: int

    def __post_init__(self):
        if self.name not in _REGISTRY:
            raise ConfigurationError(f"unknown function {self.name!r}; choose from {FUNCTION_NAMES}")
        if self.d_f < 1 or (self.name in ("rosenbrock",) and self.d_f < 2):
            raise ConfigurationError(f"{self.name} needs a larger base dimension than {self.d_f}")

    @property
    def canonical_box(self):
        return _REGISTRY[self.name][1]

    def to_canonical(self, u):
        lo, hi = self.canonical_box
        return lo + (np.asarray(u, dtype=float) + 1.0) * (0.5 * (hi - lo))

    def to_unit(self, x):
        lo, hi = self.canonical_box
        return 2.0 * (np.asarray(x, dtype=float) - lo) / (hi - lo) - 1.0

    @property
    def optimizer_u(self):
        """Known minimizer in [-1, 1] coordinates, or None (Michalewicz)."""
        argmin = _REGISTRY[self.name][2]
        return None if argmin is None else self.to_unit(argmin(self.d_f))

    @property
    def f_min(self):
        return _REGISTRY[self.name][3]

    def __call__(self, u):
        return eval_base(self, u)


def eval_base(fn, u):
    u = np.asarray(u, dtype=float)
    if u.shape != (fn.d_f,):
        raise UsageError(f"{fn.name} expects shape ({fn.d_f},), got {u.shape}")
    if np.any(np.abs(u) > 1.0 + 1e-12):
        raise UsageError(f"{fn.name} input outside [-1, 1]^{fn.d_f}")
    return _REGISTRY[fn.name][0](fn.to_canonical(np.clip(u, -1.0, 1.0)))


@dataclass(frozen=True)
class HighDimFunction:
    """``F(x) = f(clamp(x[:d_f] - c)) - sum((x[d_f:] - c)^2) / K``."""

    base: BaseFunction
    D: int
    c: float = 0.1
    K: float = 1e4

    def __post_init__(self):
        if self.D <= self.base.d_f:
            raise ConfigurationError(f"ambient dimension {self.D} must exceed base dimension {self.base.d_f}")
        if not self.K > 0:
            raise ConfigurationError("K must be positive")

    @property
    def d_f(self):
        return self.base.d_f

    @property
    def f_min(self):
        return self.base.f_min

    @property
    def optimizer(self):
        """Ambient point attaining the minimum, when the base minimizer is known."""
        u = self.base.optimizer_u
        if u is None:
            return None
        x = np.full(self.D, self.c)
        x[: self.d_f] += u
        return x

    def head(self, x):
        return np.clip(x[: self.d_f] - self.c, -1.0, 1.0)

    def tail_penalty(self, x):
        return float(np.sum((x[self.d_f:] - self.c) ** 2) / self.K)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.D,):
            raise UsageError(f"expected a point of shape ({self.D},), got {x.shape}")
        return eval_base(self.base, self.head(x)) - self.tail_penalty(x)


def make_high_dim(base, D, c=0.1, K=1e4):
    if isinstance(base, str):
        raise UsageError("pass a BaseFunction; use make_function for names")
    return HighDimFunction(base, int(D), float(c), float(K))


def make_function(name, D, d_f=30, c=0.1, K=1e4):
    """Registry lookup used by the harness: ``F_c`` for base ``name``."""
    return make_high_dim(BaseFunction(name, int(d_f)), D, c, K)


def simple_regret(trace, f_star):
    """Best-so-far minus ``f_star`` at every iteration.

    ``trace`` may be a :class:`~dsebo.trace.RunTrace` or a sequence of raw values.
    """
    values = trace.values if hasattr(trace, "values") and not isinstance(trace, np.ndarray) else trace
    values = np.asarray(values, dtype=float)
    return np.minimum.accumulate(values) - f_star
