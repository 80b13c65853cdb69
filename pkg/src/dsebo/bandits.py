"""Bandit-style subspace-dimension selection baselines.

Each arm is a fixed-dimension random-embedding BO instance with its own
embedding matrix and dataset; nothing is shared between arms.  A strategy
decides which arm advances by one evaluation at every step.  An arm's
reward for a pull is the negated best value it has found so far.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import stream
from .acquisition import AcquisitionConfig
from .controller import SubspaceOptimizer, _checked
from .embedding import embed, init_dataset, new_shared_embedding, slice_embedding
from .errors import ConfigurationError, UsageError
from .surrogate import DEFAULT_NOISE
from .trace import RunTrace

DEFAULT_ARMS = (10, 20, 30, 50, 70, 90, 100)
STRATEGIES = ("epsilon_greedy", "c_ucb", "ucb_e", "thompson", "softmax",
              "successive_halving", "extreme", "expectation", "random")


@dataclass(frozen=True)
class StrategyConfig:
    kind: str
    epsilon: float = 0.5
    ucb_e_c: float = 0.5
    tau: float = 1.0

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ConfigurationError(f"unknown bandit strategy {self.kind!r}; choose from {STRATEGIES}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigurationError("epsilon must lie in [0, 1]")
        if self.tau <= 0 or self.ucb_e_c < 0:
            raise ConfigurationError("tau must be positive and ucb_e_c non-negative")


@dataclass
class Arm:
    d: int
    pulls: int = 0
    best: float = float("inf")
    rewards: list = field(default_factory=list)
    # set by run_mab; plain Arm objects are enough for strategy selection
    embedding: object = None
    dataset: object = None
    optimizer: object = None

    def observe(self, y):
        self.pulls += 1
        self.best = min(self.best, float(y))
        self.rewards.append(reward(self))

    @property
    def mean_reward(self):
        return float(np.mean(self.rewards)) if self.rewards else float("inf")

    @property
    def max_reward(self):
        return max(self.rewards) if self.rewards else float("inf")


def reward(arm):
    """Negated best-so-far value (higher is better)."""
    if arm.pulls < 1:
        raise UsageError("an unpulled arm has no reward")
    return -arm.best


def _argmax(scores):
    return int(np.argmax(np.asarray(scores, dtype=float)))


class SuccessiveHalving:
    """Equal pulls per surviving arm each phase, then keep the better half.

    Each phase gives every survivor ``budget // (n_arms * ceil(log2 n_arms))``
    pulls (at least one); whatever budget is left goes to the final survivor.
    """

    def __init__(self, n_arms, budget):
        self.survivors = list(range(n_arms))
        phases = max(1, math.ceil(math.log2(n_arms))) if n_arms > 1 else 1
        self.phase_pulls = max(1, budget // (n_arms * phases))
        self.start = [0] * n_arms

    def select(self, arms):
        while len(self.survivors) > 1:
            done = [arms[i].pulls - self.start[i] for i in self.survivors]
            if min(done) < self.phase_pulls:
                return self.survivors[int(np.argmin(done))]
            ranked = sorted(self.survivors, key=lambda i: (arms[i].best, i))
            self.survivors = sorted(ranked[: math.ceil(len(ranked) / 2)])
            for i in self.survivors:
                self.start[i] = arms[i].pulls
        return self.survivors[0]


def select_arm(strategy, arms, t, rng, state=None):
    """Index of the arm to pull at global iteration ``t``.

    ``state`` carries the :class:`SuccessiveHalving` bookkeeping; the other
    strategies are stateless.
    """
    if not arms:
        raise ConfigurationError("no arms to select from")
    unpulled = [i for i, a in enumerate(arms) if a.pulls == 0]
    if unpulled:
        return unpulled[0]
    kind = strategy.kind
    n = np.array([a.pulls for a in arms], dtype=float)
    means = np.array([a.mean_reward for a in arms])
    if kind == "random":
        return int(rng.integers(len(arms)))
    if kind == "expectation":
        return _argmax(means)
    if kind == "extreme":
        return _argmax([a.max_reward for a in arms])
    if kind == "epsilon_greedy":
        if rng.random() < strategy.epsilon:
            return int(rng.integers(len(arms)))
        return _argmax(means)
    if kind == "c_ucb":
        return _argmax(means + np.sqrt(2.0 * np.log(max(t, 1)) / n))
    if kind == "ucb_e":
        return _argmax(means + np.sqrt(strategy.ucb_e_c / n))
    if kind == "softmax":
        logits = (means - means.max()) / strategy.tau
        p = np.exp(logits)
        return int(rng.choice(len(arms), p=p / p.sum()))
    if kind == "thompson":
        return _argmax(rng.normal(means, np.sqrt(1.0 / n)))
    if kind == "successive_halving":
        if state is None:
            raise UsageError("successive halving needs its SuccessiveHalving state")
        return state.select(arms)
    raise ConfigurationError(f"unknown bandit strategy {kind!r}")


def run_mab(objective, D, arms_dims, strategy, budget, seed, acquisition=None,
            box=(-1.0, 1.0), restart_every=25, n_restarts=3, noise_variance=DEFAULT_NOISE):
    """Spend ``budget`` evaluations across independent fixed-dimension BO arms."""
    arms_dims = [int(d) for d in arms_dims]
    if not arms_dims:
        raise ConfigurationError("no arms to select from")
    if any(not 1 <= d <= D for d in arms_dims):
        raise ConfigurationError(f"arm dimensions {arms_dims} must lie in [1, {D}]")
    if budget < len(arms_dims):
        raise ConfigurationError(f"budget {budget} cannot cover one warm-up pull per arm ({len(arms_dims)})")
    if isinstance(strategy, str):
        strategy = StrategyConfig(strategy)
    acquisition = acquisition or AcquisitionConfig()
    lower, upper = box
    trace = RunTrace(f"mab:{strategy.kind}", seed)
    rng = stream(seed, "bandit")

    arms = []
    for i, d in enumerate(arms_dims):
        arm = Arm(d)
        # arm i's matrix comes from its own seed stream
        arm.embedding = new_shared_embedding(D, d, int(stream(seed, "arm", i).integers(2**63)))
        arm.optimizer = SubspaceOptimizer(acquisition, stream(seed, "acquisition", i), stream(seed, "gp", i),
                                          restart_every, n_restarts, noise_variance)
        arms.append(arm)

    def evaluate(arm, z):
        x = embed(slice_embedding(arm.embedding, arm.d), z, lower, upper)
        y = _checked(objective, x, trace)
        trace.record(arm.d, y, z, x)
        arm.observe(y)
        return y

    for i, arm in enumerate(arms):
        arm.dataset = init_dataset(None, 0, arm.d, stream(seed, "init", i), lambda z, a=arm: evaluate(a, z))

    sh = SuccessiveHalving(len(arms), budget) if strategy.kind == "successive_halving" else None
    for t in range(len(arms) + 1, budget + 1):
        arm = arms[select_arm(strategy, arms, t, rng, sh)]
        z = arm.optimizer.suggest(arm.dataset, arm.pulls + 1)
        arm.dataset.add(z, evaluate(arm, z))

    trace.pulls = {i: a.pulls for i, a in enumerate(arms)}
    return trace.finish()
