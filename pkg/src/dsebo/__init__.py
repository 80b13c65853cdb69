"""High-dimensional Bayesian optimization with a dynamically expanded shared random embedding."""

from .acquisition import AcquisitionConfig, kappa_schedule, lcb, propose
from .bandits import Arm, StrategyConfig, reward, run_mab, select_arm
from .baselines import run_fixed_embedding, run_random_search
from .benchmarks import BaseFunction, HighDimFunction, eval_base, make_function, make_high_dim, simple_regret
from .controller import (
    ControllerState,
    DseboConfig,
    ExpansionHistory,
    convergence_threshold,
    next_dimension,
    run_dsebo,
)
from .embedding import (
    SharedEmbedding,
    SubspaceDataset,
    embed,
    init_dataset,
    new_shared_embedding,
    pad,
    slice_embedding,
)
from .errors import ConfigurationError, DataError, DseboError, NumericalError, UsageError
from .experiment import ExperimentConfig, run_experiment, summarize, sweep
from .surrogate import GpModel, KernelParams, fit_gp, posterior, rbf_kernel
from .trace import RunTrace

__version__ = "0.1.0"
