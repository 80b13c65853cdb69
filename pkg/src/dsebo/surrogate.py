"""Zero-mean Gaussian-process regression with an isotropic RBF kernel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack, solve_triangular
from scipy.optimize import minimize
from scipy.spatial.distance import cdist

from .errors import DataError, NumericalError, UsageError

NOISE_FLOOR = 1e-10
DEFAULT_NOISE = 1e-6
JITTER_LADDER = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)

# bounds on (lengthscale / sqrt(d)) and signal variance
_LS_BOUNDS = (1e-2, 10.0)
_SF2_BOUNDS = (1e-3, 1e2)
_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class KernelParams:
    lengthscale: float
    signal_variance: float
    noise_variance: float = DEFAULT_NOISE

    def __post_init__(self):
        if not (self.lengthscale > 0 and self.signal_variance > 0):
            raise UsageError(f"kernel parameters must be positive: {self}")
        if not self.noise_variance >= NOISE_FLOOR:
            raise UsageError(f"noise variance below floor {NOISE_FLOOR}: {self.noise_variance}")

    @classmethod
    def default(cls, d, noise_variance=DEFAULT_NOISE):
        return cls(float(np.sqrt(d)), 1.0, noise_variance)

    def theta(self):
        return np.array([np.log(self.lengthscale), np.log(self.signal_variance)])

    def with_theta(self, theta):
        return KernelParams(float(np.exp(theta[0])), float(np.exp(theta[1])), self.noise_variance)


def rbf_kernel(x, x_prime, params):
    """``sf2 * exp(-|x - x'|^2 / (2 l^2))`` for a single pair of points."""
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    if x.shape != x_prime.shape:
        raise UsageError(f"kernel inputs differ in shape: {x.shape} vs {x_prime.shape}")
    sq = float(np.sum((x - x_prime) ** 2))
    return params.signal_variance * float(np.exp(-sq / (2.0 * params.lengthscale**2)))


def _sqdist(A, B):
    return cdist(A, B, "sqeuclidean")


def _cholesky(K, noise):
    """Lower Cholesky factor of ``K + (noise + jitter) I``, escalating jitter."""
    n = K.shape[0]
    for jitter in JITTER_LADDER:
        Ky = K.copy()
        Ky[np.diag_indices(n)] += noise + jitter
        L, info = lapack.dpotrf(Ky, lower=1, clean=1)
        if info == 0:
            return L, jitter
    return None, None


def _lml_and_grad(theta, sqd, y, noise):
    """Log marginal likelihood and its gradient w.r.t. (log l, log sf2)."""
    ls2 = np.exp(2.0 * theta[0])
    sf2 = np.exp(theta[1])
    K = sf2 * np.exp(-0.5 * sqd / ls2)
    L, _ = _cholesky(K, noise)
    if L is None:
        return -np.inf, np.zeros(2)
    n = y.shape[0]
    alpha, _ = lapack.dpotrs(L, y, lower=1)
    lml = -0.5 * y @ alpha - np.log(np.diag(L)).sum() - 0.5 * n * _LOG_2PI
    Kinv, info = lapack.dpotri(L, lower=1)
    if info != 0:
        return lml, np.zeros(2)
    Kinv = np.tril(Kinv) + np.tril(Kinv, -1).T
    W = np.outer(alpha, alpha) - Kinv
    dK_dls = K * (sqd / ls2)
    grad = 0.5 * np.array([np.sum(W * dK_dls), np.sum(W * K)])
    return lml, grad


def log_marginal_likelihood(params, X, y):
    """LML of targets ``y`` (already standardized) under ``params``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    sqd = _sqdist(X, X)
    lml, _ = _lml_and_grad(params.theta(), sqd, np.asarray(y, dtype=float), params.noise_variance)
    return float(lml)


def lml_gradient(params, X, y):
    """Analytic gradient of the LML w.r.t. (log lengthscale, log signal variance)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    _, grad = _lml_and_grad(params.theta(), _sqdist(X, X), np.asarray(y, dtype=float), params.noise_variance)
    return grad


@dataclass(frozen=True)
class GpModel:
    params: KernelParams
    train_inputs: np.ndarray
    train_targets: np.ndarray
    target_mean: float
    target_std: float
    chol: np.ndarray
    alpha: np.ndarray
    jitter: float = 0.0
    lml: float = float("nan")

    @property
    def d(self):
        return self.train_inputs.shape[1]

    def predict(self, Z):
        """Vectorized posterior (mean, std) in raw target units."""
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if Z.shape[1] != self.d:
            raise UsageError(f"query dimension {Z.shape[1]} != model dimension {self.d}")
        p = self.params
        Ks = p.signal_variance * np.exp(-0.5 * _sqdist(Z, self.train_inputs) / p.lengthscale**2)
        mean = Ks @ self.alpha
        V = solve_triangular(self.chol, Ks.T, lower=True, check_finite=False)
        var = np.maximum(p.signal_variance - np.sum(V * V, axis=0), 0.0)
        return self.target_mean + self.target_std * mean, self.target_std * np.sqrt(var)


def posterior(model, z):
    """Posterior mean and standard deviation at a single point."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise UsageError("posterior expects a single point; use GpModel.predict for batches")
    mean, std = model.predict(z[None, :])
    return float(mean[0]), float(std[0])


def standardize(y):
    y = np.asarray(y, dtype=float)
    mean = float(np.mean(y))
    std = float(np.std(y))
    if not np.isfinite(std) or std <= 0.0:
        std = 1.0
    return (y - mean) / std, mean, std


def build_model(X, y, params):
    """Condition a GP with fixed ``params`` on raw targets ``y``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    ys, mean, std = standardize(y)
    K = params.signal_variance * np.exp(-0.5 * _sqdist(X, X) / params.lengthscale**2)
    L, jitter = _cholesky(K, params.noise_variance)
    if L is None:
        raise NumericalError("Cholesky failed after jitter escalation to 1e-4")
    alpha, _ = lapack.dpotrs(L, ys, lower=1)
    # one step of iterative refinement; close points make K ill-conditioned
    Ky = K + (params.noise_variance + jitter) * np.eye(len(ys))
    alpha = alpha + lapack.dpotrs(L, ys - Ky @ alpha, lower=1)[0]
    lml = -0.5 * ys @ alpha - np.log(np.diag(L)).sum() - 0.5 * len(ys) * _LOG_2PI
    return GpModel(params, X, ys, mean, std, L, alpha, jitter, float(lml))


def _theta_bounds(d):
    root = np.sqrt(d)
    return [
        (np.log(_LS_BOUNDS[0] * root), np.log(_LS_BOUNDS[1] * root)),
        (np.log(_SF2_BOUNDS[0]), np.log(_SF2_BOUNDS[1])),
    ]


def fit_gp(data, warm=None, rng=None, n_restarts=0, noise_variance=DEFAULT_NOISE, maxiter=50):
    """Fit lengthscale and signal variance by maximizing the LML.

    Local L-BFGS-B searches start from ``warm`` (or the defaults
    ``l = sqrt(d)``, ``sf2 = 1``) plus ``n_restarts`` log-uniform random
    points drawn from ``rng``.  The default parameters are always kept as a
    candidate, so the returned LML never falls below theirs.
    """
    X = data.Z
    y = data.y
    if len(y) == 0:
        raise UsageError("cannot fit a GP to an empty dataset")
    if not np.all(np.isfinite(y)):
        raise DataError("GP targets must be finite")
    d = X.shape[1]
    ys, _, _ = standardize(y)
    sqd = _sqdist(X, X)
    bounds = _theta_bounds(d)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])

    default = KernelParams.default(d, noise_variance)
    candidates = [default.theta()]
    starts = []
    if warm is not None:
        w = np.clip(KernelParams(warm.lengthscale, warm.signal_variance, noise_variance).theta(), lo, hi)
        candidates.append(w)
        starts.append(w)
    else:
        starts.append(np.clip(default.theta(), lo, hi))
    if n_restarts:
        if rng is None:
            raise UsageError("random restarts need an rng")
        starts.extend(rng.uniform(lo, hi, size=(n_restarts, 2)))

    def objective(theta):
        lml, grad = _lml_and_grad(theta, sqd, ys, noise_variance)
        if not np.isfinite(lml):
            return 1e25, np.zeros(2)
        return -lml, -grad

    for x0 in starts:
        res = minimize(objective, x0, jac=True, method="L-BFGS-B", bounds=bounds,
                       options={"maxiter": maxiter})
        candidates.append(np.asarray(res.x))

    best_theta, best_lml = None, -np.inf
    for theta in candidates:
        lml, _ = _lml_and_grad(theta, sqd, ys, noise_variance)
        if lml > best_lml:
            best_theta, best_lml = theta, lml
    if best_theta is None:
        raise NumericalError("Cholesky failed after jitter escalation to 1e-4 for every candidate")
    return build_model(X, y, default.with_theta(best_theta))
