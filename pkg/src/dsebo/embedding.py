"""Shared random embedding.

A single ``D x d_h`` Gaussian matrix ``S`` serves every subspace dimension:
the embedding map for dimension ``d`` is the first ``d`` columns of ``S``.
A point ``z`` of a ``d``-dimensional subspace zero-padded to ``d' > d``
therefore lands on exactly the same ambient point, so evaluations carry over
between subspaces without re-querying the objective.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._rng import stream
from .errors import ConfigurationError, UsageError

_MAGIC = b"DSEB"
_DUMP_VERSION = 1


@dataclass(frozen=True)
class SharedEmbedding:
    """Immutable ``D x d_h`` embedding matrix with entries ~ N(0, 1/d_h)."""

    S: np.ndarray
    D: int
    d_h: int
    seed: int

    def slice(self, d):
        return slice_embedding(self, d)

    def dump(self, path):
        """Write ``S`` as a 16-byte header plus little-endian row-major float64."""
        header = _MAGIC + struct.pack("<III", _DUMP_VERSION, self.D, self.d_h)
        body = np.ascontiguousarray(self.S, dtype="<f8").tobytes(order="C")
        Path(path).write_bytes(header + body)


def load_embedding_dump(path, seed=-1):
    """Read a matrix written by :meth:`SharedEmbedding.dump`.

    The dump does not carry the seed; pass it if known.
    """
    raw = Path(path).read_bytes()
    if len(raw) < 16 or raw[:4] != _MAGIC:
        raise UsageError(f"{path}: not an embedding dump")
    version, D, d_h = struct.unpack("<III", raw[4:16])
    if version != _DUMP_VERSION:
        raise UsageError(f"{path}: unsupported dump version {version}")
    expected = 16 + 8 * D * d_h
    if len(raw) != expected:
        raise UsageError(f"{path}: expected {expected} bytes, found {len(raw)}")
    S = np.frombuffer(raw, dtype="<f8", offset=16).reshape(D, d_h).astype(np.float64)
    S.setflags(write=False)
    return SharedEmbedding(S=S, D=D, d_h=d_h, seed=seed)


def new_shared_embedding(D, d_h, seed):
    """Draw the shared matrix from the dedicated ``embedding`` PCG64 stream."""
    D, d_h = int(D), int(d_h)
    if D < 1 or d_h < 1 or d_h > D:
        raise ConfigurationError(f"need 1 <= d_h <= D, got D={D}, d_h={d_h}")
    rng = stream(seed, "embedding")
    S = rng.normal(0.0, np.sqrt(1.0 / d_h), size=(D, d_h))
    S.setflags(write=False)
    return SharedEmbedding(S=S, D=D, d_h=d_h, seed=int(seed))


def slice_embedding(emb, d):
    """Embedding map ``A_d``: a read-only view of the first ``d`` columns of ``S``."""
    d = int(d)
    if not 1 <= d <= emb.d_h:
        raise ConfigurationError(f"slice dimension {d} outside [1, {emb.d_h}]")
    return emb.S[:, :d]


def project_to_box(x, lower=-1.0, upper=1.0):
    """Euclidean projection onto an axis-aligned box (componentwise clamp)."""
    return np.clip(x, lower, upper)


def embed(A, z, lower=-1.0, upper=1.0):
    """Map subspace point ``z`` to the ambient box: ``clamp(A @ z)``."""
    z = np.asarray(z, dtype=float)
    if A.ndim != 2 or z.ndim != 1 or A.shape[1] != z.shape[0]:
        raise UsageError(f"embedding map {A.shape} does not accept a point of shape {z.shape}")
    return project_to_box(lift(A, z), lower, upper)


def lift(A, z):
    """``A @ z`` accumulated column by column in index order.

    BLAS may change its summation order with the number of columns; the fixed
    order here makes trailing zero coordinates contribute exact zeros, so a
    zero-padded point lifts to bit-identically the same ambient point.
    """
    x = np.zeros(A.shape[0])
    for k in range(A.shape[1]):
        x += A[:, k] * z[k]
    return x


def pad(z, d_new):
    """Append zeros to ``z`` up to length ``d_new``."""
    z = np.asarray(z, dtype=float).ravel()
    if d_new < z.shape[0]:
        raise UsageError(f"cannot pad a length-{z.shape[0]} point down to {d_new}")
    out = np.zeros(int(d_new))
    out[: z.shape[0]] = z
    return out


def subspace_bound(d):
    """Half-width of the subspace box ``[-sqrt(d), sqrt(d)]^d``."""
    return float(np.sqrt(d))


def sample_box(d, rng, n=None):
    """Uniform sample(s) from the ``d``-dimensional subspace box."""
    r = subspace_bound(d)
    size = (d,) if n is None else (n, d)
    return rng.uniform(-r, r, size=size)


@dataclass
class SubspaceDataset:
    """Ordered ``(z, y)`` pairs sharing a common subspace dimension ``d``."""

    d: int
    points: list = field(default_factory=list)
    values: list = field(default_factory=list)

    def __len__(self):
        return len(self.values)

    def add(self, z, y):
        z = np.asarray(z, dtype=float).ravel()
        if z.shape[0] != self.d:
            raise UsageError(f"point of dimension {z.shape[0]} added to a {self.d}-dimensional dataset")
        y = float(y)
        if not np.isfinite(y):
            raise UsageError("dataset values must be finite")
        self.points.append(z)
        self.values.append(y)

    @property
    def Z(self):
        if not self.points:
            return np.empty((0, self.d))
        return np.vstack(self.points)

    @property
    def y(self):
        return np.asarray(self.values, dtype=float)

    def best_index(self):
        """Index of the smallest value; earliest wins ties."""
        return int(np.argmin(self.values))


def init_dataset(prev, d_prev, d_new, rng, evaluate=None):
    """Build the dataset for a newly entered subspace.

    With no previous data (first iteration) one point is sampled uniformly
    from the ``d_new``-dimensional box and scored with ``evaluate(z)``.
    Otherwise every stored point is zero-padded to ``d_new``; values are
    carried over untouched and no evaluation happens.
    """
    if prev is None or len(prev) == 0:
        if evaluate is None:
            raise UsageError("first-iteration initialization needs an evaluate callback")
        data = SubspaceDataset(d=int(d_new))
        z = sample_box(int(d_new), rng)
        data.add(z, evaluate(z))
        return data
    if d_new < d_prev:
        raise UsageError(f"cannot shrink subspace from {d_prev} to {d_new}")
    if prev.d != d_prev:
        raise UsageError(f"dataset dimension {prev.d} differs from d_prev={d_prev}")
    data = SubspaceDataset(d=int(d_new))
    for z, y in zip(prev.points, prev.values):
        data.points.append(pad(z, d_new))
        data.values.append(y)
    return data
