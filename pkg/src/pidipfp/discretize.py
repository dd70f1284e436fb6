"""Turn continuous embeddings into discrete labels and build empirical joints."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, TooFewSamples


class Method(str, enum.Enum):
    KMEANS = "kmeans"
    HISTOGRAM = "histogram"


@dataclass(frozen=True)
class DiscretizeConfig:
    k1: int = 20
    k2: int = 20
    ky: int = 10
    method: Method = Method.KMEANS
    seed: int = 0
    kmeans_max_iters: int = 300
    kmeans_restarts: int = 4

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if min(self.k1, self.k2, self.ky) < 2:
            raise ValueError("cluster counts must be >= 2")
        if self.kmeans_max_iters < 1 or self.kmeans_restarts < 1:
            raise ValueError("kmeans_max_iters and kmeans_restarts must be >= 1")

    def to_dict(self) -> dict:
        return {
            "k1": self.k1,
            "k2": self.k2,
            "ky": self.ky,
            "method": self.method.value,
            "seed": self.seed,
            "kmeans_max_iters": self.kmeans_max_iters,
            "kmeans_restarts": self.kmeans_restarts,
        }


@dataclass(frozen=True, eq=False)
class LabelVector:
    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).ravel()
        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            raise ValueError(f"labels must lie in [0, {self.k})")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.labels.size


def as_embedding(x) -> np.ndarray:
    """Validate and return a (rows, dim) float64 array; 1-D input becomes one column."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError(f"embedding must be a non-empty 2-way array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("embedding contains non-finite values")
    return x


def _sq_dists(x: np.ndarray, x_sq: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = x_sq[:, None] - 2.0 * (x @ centers.T) + np.einsum("ij,ij->i", centers, centers)[None, :]
    return np.maximum(d, 0.0)


def _kmeans_pp(x, x_sq, k, rng) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    closest = _sq_dists(x, x_sq, centers[:1])[:, 0]
    for c in range(1, k):
        total = closest.sum()
        if total <= 0:
            # all remaining points coincide with a chosen center
            idx = rng.integers(n)
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers[c] = x[idx]
        closest = np.minimum(closest, _sq_dists(x, x_sq, centers[c : c + 1])[:, 0])
    return centers


def _lloyd(x, x_sq, centers, max_iters):
    k = centers.shape[0]
    labels = None
    for _ in range(max_iters):
        d = _sq_dists(x, x_sq, centers)
        new = np.argmin(d, axis=1)  # ties go to the lowest index
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        counts = np.bincount(labels, minlength=k)
        sums = np.zeros_like(centers)
        np.add.at(sums, labels, x)
        nonempty = counts > 0
        centers = centers.copy()
        centers[nonempty] = sums[nonempty] / counts[nonempty, None]
        empty = np.flatnonzero(~nonempty)
        if empty.size:
            # reseed empty clusters at the points farthest from their centroid
            far = np.argsort(-d[np.arange(x.shape[0]), labels], kind="stable")
            centers[empty] = x[far[: empty.size]]
            labels = None
    d = _sq_dists(x, x_sq, centers)
    labels = np.argmin(d, axis=1)
    inertia = float(np.sum((x - centers[labels]) ** 2))
    return labels, centers, inertia


def kmeans_assign(x, k: int, seed: int = 0, max_iters: int = 300, restarts: int = 4):
    """k-means++ seeded Lloyd clustering; best of ``restarts`` runs by inertia.

    Returns ``(LabelVector, inertia)``. Deterministic for fixed inputs and seed.
    """
    x = as_embedding(x)
    if k > x.shape[0]:
        raise TooFewSamples(f"cannot form {k} clusters from {x.shape[0]} samples")
    rng = np.random.default_rng(seed)
    x_sq = np.einsum("ij,ij->i", x, x)
    best = None
    for _ in range(restarts):
        centers = _kmeans_pp(x, x_sq, k, rng)
        labels, _, inertia = _lloyd(x, x_sq, centers, max_iters)
        if best is None or inertia < best[1]:
            best = (labels, inertia)
    return LabelVector(best[0], k), best[1]


def histogram_assign(x, bins: int) -> LabelVector:
    """Equal-width bins over ``[min, max]``; the maximum lands in the last bin."""
    if bins < 2:
        raise ValueError("bins must be >= 2")
    x = np.asarray(x, dtype=np.float64).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("values must be finite")
    lo, hi = x.min(), x.max()
    if hi <= lo:
        return LabelVector(np.zeros(x.size, dtype=np.int64), bins)
    idx = np.floor((x - lo) / (hi - lo) * bins).astype(np.int64)
    return LabelVector(np.clip(idx, 0, bins - 1), bins)


def joint_counts(l1: LabelVector, l2: LabelVector, ly: LabelVector) -> np.ndarray:
    if not (len(l1) == len(l2) == len(ly)):
        raise LengthMismatch(f"label lengths differ: {len(l1)}, {len(l2)}, {len(ly)}")
    counts = np.zeros((l1.k, l2.k, ly.k), dtype=np.int64)
    np.add.at(counts, (l1.labels, l2.labels, ly.labels), 1)
    return counts


def discretize(x, k: int, method: Method | str, seed: int = 0, max_iters: int = 300, restarts: int = 4) -> LabelVector:
    """Label one variable with either k-means or 1-D histogram binning."""
    method = Method(method)
    x = as_embedding(x)
    if method is Method.HISTOGRAM:
        if x.shape[1] != 1:
            raise ValueError(f"histogram binning needs 1-D data, got dim={x.shape[1]}")
        return histogram_assign(x[:, 0], k)
    labels, _ = kmeans_assign(x, k, seed=seed, max_iters=max_iters, restarts=restarts)
    return labels


def discretize_triple(x1, x2, y, cfg: DiscretizeConfig) -> np.ndarray:
    """Discretize three row-aligned matrices and return their joint count tensor.

    Each variable gets its own child seed spawned from ``cfg.seed``.
    """
    seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(cfg.seed).spawn(3)]
    labels = [
        discretize(v, k, cfg.method, seed=s, max_iters=cfg.kmeans_max_iters, restarts=cfg.kmeans_restarts)
        for v, k, s in zip((x1, x2, y), (cfg.k1, cfg.k2, cfg.ky), seeds)
    ]
    return joint_counts(*labels)
