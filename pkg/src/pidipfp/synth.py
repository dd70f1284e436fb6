"""Synthetic validation inputs: exact bitwise gates and Gaussian fusion rules."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .discretize import histogram_assign, joint_counts
from .dist import JointDistribution, from_counts
from .errors import LengthMismatch, SingularCovariance

RNG_ALGORITHM = "numpy.random.PCG64 via default_rng(seed)"


class GateKind(str, enum.Enum):
    AND = "and"
    XOR = "xor"
    UNIQUE1 = "unique1"
    UNIQUE2 = "unique2"
    REDUNDANCY = "redundancy"


_GATES = {
    GateKind.AND: lambda a, b: a & b,
    GateKind.XOR: lambda a, b: a ^ b,
    GateKind.UNIQUE1: lambda a, b: a,
    GateKind.UNIQUE2: lambda a, b: b,
    GateKind.REDUNDANCY: lambda a, b: a,
}


def gate_distribution(g: GateKind | str) -> JointDistribution:
    """Exact joint over two fair bits and a deterministic output bit.

    For ``redundancy`` the second input is a copy of the first.
    """
    g = GateKind(g)
    counts = np.zeros((2, 2, 2))
    for a in (0, 1):
        for b in (0, 1):
            if g is GateKind.REDUNDANCY and a != b:
                continue
            counts[a, b, _GATES[g](a, b)] += 1
    return from_counts(counts)


@dataclass(frozen=True)
class FusionRule:
    """``kind`` is one of ``add``, ``mul``, ``weighted`` (``y = x1 + w*x2``), ``only_second``."""

    kind: str
    weight: float = 1.0

    def __post_init__(self):
        if self.kind not in ("add", "mul", "weighted", "only_second"):
            raise ValueError(f"unknown fusion rule {self.kind!r}")
        if self.kind == "weighted" and not self.weight > 0:
            raise ValueError("weighted fusion needs a positive weight")

    @property
    def name(self) -> str:
        if self.kind == "weighted":
            return f"weighted_{self.weight:g}"
        return self.kind

    def apply(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        if self.kind == "add":
            return x1 + x2
        if self.kind == "mul":
            return x1 * x2
        if self.kind == "weighted":
            return x1 + self.weight * x2
        return x2.copy()


STANDARD_RULES = (
    FusionRule("add"),
    FusionRule("mul"),
    FusionRule("weighted", 10.0),
    FusionRule("weighted", 100.0),
    FusionRule("only_second"),
)


def decorrelate(x1, x2):
    """Symmetric (ZCA) whitening of a pair of sequences.

    Centers both, then multiplies by the inverse square root of their 2x2
    sample covariance so the outputs have identity sample covariance.
    """
    x1 = np.asarray(x1, dtype=np.float64).ravel()
    x2 = np.asarray(x2, dtype=np.float64).ravel()
    if x1.size != x2.size:
        raise LengthMismatch(f"lengths differ: {x1.size} vs {x2.size}")
    if x1.size < 2:
        raise ValueError("need at least two samples")
    z = np.stack([x1 - x1.mean(), x2 - x2.mean()])
    cov = np.cov(z)
    evals, evecs = np.linalg.eigh(cov)
    if evals[0] <= 1e-12 * max(evals[1], np.finfo(float).tiny):
        raise SingularCovariance(f"sample covariance eigenvalues {evals}")
    w = evecs @ np.diag(evals**-0.5) @ evecs.T
    out = w @ z
    return out[0], out[1]


def fusion_samples(rule: FusionRule, n: int, seed: int = 0, whiten: bool = True):
    """Draw ``x1, x2 ~ N(0, 1)`` i.i.d., optionally whiten, and apply ``rule``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    x1 = rng.standard_normal(n)
    x2 = rng.standard_normal(n)
    if whiten:
        x1, x2 = decorrelate(x1, x2)
    return x1, x2, rule.apply(x1, x2)


def fusion_joint(rule: FusionRule, n: int, seed: int = 0, bins: int = 8) -> JointDistribution:
    """Empirical joint of the three fusion variables, each cut into equal-width bins."""
    x1, x2, y = fusion_samples(rule, n, seed)
    counts = joint_counts(histogram_assign(x1, bins), histogram_assign(x2, bins), histogram_assign(y, bins))
    return from_counts(counts)


def embedding_triple(n: int, dim: int = 4, seed: int = 0, target: str = "x1", centers: int = 6, noise: float = 0.1):
    """Row-aligned synthetic modality embeddings with cluster structure.

    ``x1`` and ``x2`` are independent Gaussian mixtures in ``dim`` dimensions.
    ``target`` picks ``y``: ``x1`` or ``x2`` copies that modality, ``both``
    concatenates them, ``noise`` is independent of both.
    """
    if target not in ("x1", "x2", "both", "noise"):
        raise ValueError(f"unknown target {target!r}")
    rng = np.random.default_rng(seed)

    def mixture():
        mu = rng.normal(scale=3.0, size=(centers, dim))
        return mu[rng.integers(centers, size=n)] + noise * rng.standard_normal((n, dim))

    x1, x2 = mixture(), mixture()
    if target == "x1":
        y = x1.copy()
    elif target == "x2":
        y = x2.copy()
    elif target == "both":
        y = np.hstack([x1, x2])
    else:
        y = mixture()
    return x1, x2, y
