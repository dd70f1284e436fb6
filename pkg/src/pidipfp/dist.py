"""Discrete joint distributions over (X1, X2, Y) and the information measures on them.

Information quantities are reported in bits. KL divergences are returned in
nats, which is the natural unit of the Sinkhorn updates; divide by
``LN2`` to convert.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AbsoluteContinuityViolation,
    AllZeroCounts,
    NegativeCount,
    ShapeMismatch,
)

LN2 = float(np.log(2.0))

NORMALIZATION_TOL = 1e-12
MARGINAL_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SupportSizes:
    m: int
    n: int
    k: int

    def __post_init__(self):
        if min(self.m, self.n, self.k) < 1:
            raise ShapeMismatch(f"support sizes must be >= 1, got {self.shape}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.m, self.n, self.k)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Dense joint mass ``mass[x1, x2, y]``; nonnegative and summing to one.

    The array is stored read-only. Use :func:`from_counts` to build one from
    arbitrary nonnegative weights.
    """

    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=np.float64)
        if mass.ndim != 3:
            raise ShapeMismatch(f"joint must be a 3-way array, got ndim={mass.ndim}")
        if mass.size == 0:
            raise ShapeMismatch("joint has an empty axis")
        if np.any(mass < 0) or not np.all(np.isfinite(mass)):
            raise NegativeCount("joint mass must be finite and nonnegative")
        total = mass.sum()
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"joint mass sums to {total!r}, not 1")
        object.__setattr__(self, "mass", _frozen(mass))

    @property
    def sizes(self) -> SupportSizes:
        return SupportSizes(*self.mass.shape)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.mass.shape

    def swap_sources(self) -> "JointDistribution":
        """Return the same distribution with the roles of X1 and X2 exchanged."""
        return JointDistribution(np.transpose(self.mass, (1, 0, 2)))

    def __repr__(self):
        return f"JointDistribution(shape={self.shape})"


@dataclass(frozen=True, eq=False)
class MarginalPair:
    """Pair marginals ``m1[x1, y]``, ``m2[x2, y]`` and the label marginal ``py``."""

    m1: np.ndarray
    m2: np.ndarray
    py: np.ndarray

    def __post_init__(self):
        m1 = np.asarray(self.m1, dtype=np.float64)
        m2 = np.asarray(self.m2, dtype=np.float64)
        py = np.asarray(self.py, dtype=np.float64)
        if m1.ndim != 2 or m2.ndim != 2 or py.ndim != 1:
            raise ShapeMismatch("expected m1, m2 2-way and py 1-way")
        if not (m1.shape[1] == m2.shape[1] == py.shape[0]):
            raise ShapeMismatch(
                f"label axis disagrees: {m1.shape[1]}, {m2.shape[1]}, {py.shape[0]}"
            )
        for name, a in (("m1", m1), ("m2", m2), ("py", py)):
            if np.any(a < 0):
                raise NegativeCount(f"{name} has negative entries")
            if abs(a.sum() - 1.0) > MARGINAL_TOL:
                raise ValueError(f"{name} sums to {a.sum()!r}, not 1")
        # necessary condition for a nonempty feasible set
        dev = max(np.abs(m1.sum(0) - py).max(), np.abs(m2.sum(0) - py).max())
        if dev > MARGINAL_TOL:
            raise ValueError(f"pair marginals disagree with p(y) by {dev:.3g}")
        object.__setattr__(self, "m1", _frozen(m1))
        object.__setattr__(self, "m2", _frozen(m2))
        object.__setattr__(self, "py", _frozen(py))

    @property
    def sizes(self) -> SupportSizes:
        return SupportSizes(self.m1.shape[0], self.m2.shape[0], self.py.shape[0])

    def deviation(self, q: np.ndarray) -> float:
        """Max absolute deviation of a 3-way array's pair marginals from this pair."""
        q = np.asarray(q)
        return float(
            max(np.abs(q.sum(axis=1) - self.m1).max(), np.abs(q.sum(axis=0) - self.m2).max())
        )

    def max_difference(self, other: "MarginalPair") -> float:
        if self.sizes != other.sizes:
            return float("inf")
        return float(
            max(
                np.abs(self.m1 - other.m1).max(),
                np.abs(self.m2 - other.m2).max(),
                np.abs(self.py - other.py).max(),
            )
        )


@dataclass(frozen=True)
class InfoProfile:
    """Mutual-information profile of a joint, all in bits."""

    mi_joint: float
    mi_1: float
    mi_2: float
    cmi_1: float
    cmi_2: float
    h_y: float


def from_counts(counts) -> JointDistribution:
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim != 3:
        raise ShapeMismatch(f"counts must be a 3-way array, got ndim={counts.ndim}")
    if np.any(counts < 0):
        raise NegativeCount("counts contain negative entries")
    total = counts.sum()
    if not total > 0:
        raise AllZeroCounts("counts sum to zero")
    mass = counts / total
    # one more pass so the stored sum is 1 to rounding
    return JointDistribution(mass / mass.sum())


def marginals(joint: JointDistribution) -> MarginalPair:
    q = joint.mass
    return MarginalPair(m1=q.sum(axis=1), m2=q.sum(axis=0), py=q.sum(axis=(0, 1)))


def _entropy_bits(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=np.float64).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def entropy_y(joint: JointDistribution) -> float:
    return _entropy_bits(joint.mass.sum(axis=(0, 1)))


def conditional_entropy_y(joint: JointDistribution) -> float:
    """H(Y | X1, X2) in bits."""
    q = joint.mass
    return _entropy_bits(q) - _entropy_bits(q.sum(axis=2))


def info_profile(joint: JointDistribution) -> InfoProfile:
    """All pairwise and conditional mutual informations between the sources and Y.

    Conditional terms use the entropy form
    ``I(A;Y|B) = H(A,B) + H(Y,B) - H(A,Y,B) - H(B)``. Zero-probability
    conditioning states drop out of every sum because ``0 log 0 = 0``.
    """
    q = joint.mass
    h_all = _entropy_bits(q)
    h_12 = _entropy_bits(q.sum(axis=2))
    h_1y = _entropy_bits(q.sum(axis=1))
    h_2y = _entropy_bits(q.sum(axis=0))
    h_1 = _entropy_bits(q.sum(axis=(1, 2)))
    h_2 = _entropy_bits(q.sum(axis=(0, 2)))
    h_y = _entropy_bits(q.sum(axis=(0, 1)))
    return InfoProfile(
        mi_joint=h_12 + h_y - h_all,
        mi_1=h_1 + h_y - h_1y,
        mi_2=h_2 + h_y - h_2y,
        cmi_1=h_12 + h_2y - h_all - h_2,
        cmi_2=h_12 + h_1y - h_all - h_1,
        h_y=h_y,
    )


def kl_divergence(j1, j2, eps_check: float = 0.0) -> float:
    """KL(j1 || j2) in nats.

    Accepts :class:`JointDistribution` or raw arrays of matching shape.
    Cells where ``j1 == 0`` contribute nothing. Cells where ``j2 == 0`` and
    ``j1 > eps_check`` raise :class:`AbsoluteContinuityViolation`; cells in
    ``(0, eps_check]`` there are ignored.
    """
    a = j1.mass if isinstance(j1, JointDistribution) else np.asarray(j1, dtype=np.float64)
    b = j2.mass if isinstance(j2, JointDistribution) else np.asarray(j2, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatch(f"KL between shapes {a.shape} and {b.shape}")
    support = a > 0
    hole = support & (b <= 0)
    if np.any(a[hole] > eps_check):
        raise AbsoluteContinuityViolation(
            f"{int(np.count_nonzero(hole))} cells have mass in j1 but none in j2"
        )
    use = support & (b > 0)
    return float(np.sum(a[use] * (np.log(a[use]) - np.log(b[use]))))
