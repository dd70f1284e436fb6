"""Redundant / unique / synergistic information and modality contributions."""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

from .dist import JointDistribution, info_profile, marginals
from .errors import InconsistentInputs
from .solver import Coupling, solve

NEGATIVE_TOL = 1e-6
DENOM_EPSILON = 1e-9
CONSISTENCY_TOL = 1e-8


class PidWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class PidResult:
    """PID of I(X1, X2; Y) in bits.

    ``redundancy``, ``unique_1``, ``unique_2`` and ``synergy`` are clamped at
    zero; the unclamped solver values are kept in the ``raw_*`` fields.
    """

    redundancy: float
    unique_1: float
    unique_2: float
    synergy: float
    total_mi: float
    c1: float
    c2: float
    degenerate_contributions: bool
    raw_redundancy: float
    raw_unique_1: float
    raw_unique_2: float
    raw_synergy: float

    @property
    def components(self) -> tuple[float, float, float, float]:
        return (self.redundancy, self.unique_1, self.unique_2, self.synergy)

    @property
    def raw_components(self) -> tuple[float, float, float, float]:
        return (self.raw_redundancy, self.raw_unique_1, self.raw_unique_2, self.raw_synergy)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PidResult":
        return cls(**d)


@dataclass(frozen=True)
class CrossCheck:
    sum_residual: float
    path_residual: float
    feasibility_residual: float

    def worst(self) -> float:
        return max(self.sum_residual, self.path_residual, self.feasibility_residual)


def _clamp(name: str, value: float) -> float:
    if value < -NEGATIVE_TOL:
        warnings.warn(
            f"{name} = {value:.3g} bits is below -{NEGATIVE_TOL:g}; solver likely not converged",
            PidWarning,
            stacklevel=4,
        )
    return max(value, 0.0)


def _shares(u1: float, u2: float, denom_epsilon: float):
    total = u1 + u2
    if total > denom_epsilon:
        return u1 / total, u2 / total, False
    return 0.5, 0.5, True


def contributions(result: PidResult, denom_epsilon: float = DENOM_EPSILON):
    """Normalized unique-information shares ``(c1, c2, degenerate)``.

    When ``u1 + u2 <= denom_epsilon`` there is no unique information to split;
    the shares fall back to 0.5 / 0.5 and ``degenerate`` is True.
    """
    return _shares(result.unique_1, result.unique_2, denom_epsilon)


def decompose(p: JointDistribution, coupling: Coupling, denom_epsilon: float = DENOM_EPSILON) -> PidResult:
    """PID components of ``p`` given the solved minimum-synergy coupling.

    All four optima are attained at the same coupling, because the feasible
    set fixes I(X1;Y) and I(X2;Y); hence one solve gives
    ``U1 = I_Q(X1;Y|X2)``, ``U2 = I_Q(X2;Y|X1)``,
    ``S = I_p(X1,X2;Y) - I_Q(X1,X2;Y)`` and ``R = I_p(X1;Y) - U1``.
    """
    gap = marginals(p).max_difference(coupling.target)
    if gap > CONSISTENCY_TOL:
        raise InconsistentInputs(f"coupling was solved for other marginals (gap {gap:.3g})")
    return _from_profiles(info_profile(p), info_profile(coupling.q_star), denom_epsilon)


def decompose_joint(p: JointDistribution, q: JointDistribution, denom_epsilon: float = DENOM_EPSILON) -> PidResult:
    """Decompose ``p`` using an arbitrary coupling ``q`` that shares its pair marginals."""
    gap = marginals(p).deviation(q.mass)
    if gap > CONSISTENCY_TOL:
        raise InconsistentInputs(f"q violates the pair marginals of p by {gap:.3g}")
    return _from_profiles(info_profile(p), info_profile(q), denom_epsilon)


def _from_profiles(ip, iq, denom_epsilon) -> PidResult:
    u1 = iq.cmi_1
    u2 = iq.cmi_2
    s = ip.mi_joint - iq.mi_joint
    r = ip.mi_1 - u1
    cr, cu1, cu2, cs = _clamp("R", r), _clamp("U1", u1), _clamp("U2", u2), _clamp("S", s)
    c1, c2, degenerate = _shares(cu1, cu2, denom_epsilon)
    return PidResult(
        redundancy=cr,
        unique_1=cu1,
        unique_2=cu2,
        synergy=cs,
        total_mi=ip.mi_joint,
        c1=c1,
        c2=c2,
        degenerate_contributions=degenerate,
        raw_redundancy=r,
        raw_unique_1=u1,
        raw_unique_2=u2,
        raw_synergy=s,
    )


def cross_check(result: PidResult, p: JointDistribution, coupling: Coupling) -> CrossCheck:
    """Residuals of the identities a correct decomposition must satisfy."""
    ip = info_profile(p)
    sum_res = abs(sum(result.raw_components) - result.total_mi)
    path_res = abs(result.raw_redundancy - (ip.mi_2 - result.raw_unique_2))
    feas = coupling.target.deviation(coupling.q_star.mass)
    return CrossCheck(sum_res, path_res, feas)


def pid(p: JointDistribution, cfg=None, init="product") -> tuple[PidResult, Coupling]:
    """Solve and decompose in one call."""
    coupling = solve(p, cfg, init=init)
    return decompose(p, coupling), coupling
