"""Alternating KL-projection solver for the minimum-synergy coupling.

Given an empirical joint ``p(x1, x2, y)`` the solver looks for the coupling
``Q`` that keeps both source-target marginals of ``p`` and has the largest
conditional entropy ``H_Q(Y | X1, X2)``. Written as a two-variable problem,

    min  KL(Q || Qt)   over Q in the marginal polytope of p,
                       and Qt of the form r(x1, x2) / |Y|,

it is solved by alternating the two exact minimizations:

* Q-step: for each label ``y`` the slice ``Q[:, :, y]`` is the I-projection of
  ``Qt[:, :, y]`` onto matrices with row sums ``p(x1, y)`` and column sums
  ``p(x2, y)``; computed by log-domain Sinkhorn scaling.
* Qt-step: ``Qt(x1, x2, y) = Q(x1, x2) / |Y|`` in closed form.

Every returned iterate is epsilon-floored and rescaled label by label so that
each slice carries exactly ``p(y)``.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._sinkhorn import sinkhorn_batch
from .dist import JointDistribution, MarginalPair, kl_divergence, marginals
from .errors import DegenerateMarginals, NonFiniteState, ShapeMismatch


class MonotonicityWarning(RuntimeWarning):
    """The recorded objective rose between outer iterations (inexact Q-steps)."""


class StopReason(str, enum.Enum):
    OBJECTIVE_PLATEAU = "objective_plateau"
    MARGINAL_FEASIBLE = "marginal_feasible"
    MAX_ITERS = "max_iters"


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters of the alternating solver.

    Defaults: at most 50 outer iterations, at most
    100 Sinkhorn sweeps per label, and 1e-8 stopping thresholds. A tolerance
    of 0 disables that stopping rule so the corresponding cap always binds.
    """

    max_outer: int = 50
    max_sinkhorn: int = 100
    tol_outer: float = 1e-8
    tol_sinkhorn: float = 1e-8
    epsilon_floor: float = 1e-12

    def __post_init__(self):
        if self.max_outer < 1 or self.max_sinkhorn < 1:
            raise ValueError("iteration caps must be >= 1")
        if not (self.tol_outer >= 0 and self.tol_sinkhorn >= 0):
            raise ValueError("tolerances must be >= 0")
        if not self.epsilon_floor > 0:
            raise ValueError("epsilon_floor must be > 0")

    def to_dict(self) -> dict:
        return {
            "max_outer": self.max_outer,
            "max_sinkhorn": self.max_sinkhorn,
            "tol_outer": self.tol_outer,
            "tol_sinkhorn": self.tol_sinkhorn,
            "epsilon_floor": self.epsilon_floor,
        }


@dataclass
class SinkhornState:
    """Log-domain scalings and targets for one label slice."""

    log_u: np.ndarray
    log_v: np.ndarray
    log_kernel: np.ndarray
    log_r: np.ndarray
    log_c: np.ndarray

    @classmethod
    def from_arrays(cls, kernel, r, c, epsilon_floor=1e-12, log_v=None) -> "SinkhornState":
        """Floor the kernel and targets at ``epsilon_floor`` and take logs.

        The floored targets are rescaled to a common total (the mass of ``r``)
        so row and column constraints stay compatible.
        """
        kernel = np.asarray(kernel, dtype=np.float64)
        if kernel.ndim != 2:
            raise ShapeMismatch("kernel must be 2-way")
        m, n = kernel.shape
        r = np.asarray(r, dtype=np.float64).reshape(m)
        c = np.asarray(c, dtype=np.float64).reshape(n)
        mass = r.sum()
        r = _floored_target(r, mass, epsilon_floor)
        c = _floored_target(c, mass, epsilon_floor)
        if log_v is None:
            log_v = np.zeros(n)
        return cls(
            log_u=np.zeros(m),
            log_v=np.array(log_v, dtype=np.float64),
            log_kernel=np.log(np.maximum(kernel, epsilon_floor)),
            log_r=np.log(r),
            log_c=np.log(c),
        )


@dataclass
class SolveTrace:
    objective_per_iter: list[float] = field(default_factory=list)
    marginal_err_per_iter: list[float] = field(default_factory=list)
    # deviation of the reference Qt from the marginal polytope at each Q-step
    kernel_gap_per_iter: list[float] = field(default_factory=list)
    sinkhorn_sweeps_per_iter: list[int] = field(default_factory=list)
    outer_iters_used: int = 0
    converged: bool = False
    stop_reason: StopReason = StopReason.MAX_ITERS
    warnings: list[str] = field(default_factory=list)

    @property
    def final_objective(self) -> float:
        return self.objective_per_iter[-1] if self.objective_per_iter else float("nan")

    @property
    def final_marginal_error(self) -> float:
        return self.marginal_err_per_iter[-1] if self.marginal_err_per_iter else float("nan")

    def monotone_violations(self, slack: float = 1e-10) -> int:
        f = np.asarray(self.objective_per_iter)
        if f.size < 2:
            return 0
        return int(np.count_nonzero(np.diff(f) > slack))

    def summary(self) -> dict:
        return {
            "outer_iters_used": self.outer_iters_used,
            "converged": self.converged,
            "stop_reason": self.stop_reason.value,
            "final_objective_nats": self.final_objective,
            "final_marginal_error": self.final_marginal_error,
            "total_sinkhorn_sweeps": int(sum(self.sinkhorn_sweeps_per_iter)),
            "monotone_violations": self.monotone_violations(),
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True, eq=False)
class Coupling:
    q_star: JointDistribution
    trace: SolveTrace
    target: MarginalPair
    config: SolverConfig


def _floored_target(t: np.ndarray, mass: float, eps: float) -> np.ndarray:
    t = np.maximum(t, eps)
    return t * (mass / t.sum())


def init_product(marg: MarginalPair, epsilon_floor: float = 1e-12) -> JointDistribution:
    """Label-wise independence coupling ``p(x1|y) p(x2|y) p(y)``, floored."""
    m1, m2, py = marg.m1, marg.m2, marg.py
    active = py > epsilon_floor
    if not np.any(active):
        raise DegenerateMarginals(f"every label has mass <= {epsilon_floor}")
    m, n, k = marg.sizes.shape
    q = np.full((m, n, k), epsilon_floor)
    for y in np.flatnonzero(active):
        s = np.maximum(np.outer(m1[:, y], m2[:, y]) / py[y], epsilon_floor)
        q[:, :, y] = s * (py[y] / s.sum())
    return JointDistribution(q / q.sum())


def init_uniform(marg: MarginalPair) -> JointDistribution:
    """Uniform starting point; infeasible, but its Qt is a valid positive kernel."""
    shape = marg.sizes.shape
    return JointDistribution(np.full(shape, 1.0 / np.prod(shape)))


def _qtilde(q: np.ndarray) -> np.ndarray:
    k = q.shape[2]
    pair = q.sum(axis=2, keepdims=True) / k
    return np.broadcast_to(pair, q.shape).copy()


def qtilde_update(q: JointDistribution) -> JointDistribution:
    """Closed-form Qt-step: spread the (x1, x2) marginal of ``q`` evenly over labels."""
    qt = _qtilde(q.mass)
    return JointDistribution(qt / qt.sum())


def sinkhorn_project_label(state: SinkhornState, cfg: SolverConfig):
    """Scale ``exp(log_kernel)`` to the row/column targets of ``state``.

    Returns ``(slice, sweeps)``. The input state is not modified. Iteration
    stops once the max-norm change of ``log_v`` drops below
    ``cfg.tol_sinkhorn`` or after ``cfg.max_sinkhorn`` sweeps.
    """
    log_a = np.ascontiguousarray(state.log_kernel[None, :, :])
    log_u = np.array(state.log_u[None, :], dtype=np.float64)
    log_v = np.array(state.log_v[None, :], dtype=np.float64)
    iters, _, finite = sinkhorn_batch(
        log_a,
        np.ascontiguousarray(state.log_r[None, :]),
        np.ascontiguousarray(state.log_c[None, :]),
        log_u,
        log_v,
        np.ones(1, dtype=np.bool_),
        cfg.max_sinkhorn,
        cfg.tol_sinkhorn,
    )
    if not finite:
        raise NonFiniteState("Sinkhorn scalings became non-finite")
    out = np.exp(state.log_kernel + log_u[0][:, None] + log_v[0][None, :])
    return out, int(iters[0])


def _q_step(qt: np.ndarray, marg: MarginalPair, cfg: SolverConfig, log_v: np.ndarray):
    eps = cfg.epsilon_floor
    m, n, k = qt.shape
    py = marg.py
    active = py > eps

    log_a = np.log(np.maximum(np.moveaxis(qt, 2, 0), eps))  # (k, m, n)
    r = np.maximum(marg.m1.T, eps)  # (k, m)
    c = np.maximum(marg.m2.T, eps)  # (k, n)
    r *= (py / r.sum(axis=1))[:, None]
    c *= (py / c.sum(axis=1))[:, None]
    r[~active] = 1.0
    c[~active] = 1.0
    log_u = np.zeros((k, m))
    log_v = np.array(log_v, dtype=np.float64)
    iters, _, finite = sinkhorn_batch(
        np.ascontiguousarray(log_a),
        np.log(r),
        np.log(c),
        log_u,
        log_v,
        active,
        cfg.max_sinkhorn,
        cfg.tol_sinkhorn,
    )
    if not finite:
        raise NonFiniteState("Sinkhorn scalings became non-finite; check epsilon_floor")

    slices = np.exp(log_a + log_u[:, :, None] + log_v[:, None, :])
    slices = np.maximum(slices, eps)
    slices *= (py / slices.sum(axis=(1, 2)))[:, None, None]
    slices[~active] = eps
    q = np.moveaxis(slices, 0, 2)
    q = q / q.sum()
    return q, log_v, iters


def q_step(qtilde: JointDistribution, marg: MarginalPair, cfg: SolverConfig) -> JointDistribution:
    """I-projection of ``qtilde`` onto the marginal polytope, one label at a time."""
    if qtilde.sizes != marg.sizes:
        raise ShapeMismatch(f"qtilde {qtilde.shape} vs marginals {marg.sizes.shape}")
    k, n = marg.sizes.k, marg.sizes.n
    q, _, _ = _q_step(qtilde.mass, marg, cfg, np.zeros((k, n)))
    return JointDistribution(q)


def objective(q, qtilde) -> float:
    """F(Q, Qt) = KL(Q || Qt) in nats."""
    return kl_divergence(q, qtilde)


def solve(p: JointDistribution, cfg: SolverConfig | None = None, init="product") -> Coupling:
    """Run the alternating solver on the marginals of ``p``.

    Parameters
    ----------
    p : JointDistribution
        Empirical joint; only its two source-target marginals are used.
    cfg : SolverConfig, optional
    init : {"product", "uniform"} or JointDistribution
        Starting coupling. The fixed point does not depend on it.

    Returns
    -------
    Coupling
        ``q_star`` with a trace of ``KL(Q(t+1) || Qt(t))`` per outer iteration.
        The loop stops when the relative objective change falls below
        ``tol_outer`` (``objective_plateau``), when the reference ``Qt`` already
        satisfies the marginal constraints to ``tol_outer``
        (``marginal_feasible``), or after ``max_outer`` iterations.
    """
    cfg = cfg or SolverConfig()
    marg = marginals(p)
    eps = cfg.epsilon_floor
    k, n = marg.sizes.k, marg.sizes.n

    if isinstance(init, JointDistribution):
        if init.sizes != p.sizes:
            raise ShapeMismatch("initial coupling has the wrong shape")
        q = init.mass.copy()
    elif init == "product":
        q = init_product(marg, eps).mass.copy()
    elif init == "uniform":
        q = init_uniform(marg).mass.copy()
    else:
        raise ValueError(f"unknown init {init!r}")

    trace = SolveTrace()
    dead = np.flatnonzero(marg.py <= eps)
    if dead.size:
        trace.warnings.append(
            f"labels {dead.tolist()} have p(y) <= {eps:g}; held at the floor"
        )
    if not np.any(marg.py > eps):
        raise DegenerateMarginals(f"every label has mass <= {eps}")

    log_v = np.zeros((k, n))
    for _ in range(cfg.max_outer):
        qt = _qtilde(q)
        gap = marg.deviation(qt)
        q_next, log_v, sweeps = _q_step(qt, marg, cfg, log_v)
        f = kl_divergence(q_next, qt)
        q = q_next

        trace.objective_per_iter.append(f)
        trace.marginal_err_per_iter.append(marg.deviation(q))
        trace.kernel_gap_per_iter.append(gap)
        trace.sinkhorn_sweeps_per_iter.append(int(sweeps.sum()))
        trace.outer_iters_used += 1

        if gap < cfg.tol_outer:
            trace.stop_reason = StopReason.MARGINAL_FEASIBLE
            trace.converged = True
            break
        f_obj = trace.objective_per_iter
        if len(f_obj) >= 2 and abs(f_obj[-1] - f_obj[-2]) / max(1.0, abs(f_obj[-2])) < cfg.tol_outer:
            trace.stop_reason = StopReason.OBJECTIVE_PLATEAU
            trace.converged = True
            break

    if np.any(sweeps[marg.py > eps] >= cfg.max_sinkhorn):
        trace.warnings.append("Sinkhorn hit max_sinkhorn on the final Q-step")
    if trace.monotone_violations():
        msg = f"objective increased on {trace.monotone_violations()} outer steps"
        trace.warnings.append(msg)
        warnings.warn(msg, MonotonicityWarning, stacklevel=2)

    return Coupling(q_star=JointDistribution(q), trace=trace, target=marg, config=cfg)
