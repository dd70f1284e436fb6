"""Brute-force grid minimizer of I_q(X1, X2; Y) over the marginal polytope.

Used only to certify the alternating solver on tiny supports. Each label
slice is parameterized as its independence coupling plus a combination of
elementary zero-marginal moves::

    B_ij = +e(i, j) - e(i, n-1) - e(m-1, j) + e(m-1, n-1)

so every grid point satisfies the pair-marginal constraints exactly and the
only thing left to check is nonnegativity. The objective is the exact
``I_q(X1, X2; Y)``; there is no auxiliary variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .dist import LN2, JointDistribution, MarginalPair, info_profile, marginals
from .errors import InfeasibleGrid, RefuseTooLarge
from .pid import PidResult, decompose_joint
from .solver import Coupling

DEFAULT_RESOLUTION = {0: 1, 1: 2001, 2: 201, 3: 41}
MAX_FREE_DIMS = 3
_PIN_WIDTH = 1e-14
_NEG_SLACK = 1e-15
# a grid point must beat the incumbent by this much; ties stay at the seeds
_IMPROVE = 1e-13


@dataclass(frozen=True)
class GridOracleConfig:
    """``resolution=None`` picks 2001 / 201 / 41 points per axis for 1 / 2 / 3 free dimensions."""

    resolution: int | None = None
    refine_rounds: int = 3

    def __post_init__(self):
        if self.resolution is not None and self.resolution < 3:
            raise ValueError("resolution must be >= 3")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be >= 0")

    def points_for(self, dims: int) -> int:
        return self.resolution if self.resolution is not None else DEFAULT_RESOLUTION[dims]


@dataclass(frozen=True, eq=False)
class OracleResult:
    q: JointDistribution
    objective_nats: float  # KL(q || qtilde(q)) = log|Y| - H_q(Y|X1,X2)
    mi_bits: float  # I_q(X1, X2; Y)
    free_dims: int
    history_bits: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class Certificate:
    passed: bool
    ipfp_mi_bits: float
    oracle_mi_bits: float
    gap_bits: float
    tol_bits: float
    ipfp_pid: PidResult
    oracle_pid: PidResult

    def component_gap(self) -> float:
        return max(abs(a - b) for a, b in zip(self.ipfp_pid.raw_components, self.oracle_pid.raw_components))


def free_dimension(marg: MarginalPair) -> int:
    """Affine dimension ``(m-1)(n-1)`` of each label's transportation polytope."""
    m, n, _ = marg.sizes.shape
    return (m - 1) * (n - 1)


def _moves(m: int, n: int) -> np.ndarray:
    """Elementary zero-marginal moves, shape (d, m, n)."""
    out = []
    for i in range(m - 1):
        for j in range(n - 1):
            b = np.zeros((m, n))
            b[i, j] = b[m - 1, n - 1] = 1.0
            b[i, n - 1] = b[m - 1, j] = -1.0
            out.append(b)
    return np.array(out).reshape(-1, m, n)


def _bounds(base: np.ndarray, moves: np.ndarray) -> np.ndarray:
    """Tight per-coordinate bounds of {t : base + sum_d t_d moves_d >= 0}."""
    d = moves.shape[0]
    a_ub = -moves.reshape(d, -1).T
    b_ub = base.ravel()
    box = np.empty((d, 2))
    for i in range(d):
        cost = np.zeros(d)
        for col, sign in ((0, 1.0), (1, -1.0)):
            cost[i] = sign
            res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * d, method="highs")
            if res.status != 0:
                raise InfeasibleGrid(f"bound LP failed: {res.message}")
            box[i, col] = res.x[i]
    return box


def _mi_bits(q: np.ndarray, h_y: float) -> np.ndarray:
    """I(X1,X2;Y) for a batch of joints shaped (N, m, n, k)."""
    flat = q.reshape(q.shape[0], -1)
    pair = q.sum(axis=3).reshape(q.shape[0], -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        h_all = -np.sum(np.where(flat > 0, flat * np.log2(flat), 0.0), axis=1)
        h_pair = -np.sum(np.where(pair > 0, pair * np.log2(pair), 0.0), axis=1)
    return h_y - (h_all - h_pair)


def grid_solve(p: JointDistribution, cfg: GridOracleConfig | None = None) -> OracleResult:
    cfg = cfg or GridOracleConfig()
    marg = marginals(p)
    m, n, k = p.shape
    if free_dimension(marg) > MAX_FREE_DIMS:
        raise RefuseTooLarge(
            f"{free_dimension(marg)} free dimensions per label; the oracle handles at most {MAX_FREE_DIMS}"
        )

    base = np.zeros((m, n, k))
    moves = _moves(m, n)
    dirs = []  # full-size move tensors for the non-pinned coordinates
    lo, hi = [], []
    p_coords = []
    for y in range(k):
        if marg.py[y] <= 0:
            continue
        base[:, :, y] = np.outer(marg.m1[:, y], marg.m2[:, y]) / marg.py[y]
        if moves.shape[0] == 0:
            continue
        box = _bounds(base[:, :, y], moves)
        for d in range(moves.shape[0]):
            i, j = divmod(d, n - 1)
            t_p = p.mass[i, j, y] - base[i, j, y]
            if box[d, 1] - box[d, 0] <= _PIN_WIDTH:
                base[:, :, y] += 0.5 * (box[d, 0] + box[d, 1]) * moves[d]
                continue
            full = np.zeros((m, n, k))
            full[:, :, y] = moves[d]
            dirs.append(full)
            lo.append(box[d, 0])
            hi.append(box[d, 1])
            p_coords.append(t_p)

    dims = len(dirs)
    if dims > MAX_FREE_DIMS:
        raise RefuseTooLarge(f"{dims} free dimensions across labels; at most {MAX_FREE_DIMS} supported")
    h_y = info_profile(p).h_y
    dirs = np.array(dirs).reshape(dims, m, n, k)
    lo, hi = np.array(lo), np.array(hi)

    def evaluate(points: np.ndarray):
        q = base[None] + np.tensordot(points, dirs, axes=(1, 0))
        ok = np.all(q.reshape(len(points), -1) >= -_NEG_SLACK, axis=1)
        q = np.maximum(q[ok], 0.0)
        return points[ok], q, _mi_bits(q, h_y)

    # seed candidates: the independence point and p itself are always feasible
    seeds = np.array([np.zeros(dims), np.array(p_coords)]).reshape(2, dims)
    pts, qs, vals = evaluate(seeds)
    if len(vals) == 0:
        raise InfeasibleGrid("neither the independence coupling nor p is feasible")
    best = int(np.argmin(vals))
    best_t, best_q, best_v = pts[best], qs[best], vals[best]
    history = []

    if dims > 0:
        npts = cfg.points_for(dims)
        center = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        for round_ in range(cfg.refine_rounds + 1):
            a = np.maximum(center - half, lo)
            b = np.minimum(center + half, hi)
            axes = [np.linspace(a[d], b[d], npts) for d in range(dims)]
            grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dims)
            pts, qs, vals = evaluate(grid)
            if len(vals):
                i = int(np.argmin(vals))
                if vals[i] < best_v - _IMPROVE:
                    best_t, best_q, best_v = pts[i], qs[i], vals[i]
            history.append(float(best_v))
            center = best_t
            half = half / 10.0
    else:
        history.append(float(best_v))

    q = JointDistribution(best_q / best_q.sum())
    mi = info_profile(q).mi_joint
    objective = float(np.log(k)) - (info_profile(q).h_y - mi) * LN2
    return OracleResult(q=q, objective_nats=objective, mi_bits=mi, free_dims=dims, history_bits=history)


def certify(
    p: JointDistribution,
    ipfp_result: Coupling,
    cfg: GridOracleConfig | None = None,
    tol_bits: float = 1e-3,
    oracle: OracleResult | None = None,
) -> Certificate:
    """Compare the alternating solver's I_Q(X1,X2;Y) against the grid optimum."""
    oracle = oracle or grid_solve(p, cfg)
    ipfp_mi = info_profile(ipfp_result.q_star).mi_joint
    gap = abs(ipfp_mi - oracle.mi_bits)
    return Certificate(
        passed=bool(gap < tol_bits),
        ipfp_mi_bits=ipfp_mi,
        oracle_mi_bits=oracle.mi_bits,
        gap_bits=gap,
        tol_bits=tol_bits,
        ipfp_pid=decompose_joint(p, ipfp_result.q_star),
        oracle_pid=decompose_joint(p, oracle.q),
    )
