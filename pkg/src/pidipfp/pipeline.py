"""End-to-end workflows: gate certification, fusion validation, embedding analysis, timing."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .discretize import DiscretizeConfig, as_embedding, discretize_triple
from .dist import from_counts
from .errors import RowCountMismatch
from .oracle import Certificate, GridOracleConfig, certify, grid_solve
from .pid import PidResult, decompose
from .reports import AnalysisReport
from .solver import Coupling, SolverConfig, solve
from .synth import RNG_ALGORITHM, STANDARD_RULES, FusionRule, GateKind, fusion_joint, gate_distribution

SMALL_SAMPLE = 10_000


@dataclass(frozen=True)
class GateOutcome:
    gate: GateKind
    pid: PidResult
    coupling: Coupling
    certificate: Certificate


def run_gate(g, cfg: SolverConfig | None = None, oracle_cfg: GridOracleConfig | None = None, tol_bits=1e-3) -> GateOutcome:
    g = GateKind(g)
    p = gate_distribution(g)
    coupling = solve(p, cfg)
    cert = certify(p, coupling, oracle=grid_solve(p, oracle_cfg), tol_bits=tol_bits)
    return GateOutcome(g, decompose(p, coupling), coupling, cert)


def run_gates(cfg=None, oracle_cfg=None, tol_bits=1e-3) -> list[GateOutcome]:
    return [run_gate(g, cfg, oracle_cfg, tol_bits) for g in GateKind]


@dataclass(frozen=True)
class FusionOutcome:
    rule: FusionRule
    pid: PidResult
    coupling: Coupling


def run_fusion(n=100_000, seed=0, bins=8, cfg=None, rules=STANDARD_RULES) -> list[FusionOutcome]:
    out = []
    for rule in rules:
        p = fusion_joint(rule, n, seed, bins)
        coupling = solve(p, cfg)
        out.append(FusionOutcome(rule, decompose(p, coupling), coupling))
    return out


def fusion_checks(outcomes: list[FusionOutcome], band: float = 0.1) -> dict[str, bool]:
    """Qualitative checks on the five standard rules.

    ``ordering``: the share of X2 grows with its weight in the rule.
    ``balanced_<rule>``: symmetric rules split unique information roughly evenly.
    """
    c2 = {o.rule.name: o.pid.c2 for o in outcomes}
    c1 = {o.rule.name: o.pid.c1 for o in outcomes}
    checks = {
        "ordering": bool(c2["only_second"] > c2["weighted_100"] > c2["weighted_10"] > c2["add"]),
    }
    for name in ("add", "mul"):
        checks[f"balanced_{name}"] = bool(abs(c1[name] - c2[name]) < band)
    return checks


def analyze_arrays(x1, x2, y, dcfg: DiscretizeConfig | None = None, cfg: SolverConfig | None = None):
    """Discretize three row-aligned embedding matrices and decompose.

    Returns ``(PidResult, Coupling, timing)`` where ``timing`` holds wall-clock
    seconds per stage.
    """
    dcfg = dcfg or DiscretizeConfig()
    cfg = cfg or SolverConfig()
    x1, x2, y = as_embedding(x1), as_embedding(x2), as_embedding(y)
    rows = {"x1": x1.shape[0], "x2": x2.shape[0], "y": y.shape[0]}
    if len(set(rows.values())) != 1:
        raise RowCountMismatch("row counts differ: " + ", ".join(f"{k}={v}" for k, v in rows.items()))
    timing = {}
    t0 = time.perf_counter()
    counts = discretize_triple(x1, x2, y, dcfg)
    timing["discretize_s"] = time.perf_counter() - t0
    p = from_counts(counts)
    t0 = time.perf_counter()
    coupling = solve(p, cfg)
    timing["solve_s"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    result = decompose(p, coupling)
    timing["decompose_s"] = time.perf_counter() - t0
    return result, coupling, timing


def build_report(result, coupling, timing, dcfg, cfg, provenance: dict | None = None) -> AnalysisReport:
    prov = {"tool_version": __version__, "rng": RNG_ALGORITHM}
    prov.update(provenance or {})
    return AnalysisReport(
        config={"solver": cfg.to_dict(), "discretize": dcfg.to_dict()},
        pid=result,
        trace=coupling.trace.summary(),
        provenance=prov,
        timing=timing,
    )


def random_joint(m, n, k, seed=0) -> "np.ndarray":
    """Strictly positive random joint used for timing runs."""
    rng = np.random.default_rng(seed)
    return from_counts(rng.dirichlet(np.ones(m * n * k)).reshape(m, n, k) + 1e-6)


def bench(sizes, repeats=5, outer_iters=30, seed=0):
    """Mean wall-clock seconds per outer iteration for each support size.

    Every Sinkhorn call is forced to use the full ``max_sinkhorn`` budget so
    the per-iteration cost is comparable across sizes.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    cfg = SolverConfig(max_outer=outer_iters, tol_outer=0.0, tol_sinkhorn=0.0)
    solve(random_joint(2, 2, 2, seed), cfg)  # compile outside the timed region
    rows = []
    for m, n, k in sizes:
        p = random_joint(m, n, k, seed)
        per_iter, sweeps = [], []
        for _ in range(repeats):
            t0 = time.perf_counter()
            c = solve(p, cfg)
            dt = time.perf_counter() - t0
            per_iter.append(dt / c.trace.outer_iters_used)
            sweeps.append(np.mean(c.trace.sinkhorn_sweeps_per_iter) / k)
        rows.append((m, n, k, float(np.mean(per_iter)), float(np.mean(sweeps))))
    return rows
