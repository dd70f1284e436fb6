import numpy as np
import pytest

from pidipfp.dist import from_counts, info_profile, marginals
from pidipfp.errors import RefuseTooLarge
from pidipfp.oracle import GridOracleConfig, certify, free_dimension, grid_solve
from pidipfp.solver import SolverConfig, solve
from pidipfp.synth import GateKind, gate_distribution

from conftest import random_joint


def test_free_dimension_examples(rng):
    assert free_dimension(marginals(random_joint(rng, (2, 2, 2)))) == 1
    assert free_dimension(marginals(random_joint(rng, (3, 3, 2)))) == 4
    assert free_dimension(marginals(random_joint(rng, (2, 5, 3)))) == 4


def test_grid_xor():
    res = grid_solve(gate_distribution("xor"))
    assert res.mi_bits == pytest.approx(0.0, abs=1e-9)
    assert np.allclose(res.q.mass, 0.125, atol=1e-9)


def test_grid_and():
    res = grid_solve(gate_distribution("and"))
    assert res.mi_bits == pytest.approx(0.311278, abs=1e-6)


def test_grid_unique1_singleton():
    p = gate_distribution("unique1")
    res = grid_solve(p)
    assert res.free_dims == 0
    assert res.mi_bits == pytest.approx(1.0, abs=1e-12)


def test_refuses_large_supports(rng):
    with pytest.raises(RefuseTooLarge):
        grid_solve(random_joint(rng, (3, 3, 2)))
    with pytest.raises(RefuseTooLarge):
        # 1 free dim per label but 4 labels
        grid_solve(random_joint(rng, (2, 2, 4)))


def test_oracle_feasibility_and_refinement(rng):
    for _ in range(5):
        p = random_joint(rng, (2, 2, 2))
        res = grid_solve(p)
        assert marginals(p).deviation(res.q.mass) < 1e-12
        h = res.history_bits
        assert all(b <= a for a, b in zip(h, h[1:]))


def test_oracle_beats_or_ties_ipfp(rng):
    for _ in range(5):
        p = random_joint(rng, (2, 2, 3))
        try:
            res = grid_solve(p)
        except RefuseTooLarge:
            continue
        c = solve(p)
        assert res.mi_bits <= info_profile(c.q_star).mi_joint + 1e-3


@pytest.mark.parametrize("gate", list(GateKind))
def test_certify_gates(gate):
    p = gate_distribution(gate)
    cert = certify(p, solve(p))
    assert cert.passed
    assert cert.component_gap() < 1e-3


def test_certify_random_2x2x2(rng):
    # 50 outer iterations leave a few of these short of convergence
    cfg = SolverConfig(max_outer=1000)
    passed = 0
    for _ in range(20):
        p = random_joint(rng, (2, 2, 2))
        passed += certify(p, solve(p, cfg)).passed
    assert passed == 20


def test_certify_negative_control():
    p = gate_distribution("and")
    assert not certify(p, solve(p, SolverConfig(max_outer=1))).passed


def test_config_validation():
    with pytest.raises(ValueError):
        GridOracleConfig(resolution=2)
    assert GridOracleConfig().points_for(2) == 201
    assert GridOracleConfig(resolution=11).points_for(3) == 11


def test_degenerate_label_skipped():
    c = np.zeros((2, 2, 3))
    c[:, :, :2] = [[1, 2], [3, 4]], [[2, 1], [1, 1]]
    res = grid_solve(from_counts(c))
    assert res.free_dims == 2
