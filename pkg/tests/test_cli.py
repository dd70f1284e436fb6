import json
from pathlib import Path

import numpy as np
import pytest

from pidipfp.cli import main
from pidipfp.discretize import DiscretizeConfig, discretize_triple
from pidipfp.dist import from_counts
from pidipfp.embio import write_embedding
from pidipfp.oracle import certify
from pidipfp.solver import solve
from pidipfp.synth import embedding_triple

GOLDEN = Path(__file__).parent / "golden"


def header(path):
    return Path(path).read_text(encoding="utf-8").splitlines(keepends=True)[0]


def golden(name):
    return (GOLDEN / name).read_text(encoding="utf-8")


def write_triple(directory, stem, arrays):
    paths = {}
    for role, a in zip(("x1", "x2", "y"), arrays):
        paths[role] = directory / stem.format(role=role)
        write_embedding(paths[role], a)
    return paths


def analyze_argv(paths, out, *extra):
    return ["analyze", "--x1", str(paths["x1"]), "--x2", str(paths["x2"]), "--y", str(paths["y"]), "--out", str(out), *extra]


def test_gates_writes_reports(tmp_path):
    assert main(["gates", "--out", str(tmp_path)]) == 0
    assert sorted(p.name for p in tmp_path.glob("gate_*.json")) == [
        f"gate_{g}.json" for g in sorted(["and", "xor", "unique1", "unique2", "redundancy"])
    ]
    assert header(tmp_path / "gates.csv") == golden("gates.csv")
    assert len((tmp_path / "gates.csv").read_text().splitlines()) == 6


def test_gates_tolerance_below_oracle_resolution(tmp_path, capsys):
    assert main(["gates", "--out", str(tmp_path), "--tol-bits", "1e-9"]) == 1
    assert "certify[and]" in capsys.readouterr().err


def test_gates_truncated_solver(tmp_path, capsys):
    assert main(["gates", "--out", str(tmp_path), "--solver-max-outer", "1"]) == 1
    rep = json.loads((tmp_path / "gate_and.json").read_text())
    assert rep["trace"]["stop_reason"] == "max_iters"
    assert not rep["certificate"]["passed"]
    assert "stop_reason=max_iters" in capsys.readouterr().err


def test_fusion_acceptance_run(tmp_path):
    assert main(["fusion", "--n", "100000", "--seed", "7", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "fusion.csv").read_text()
    assert header(tmp_path / "fusion.csv") == golden("fusion.csv")
    rows = [line.split(",") for line in text.splitlines()[1:]]
    assert [r[0] for r in rows] == ["add", "mul", "weighted_10", "weighted_100", "only_second"]
    for r in rows:
        assert float(r[1]) + float(r[2]) == pytest.approx(1.0, abs=1e-12)
    assert float(rows[-1][2]) > 0.95
    rep = json.loads((tmp_path / "fusion.json").read_text())
    assert rep["checks"]["ordering"] and not rep["small_sample"]


def test_fusion_small_sample_flag(tmp_path, capsys):
    code = main(["fusion", "--n", "100", "--out", str(tmp_path)])
    assert code in (0, 1)
    rep = json.loads((tmp_path / "fusion.json").read_text())
    assert rep["small_sample"] is True
    assert "n=100" in capsys.readouterr().err


def test_fusion_n_below_minimum(tmp_path):
    assert main(["fusion", "--n", "99", "--out", str(tmp_path)]) == 2


def test_analyze_contract(tmp_path):
    paths = write_triple(tmp_path, "{role}.csv", embedding_triple(400, seed=1, target="both"))
    out = tmp_path / "out"
    assert main(analyze_argv(paths, out, "--clusters", "6,6,5", "--seed", "3")) == 0
    rep = json.loads((out / "analysis.json").read_text())
    assert rep["schema_version"] == 1
    assert rep["pid"]["c1"] + rep["pid"]["c2"] == pytest.approx(1.0)
    assert rep["contributions_percent"]["c1"] + rep["contributions_percent"]["c2"] == pytest.approx(100.0)
    assert rep["config"]["discretize"]["k1"] == 6 and rep["config"]["discretize"]["seed"] == 3
    assert set(rep["provenance"]["inputs"]) == {"x1", "x2", "y"}
    assert rep["provenance"]["inputs"]["x1"]["digest"].startswith("sha256:")
    assert {"discretize_s", "solve_s", "decompose_s"} <= set(rep["timing"])
    assert {"outer_iters_used", "stop_reason", "final_objective_nats", "final_marginal_error"} <= set(rep["trace"])


def test_analyze_jsonl_inputs(tmp_path):
    paths = write_triple(tmp_path, "{role}.jsonl", embedding_triple(200, seed=2, target="x2"))
    assert main(analyze_argv(paths, tmp_path, "--clusters", "4,4,4")) == 0


def test_analyze_is_deterministic(tmp_path):
    paths = write_triple(tmp_path, "{role}.csv", embedding_triple(300, seed=4, target="both"))
    reps = []
    for name in ("a", "b"):
        assert main(analyze_argv(paths, tmp_path / name, "--clusters", "5,5,4")) == 0
        d = json.loads((tmp_path / name / "analysis.json").read_text())
        d.pop("timing")
        reps.append(json.dumps(d, sort_keys=True))
    assert reps[0] == reps[1]


def test_analyze_row_count_mismatch(tmp_path, capsys):
    x1, x2, y = embedding_triple(100, seed=0)
    paths = write_triple(tmp_path, "{role}.csv", (x1, x2, y[:99]))
    assert main(analyze_argv(paths, tmp_path)) == 2
    err = capsys.readouterr().err
    assert "RowCountMismatch" in err and "x1=100" in err and "y=99" in err


def test_analyze_bad_file(tmp_path, capsys):
    paths = write_triple(tmp_path, "{role}.csv", embedding_triple(50, seed=0))
    paths["x2"].write_text("dim=2\n1,2\n1,2,3\n")
    assert main(analyze_argv(paths, tmp_path)) == 2
    assert "x2.csv:3:" in capsys.readouterr().err


def test_analyze_copy_of_x1_small_support(tmp_path):
    x1, x2, _ = embedding_triple(500, dim=3, seed=5, centers=2)
    paths = write_triple(tmp_path, "{role}.csv", (x1, x2, x1))
    assert main(analyze_argv(paths, tmp_path, "--clusters", "2,2,2")) == 0
    rep = json.loads((tmp_path / "analysis.json").read_text())
    assert rep["pid"]["c1"] > 0.9
    # the 2x2x2 joint is small enough for the grid oracle
    cfg = DiscretizeConfig(k1=2, k2=2, ky=2)
    p = from_counts(discretize_triple(x1, x2, x1, cfg))
    assert certify(p, solve(p)).passed


def test_analyze_cluster_sweep(tmp_path):
    paths = write_triple(tmp_path, "{role}.csv", embedding_triple(300, seed=6))
    assert main(analyze_argv(paths, tmp_path, "--sweep-clusters", "3,3,3;4,4,2")) == 0
    assert header(tmp_path / "sweep.csv") == golden("sweep.csv")
    assert len((tmp_path / "sweep.csv").read_text().splitlines()) == 3


def test_layers_scenario(tmp_path):
    d = tmp_path / "dump"
    d.mkdir()
    for i, target in enumerate(["x1", "both", "x2"]):
        write_triple(d, f"layer{i:02d}_{{role}}.csv", embedding_triple(600, seed=i, target=target))
    out = tmp_path / "out"
    assert main(["layers", "--dir", str(d), "--out", str(out), "--clusters", "6,6,6"]) == 0
    assert header(out / "layers.csv") == golden("layers.csv")
    rows = [line.split(",") for line in (out / "layers.csv").read_text().splitlines()[1:]]
    assert [int(r[0]) for r in rows] == [0, 1, 2]
    c1 = [float(r[5]) for r in rows]
    assert c1[0] > c1[1] > c1[2]
    assert (out / "layer01.json").exists()


def test_layers_single_layer(tmp_path):
    write_triple(tmp_path, "layer07_{role}.csv", embedding_triple(200, seed=0))
    assert main(["layers", "--dir", str(tmp_path), "--out", str(tmp_path), "--clusters", "3,3,3"]) == 0
    lines = (tmp_path / "layers.csv").read_text().splitlines()
    assert len(lines) == 2 and lines[1].startswith("7,")


def test_layers_custom_pattern(tmp_path):
    write_triple(tmp_path, "L3-{role}.jsonl", embedding_triple(200, seed=0))
    argv = ["layers", "--dir", str(tmp_path), "--out", str(tmp_path), "--pattern", "L{layer}-{role}.jsonl"]
    assert main(argv + ["--clusters", "3,3,3"]) == 0


def test_layers_empty_dir(tmp_path, capsys):
    assert main(["layers", "--dir", str(tmp_path)]) == 2
    assert "IncompleteTriple" in capsys.readouterr().err


def test_layers_missing_member(tmp_path, capsys):
    paths = write_triple(tmp_path, "layer00_{role}.csv", embedding_triple(50, seed=0))
    paths["x2"].unlink()
    assert main(["layers", "--dir", str(tmp_path)]) == 2
    assert "layer00_x2.csv" in capsys.readouterr().err


def test_bench(tmp_path, capsys):
    assert main(["bench", "--sizes", "4x4x4", "--repeats", "1", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "bench.csv").read_text().splitlines()
    assert lines[0] + "\n" == golden("bench.csv")
    assert len(lines) == 2
    assert capsys.readouterr().out.startswith("m,n,k")


def test_bench_repeats_zero(tmp_path):
    assert main(["bench", "--repeats", "0", "--out", str(tmp_path)]) == 2


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nope"],
        ["analyze", "--x1", "a"],
        ["bench", "--sizes", "1x2x3"],
        ["gates", "--solver-max-outer", "0"],
        ["analyze", "--x1", "a", "--x2", "b", "--y", "c", "--clusters", "1,2"],
    ],
)
def test_usage_errors(tmp_path, argv, capsys):
    if argv and argv[0] == "gates":
        argv = argv + ["--out", str(tmp_path)]
    assert main(argv) == 2


def test_missing_input_file(tmp_path, capsys):
    assert main(["analyze", "--x1", "a.csv", "--x2", "b.csv", "--y", "c.csv", "--out", str(tmp_path)]) == 2
    assert "a.csv" in capsys.readouterr().err
