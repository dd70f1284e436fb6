"""Command-line front end.

Subcommands: ``gates``, ``fusion``, ``analyze``, ``layers``, ``bench``.
Exit codes: 0 when every enabled check passes, 1 on a check failure, 2 on a
usage or input error.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .discretize import DiscretizeConfig, Method
from .embio import file_digest, read_embedding
from .errors import IncompleteTriple, PidError
from .oracle import GridOracleConfig
from .pipeline import SMALL_SAMPLE, analyze_arrays, bench, build_report, fusion_checks, run_fusion, run_gates
from .reports import (
    BENCH_COLUMNS,
    FUSION_COLUMNS,
    GATES_COLUMNS,
    SWEEP_COLUMNS,
    LayerwiseReport,
    csv_text,
    dumps,
    percentages,
    write_text,
)
from .solver import SolverConfig

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2
ROLES = ("x1", "x2", "y")
DEFAULT_PATTERN = "layer{layer}_{role}.csv"


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"pidipfp: {msg}", file=sys.stderr)


def _solver_config(args) -> SolverConfig:
    kw = {}
    if args.solver_max_outer is not None:
        kw["max_outer"] = args.solver_max_outer
    if args.solver_max_sinkhorn is not None:
        kw["max_sinkhorn"] = args.solver_max_sinkhorn
    if args.solver_tol is not None:
        kw["tol_outer"] = args.solver_tol
        kw["tol_sinkhorn"] = args.solver_tol
    try:
        return SolverConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _clusters(text: str) -> tuple[int, int, int]:
    try:
        k = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected k1,k2,ky, got {text!r}") from None
    if len(k) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated counts, got {text!r}")
    return k


def _sizes(text: str) -> list[tuple[int, int, int]]:
    out = []
    for item in text.split(";") if ";" in text else text.split():
        parts = item.lower().replace("x", ",").split(",")
        try:
            m, n, k = (int(v) for v in parts)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad size {item!r}; use MxNxK, separated by ';'") from None
        if min(m, n, k) < 2:
            raise argparse.ArgumentTypeError(f"size {item!r}: every dimension must be >= 2")
        out.append((m, n, k))
    if not out:
        raise argparse.ArgumentTypeError("no sizes given")
    return out


def _discretize_config(args) -> DiscretizeConfig:
    k1, k2, ky = args.clusters
    try:
        return DiscretizeConfig(k1=k1, k2=k2, ky=ky, method=Method(args.method), seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_gates(args) -> int:
    cfg = _solver_config(args)
    out = Path(args.out)
    outcomes = run_gates(cfg, GridOracleConfig(), tol_bits=args.tol_bits)
    rows = []
    failed = []
    for o in outcomes:
        c = o.certificate
        r = o.pid
        rows.append((o.gate.value, r.redundancy, r.unique_1, r.unique_2, r.synergy, c.gap_bits))
        report = {
            "schema_version": 1,
            "gate": o.gate.value,
            "config": {"solver": cfg.to_dict(), "tol_bits": args.tol_bits},
            "pid": r.to_dict(),
            "oracle_pid": c.oracle_pid.to_dict(),
            "certificate": {
                "passed": c.passed,
                "ipfp_mi_bits": c.ipfp_mi_bits,
                "oracle_mi_bits": c.oracle_mi_bits,
                "gap_bits": c.gap_bits,
                "tol_bits": c.tol_bits,
            },
            "trace": o.coupling.trace.summary(),
            "provenance": {"tool_version": __version__},
        }
        write_text(out / f"gate_{o.gate.value}.json", dumps(report))
        if not c.passed:
            failed.append(o)
    write_text(out / "gates.csv", csv_text(GATES_COLUMNS, rows))
    for o in failed:
        c = o.certificate
        _err(
            f"check failed: certify[{o.gate.value}] gap {c.gap_bits:.3e} bits >= tol {c.tol_bits:g} "
            f"(stop_reason={o.coupling.trace.stop_reason.value})"
        )
    return EXIT_CHECK if failed else EXIT_OK


def cmd_fusion(args) -> int:
    if args.n < 100:
        raise UsageError(f"--n must be >= 100, got {args.n}")
    cfg = _solver_config(args)
    out = Path(args.out)
    outcomes = run_fusion(n=args.n, seed=args.seed, bins=args.bins, cfg=cfg)
    checks = fusion_checks(outcomes)
    small = args.n < SMALL_SAMPLE
    rows = [(o.rule.name, o.pid.c1, o.pid.c2, o.pid.degenerate_contributions) for o in outcomes]
    write_text(out / "fusion.csv", csv_text(FUSION_COLUMNS, rows))
    report = {
        "schema_version": 1,
        "config": {"solver": cfg.to_dict(), "n": args.n, "seed": args.seed, "bins": args.bins},
        "small_sample": small,
        "checks": checks,
        "enabled_checks": ["ordering"] + (["balanced_add", "balanced_mul"] if args.check_balance else []),
        "rules": {o.rule.name: {"pid": o.pid.to_dict(), "trace": o.coupling.trace.summary()} for o in outcomes},
        "provenance": {"tool_version": __version__},
    }
    write_text(out / "fusion.json", dumps(report))
    if small:
        _err(f"warning: n={args.n} < {SMALL_SAMPLE}; plug-in estimates are strongly biased")
    failed = [name for name in report["enabled_checks"] if not checks[name]]
    for name in failed:
        _err(f"check failed: fusion[{name}]")
    return EXIT_CHECK if failed else EXIT_OK


def _analyze_files(paths: dict[str, Path], dcfg, cfg):
    arrays = {}
    for role in ROLES:
        if not paths[role].is_file():
            raise IncompleteTriple(f"missing input file {paths[role]}")
        arrays[role] = read_embedding(paths[role])
    result, coupling, timing = analyze_arrays(arrays["x1"], arrays["x2"], arrays["y"], dcfg, cfg)
    provenance = {
        "inputs": {role: {"file": paths[role].name, "digest": file_digest(paths[role])} for role in ROLES},
        "rows": int(arrays["x1"].shape[0]),
    }
    return build_report(result, coupling, timing, dcfg, cfg, provenance)


def cmd_analyze(args) -> int:
    cfg = _solver_config(args)
    dcfg = _discretize_config(args)
    paths = {"x1": Path(args.x1), "x2": Path(args.x2), "y": Path(args.y)}
    out = Path(args.out)
    report = _analyze_files(paths, dcfg, cfg)
    write_text(out / "analysis.json", report.to_json())
    if args.sweep_clusters:
        rows = []
        for k in args.sweep_clusters:
            r = _analyze_files(paths, replace(dcfg, k1=k[0], k2=k[1], ky=k[2]), cfg).pid
            rows.append((*k, r.redundancy, r.unique_1, r.unique_2, r.synergy, r.c1, r.c2))
        write_text(out / "sweep.csv", csv_text(SWEEP_COLUMNS, rows))
    pct = percentages(report.pid.c1)
    print(f"C1={pct['c1']:.2f}% C2={pct['c2']:.2f}% stop_reason={report.trace['stop_reason']}")
    return EXIT_OK


def pattern_regex(pattern: str) -> re.Pattern:
    if "{layer}" not in pattern or "{role}" not in pattern:
        raise UsageError("--pattern must contain {layer} and {role}")
    rx = re.escape(pattern).replace(r"\{layer\}", r"(?P<layer>\d+)").replace(r"\{role\}", r"(?P<role>x1|x2|y)")
    return re.compile(rx + r"\Z")


def find_layers(directory: Path, pattern: str) -> list[tuple[int, dict[str, Path]]]:
    """Group files in ``directory`` into complete per-layer triples, sorted by layer."""
    if not directory.is_dir():
        raise IncompleteTriple(f"layer directory {directory} does not exist")
    rx = pattern_regex(pattern)
    found: dict[int, dict[str, Path]] = {}
    tags: dict[int, str] = {}
    for f in sorted(directory.iterdir()):
        m = rx.match(f.name)
        if m:
            idx = int(m["layer"])
            found.setdefault(idx, {})[m["role"]] = f
            tags.setdefault(idx, m["layer"])
    if not found:
        example = pattern.format(layer="00", role="x1")
        raise IncompleteTriple(f"no files matching {pattern!r} in {directory} (expected e.g. {example})")
    for idx, roles in found.items():
        for role in ROLES:
            if role not in roles:
                raise IncompleteTriple(f"layer {idx}: missing {directory / pattern.format(layer=tags[idx], role=role)}")
    return sorted(found.items())


def cmd_layers(args) -> int:
    cfg = _solver_config(args)
    dcfg = _discretize_config(args)
    out = Path(args.out)
    layers, reports = [], []
    for idx, paths in find_layers(Path(args.dir), args.pattern):
        rep = _analyze_files(paths, dcfg, cfg)
        rep.provenance["layer"] = idx
        write_text(out / f"layer{idx:02d}.json", rep.to_json())
        layers.append((idx, rep.pid))
        reports.append(rep)
    write_text(out / "layers.csv", LayerwiseReport(layers, reports).to_csv())
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.repeats < 1:
        raise UsageError(f"--repeats must be >= 1, got {args.repeats}")
    rows = bench(args.sizes, repeats=args.repeats, seed=args.seed)
    text = csv_text(BENCH_COLUMNS, rows)
    write_text(Path(args.out) / "bench.csv", text)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory (default: current)")
    common.add_argument("--seed", type=int, default=0, help="top-level seed for all randomness")
    common.add_argument("--solver-max-outer", type=int, default=None)
    common.add_argument("--solver-max-sinkhorn", type=int, default=None)
    common.add_argument("--solver-tol", type=float, default=None, help="outer and Sinkhorn tolerance")

    disc = argparse.ArgumentParser(add_help=False)
    disc.add_argument("--clusters", type=_clusters, default=(20, 20, 10), help="k1,k2,ky (default 20,20,10)")
    disc.add_argument("--method", choices=[m.value for m in Method], default="kmeans")

    ap = argparse.ArgumentParser(prog="pidipfp", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gates", parents=[common], help="certify the five logic gates against the grid oracle")
    p.add_argument("--tol-bits", type=float, default=1e-3)
    p.set_defaults(func=cmd_gates)

    p = sub.add_parser("fusion", parents=[common], help="contribution scores on Gaussian fusion rules")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--bins", type=int, default=8)
    p.add_argument("--check-balance", action="store_true", help="also require |c1-c2| < 0.1 for add and mul")
    p.set_defaults(func=cmd_fusion)

    p = sub.add_parser("analyze", parents=[common, disc], help="decompose three embedding files")
    p.add_argument("--x1", required=True)
    p.add_argument("--x2", required=True)
    p.add_argument("--y", required=True)
    p.add_argument(
        "--sweep-clusters",
        type=lambda t: [_clusters(v) for v in t.split(";")],
        default=None,
        help="extra k1,k2,ky triples separated by ';' for a sensitivity table (sweep.csv)",
    )
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("layers", parents=[common, disc], help="decompose every layer triple in a directory")
    p.add_argument("--dir", required=True)
    p.add_argument("--pattern", default=DEFAULT_PATTERN)
    p.set_defaults(func=cmd_layers)

    p = sub.add_parser("bench", parents=[common], help="time one outer iteration across support sizes")
    p.add_argument("--sizes", type=_sizes, default=_sizes("8x8x8;16x16x16"), help="e.g. '8x8x8;16x16x16'")
    p.add_argument("--repeats", type=int, default=5)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        _err(f"usage error: {exc}")
    except (PidError, OSError) as exc:
        _err(f"{type(exc).__name__}: {exc}")
    return EXIT_USAGE
