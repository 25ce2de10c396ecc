"""Command-line front end: ``conicopf {solve,bench,export}``.

``solve`` runs chosen relaxations on explicit case files, ``bench``
sweeps a directory and renders a grouped comparison table, ``export``
writes SDPA files for external solvers. Cases are processed
independently: one failure never aborts the rest of a run. Exit status
is 0 when every row reached a terminal solver status (optimal or
infeasible), 1 otherwise, 2 for usage errors.

The solver backend is picked through the ``CONICOPF_BACKEND``
environment variable (``clarabel`` or ``cvxopt``; default clarabel).
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import data as bundled
from .backends import BackendUnavailable, default_backend
from .conic import SolveStatus
from .matpower import CaseFormatError, parse_case_file
from .network import NetworkModelError, build_network
from .relaxations import (
    NoVoltageAvailable,
    RelaxationKind,
    build_relaxation,
    recover_candidate,
)
from .reporting import KindResult, RelaxationReport, condition_of, render_table
from .sdpa import export_sdpa

ALL_KINDS = ("socr", "qcr", "tcr", "chr", "sdr")


@dataclass
class RunConfig:
    """Resolved options of one CLI invocation."""

    cases: list[Path]
    kinds: list[RelaxationKind]
    upper_bound: float | None = None
    upper_bound_table: Path | None = None
    fix_dispatchable_loads: bool = False
    tol: float = 1e-8
    out: Path | None = None
    fmt: str = "markdown"
    strict_export: bool = False
    out_dir: Path = field(default_factory=lambda: Path("."))


class UsageError(ValueError):
    pass


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "solve":
            return _cmd_solve(config)
        if args.command == "bench":
            # bench is solve over a directory, with the bundled reference
            # upper bounds as the default gap denominators
            return _cmd_solve(config, default_table=True)
        if args.command == "export":
            return _cmd_export(config)
    except BackendUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conicopf",
        description="Build and solve conic relaxations of AC optimal power flow.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_dir=False):
        p.add_argument("--case", action="append", default=[],
                       help="case file path or bundled case name (repeatable)")
        if with_dir:
            p.add_argument("--dir", help="directory of case files")
        p.add_argument("--kind", action="append", choices=ALL_KINDS, default=[],
                       help="relaxation kind (repeatable; default all)")
        p.add_argument("--tol", type=float, default=1e-8,
                       help="solver gap/feasibility tolerance (default 1e-8)")
        p.add_argument("--fix-dispatchable-loads", action="store_true",
                       help="reset Pmax of dispatchable loads (Pmax=0 > Pmin) to -5 MW")
        p.add_argument("--out", help="output path (default: stdout)")

    p_solve = sub.add_parser("solve", help="solve relaxations of explicit cases")
    common(p_solve)
    p_solve.add_argument("--ub", type=float,
                         help="upper bound in $/h (single case only)")
    p_solve.add_argument("--ub-table", help="CSV of reference upper bounds")
    p_solve.add_argument("--format", choices=("md", "markdown", "csv"),
                         default="md", dest="fmt")

    p_bench = sub.add_parser("bench", help="sweep a case directory, render a table")
    common(p_bench, with_dir=True)
    p_bench.add_argument("--ub-table",
                         help="CSV of reference upper bounds (default: bundled)")
    p_bench.add_argument("--format", choices=("md", "markdown", "csv"),
                         default="md", dest="fmt")

    p_export = sub.add_parser("export", help="write SDPA files per case and kind")
    common(p_export)
    p_export.add_argument("--strict", action="store_true",
                          help="refuse second-order-cone to PSD rewriting")
    return parser


def _resolve(args) -> RunConfig:
    cases: list[Path] = []
    for item in args.case:
        path = Path(item)
        if not path.exists():
            try:
                path = bundled.bundled_case(item)
            except FileNotFoundError:
                raise UsageError(f"case file not found: {item}")
        cases.append(path)
    if getattr(args, "dir", None):
        directory = Path(args.dir)
        if not directory.is_dir():
            raise UsageError(f"not a directory: {directory}")
        cases.extend(sorted(directory.glob("*.m")))
    if not cases:
        raise UsageError("no cases given (use --case or --dir)")

    kind_names = args.kind or list(ALL_KINDS)
    kinds = [RelaxationKind.from_name(k) for k in ALL_KINDS if k in kind_names]

    ub = getattr(args, "ub", None)
    if ub is not None and len(cases) != 1:
        raise UsageError("--ub applies to a single case; use --ub-table instead")

    ub_table = getattr(args, "ub_table", None)
    config = RunConfig(
        cases=sorted(cases),
        kinds=kinds,
        upper_bound=ub,
        upper_bound_table=Path(ub_table) if ub_table else None,
        fix_dispatchable_loads=args.fix_dispatchable_loads,
        tol=args.tol,
        out=Path(args.out) if args.out else None,
        fmt=getattr(args, "fmt", "markdown"),
        strict_export=getattr(args, "strict", False),
    )
    if args.command == "export":
        config.out_dir = Path(args.out) if args.out else Path(".")
    return config


def _upper_bound_for(config: RunConfig, case_path: Path,
                     table: dict[str, tuple[float, str]] | None) -> float | None:
    if config.upper_bound is not None:
        return config.upper_bound
    if table is not None:
        hit = table.get(bundled.case_key(case_path))
        if hit:
            return hit[0]
    return None


def _cmd_solve(config: RunConfig, default_table: bool = False) -> int:
    table = None
    if config.upper_bound_table is not None:
        table = bundled.load_upper_bounds(config.upper_bound_table)
    elif default_table and config.upper_bound is None:
        table = bundled.load_upper_bounds()

    backend = default_backend()
    reports: list[RelaxationReport] = []
    all_terminal = True

    for case_path in config.cases:
        key = bundled.case_key(case_path)
        report = RelaxationReport(
            case=key,
            condition=condition_of(key),
            upper_bound=_upper_bound_for(config, case_path, table),
        )
        reports.append(report)
        try:
            raw = parse_case_file(case_path)
            network = build_network(
                raw, fix_dispatchable_loads=config.fix_dispatchable_loads
            )
        except (CaseFormatError, NetworkModelError, OSError) as exc:
            for kind in config.kinds:
                report.results[kind] = KindResult(
                    status=SolveStatus.NUMERICAL_FAILURE, detail=f"input: {exc}"
                )
            all_terminal = False
            continue

        for kind in config.kinds:
            t0 = time.perf_counter()
            try:
                program = build_relaxation(network, kind)
            except Exception as exc:  # isolate per-row failures
                report.results[kind] = KindResult(
                    status=SolveStatus.NUMERICAL_FAILURE, detail=f"build: {exc}"
                )
                all_terminal = False
                continue
            build_s = time.perf_counter() - t0
            solution = backend.solve(program, tol=config.tol)
            result = KindResult(
                status=solution.status,
                lower_bound=solution.objective_value,
                build_seconds=build_s,
                solve_seconds=solution.solve_seconds,
                detail=solution.status_detail,
            )
            if solution.status is SolveStatus.OPTIMAL and kind is not RelaxationKind.SOCR:
                try:
                    result.rank_ratio = recover_candidate(
                        kind, solution, network
                    ).rank_ratio
                except (NoVoltageAvailable, KeyError):
                    pass
            if solution.status not in (SolveStatus.OPTIMAL, SolveStatus.INFEASIBLE):
                all_terminal = False
            report.results[kind] = result

    text = render_table(reports, fmt=config.fmt)
    if config.out:
        config.out.write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    return 0 if all_terminal else 1


def _cmd_export(config: RunConfig) -> int:
    config.out_dir.mkdir(parents=True, exist_ok=True)
    status = 0
    for case_path in config.cases:
        key = bundled.case_key(case_path)
        try:
            raw = parse_case_file(case_path)
            network = build_network(
                raw, fix_dispatchable_loads=config.fix_dispatchable_loads
            )
        except (CaseFormatError, NetworkModelError, OSError) as exc:
            print(f"error: {case_path}: {exc}", file=sys.stderr)
            status = 1
            continue
        for kind in config.kinds:
            target = config.out_dir / f"{key}__{kind.value}.dat-s"
            program = build_relaxation(network, kind)
            export_sdpa(program, target, strict=config.strict_export)
            print(f"wrote {target}")
    return status


if __name__ == "__main__":
    sys.exit(main())
