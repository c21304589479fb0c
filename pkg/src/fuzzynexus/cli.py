"""Command-line front door: parse an instance, run one cell or a sweep, report.

Exit codes: 0 success; 2 instance parse or option validation failure; 3
solver limit in single mode; 64 unknown flag or malformed command line.
In csv mode stdout carries nothing but the report, so output piped to a
file or another tool stays machine clean; all diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from fuzzynexus import model
from fuzzynexus.fuzzy import MeasureKind
from fuzzynexus.instance_io import InstanceFormatError, demo_instance_path, load_instance
from fuzzynexus.model import NexusInstance, UncertaintyPlan
from fuzzynexus.solver import SolveStatus, SolverConfig, to_lp_text
from fuzzynexus.sweep import (
    DEFAULT_ALPHAS,
    DEFAULT_KINDS,
    ScenarioReport,
    SweepSpec,
    emit_plot_data,
    emit_report,
    run_sweep,
)

USAGE_EXIT = 64
CONFIG_EXIT = 2
SOLVER_LIMIT_EXIT = 3


class CliError(Exception):
    """Option or instance validation problem; maps to exit code 2."""


@dataclass
class RunConfig:
    """Validated command-line request."""

    instance_path: Path
    mode: str
    spec: SweepSpec
    out_path: str
    format: str
    solver: SolverConfig
    dump_lp: Path | None


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # unknown flag or missing value
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="fuzzynexus",
        description=(
            "Fuzzy chance-constrained energy-water nexus planning: compile an "
            "instance under possibility/necessity/credibility measures, solve, "
            "and report costs and PI gap indices."
        ),
        epilog=(
            "In sweep mode with a file --out, an alpha-versus-cost plot-data "
            "file is written next to the report as <out>.plot."
        ),
        add_help=True,
    )
    parser.add_argument(
        "--instance", metavar="PATH",
        help="instance file to plan; the literal name demo selects the bundled week",
    )
    parser.add_argument("--mode", choices=("single", "sweep"), default="sweep")
    parser.add_argument("--kind", metavar="poss|nece|cred", help="measure kind (single mode)")
    parser.add_argument("--alpha", metavar="F", help="confidence level in [0,1] (single mode)")
    parser.add_argument("--kinds", metavar="LIST", help="comma-separated measure kinds (sweep mode)")
    parser.add_argument("--alphas", metavar="F,F,...", help="comma-separated confidence levels (sweep mode)")
    parser.add_argument("--out", metavar="PATH", default="-", help="report destination; - for stdout")
    parser.add_argument("--format", choices=("csv", "text"), default="csv")
    parser.add_argument("--feas-tol", metavar="F", help="solver feasibility tolerance")
    parser.add_argument("--gap", metavar="F", help="branch-and-bound relative gap")
    parser.add_argument("--dump-lp", metavar="PATH", help="write the compiled problem in LP text form")
    return parser


def _parse_float(text: str, flag: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise CliError(f"{flag}: expected a number, got {text!r}") from None


def _build_config(args: argparse.Namespace) -> RunConfig:
    if not args.instance:
        raise CliError("--instance is required")

    if args.mode == "single":
        if args.kind is None:
            raise CliError("--kind is required in single mode")
        if args.alpha is None:
            raise CliError("--alpha is required in single mode")
        if args.kinds or args.alphas:
            raise CliError("--kinds/--alphas belong to sweep mode; use --kind/--alpha")
        try:
            kind = MeasureKind.parse(args.kind)
        except ValueError as exc:
            raise CliError(f"--kind: {exc}") from None
        alpha = _parse_float(args.alpha, "--alpha")
        try:
            spec = SweepSpec(kinds=(kind,), alphas=(alpha,))
        except ValueError as exc:
            raise CliError(f"--alpha: {exc}") from None
    else:
        if args.kind or args.alpha:
            raise CliError("--kind/--alpha belong to single mode; use --kinds/--alphas")
        kinds = DEFAULT_KINDS
        if args.kinds:
            try:
                kinds = tuple(MeasureKind.parse(k) for k in args.kinds.split(","))
            except ValueError as exc:
                raise CliError(f"--kinds: {exc}") from None
        alphas = DEFAULT_ALPHAS
        if args.alphas:
            alphas = tuple(_parse_float(a, "--alphas") for a in args.alphas.split(","))
        try:
            spec = SweepSpec(kinds=kinds, alphas=alphas)
        except ValueError as exc:
            raise CliError(str(exc)) from None

    solver_kwargs = {}
    if args.feas_tol is not None:
        solver_kwargs["feasibility_tol"] = _parse_float(args.feas_tol, "--feas-tol")
    if args.gap is not None:
        solver_kwargs["mip_gap"] = _parse_float(args.gap, "--gap")
    try:
        solver = SolverConfig(**solver_kwargs)
    except ValueError as exc:
        raise CliError(str(exc)) from None

    return RunConfig(
        instance_path=Path(args.instance),
        mode=args.mode,
        spec=spec,
        out_path=args.out,
        format=args.format,
        solver=solver,
        dump_lp=Path(args.dump_lp) if args.dump_lp else None,
    )


def _dump_problems(cfg: RunConfig, instance: NexusInstance) -> None:
    cells = [(k, a) for k in cfg.spec.kinds for a in cfg.spec.alphas]
    for kind, alpha in cells:
        lp = model.compile(instance, UncertaintyPlan(kind, alpha))
        if len(cells) == 1:
            path = cfg.dump_lp
        else:
            path = cfg.dump_lp.with_name(
                f"{cfg.dump_lp.stem}-{kind.value}-a{alpha:g}{cfg.dump_lp.suffix}"
            )
        path.write_text(to_lp_text(lp))
        print(f"compiled problem written to {path}", file=sys.stderr)


def _write_report(cfg: RunConfig, report: ScenarioReport) -> None:
    payload = emit_report(report, cfg.format)
    if cfg.out_path == "-":
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
        return
    out = Path(cfg.out_path)
    out.write_bytes(payload)
    print(f"report written to {out}", file=sys.stderr)
    if cfg.mode == "sweep":
        plot = out.with_name(out.name + ".plot")
        plot.write_bytes(emit_plot_data(report))
        print(f"plot data written to {plot}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0

    try:
        cfg = _build_config(args)
    except CliError as exc:
        print(f"fuzzynexus: error: {exc}", file=sys.stderr)
        return CONFIG_EXIT

    path = cfg.instance_path
    if str(path) == "demo" and not path.exists():
        path = demo_instance_path()
    try:
        instance = load_instance(path)
    except FileNotFoundError:
        print(f"fuzzynexus: error: instance file not found: {path}", file=sys.stderr)
        return CONFIG_EXIT
    except InstanceFormatError as exc:
        print(f"fuzzynexus: error: {path}: {exc}", file=sys.stderr)
        return CONFIG_EXIT

    if cfg.dump_lp is not None:
        _dump_problems(cfg, instance)

    started = time.perf_counter()
    report = run_sweep(instance, cfg.spec, cfg.solver)
    elapsed = time.perf_counter() - started
    _write_report(cfg, report)

    solved = sum(1 for c in report.cells if c.status is SolveStatus.OPTIMAL)
    print(
        f"{solved}/{len(report.cells)} cells optimal in {elapsed:.1f}s",
        file=sys.stderr,
    )

    if cfg.mode == "single" and any(
        c.status is not SolveStatus.OPTIMAL for c in report.cells
    ):
        status = report.cells[0].status.value
        print(f"fuzzynexus: solver limit in single mode: {status}", file=sys.stderr)
        return SOLVER_LIMIT_EXIT
    return 0


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
