"""Sensitivity sweeps over (measure kind, confidence level) grids.

One cell of a sweep compiles the instance under a single uncertainty plan,
solves the resulting MILP, and records total cost, solve status, and wall
time.  Costs are indexed against the possibility/alpha=0 baseline through
the PI gap index, a scaled relative cost gap: (cost / baseline - 1) * 1e4.
Reports serialize to CSV (kind,alpha,cost,pi,status,wall_ms), to an aligned
text table with identical content, and to a two-column plot-data file with
one alpha/cost series per measure kind.
"""

from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass

from fuzzynexus import model
from fuzzynexus.fuzzy import MeasureKind
from fuzzynexus.model import NexusInstance, UncertaintyPlan
from fuzzynexus.solver import SolveStatus, SolverConfig, solve_milp

PI_SCALE = 1e4

DEFAULT_KINDS = (
    MeasureKind.POSSIBILITY,
    MeasureKind.CREDIBILITY,
    MeasureKind.NECESSITY,
)
DEFAULT_ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0)

CSV_HEADER = "kind,alpha,cost,pi,status,wall_ms"


@dataclass(frozen=True)
class SweepSpec:
    """Which measures and confidence levels to evaluate."""

    kinds: tuple[MeasureKind, ...] = DEFAULT_KINDS
    alphas: tuple[float, ...] = DEFAULT_ALPHAS

    def __post_init__(self) -> None:
        object.__setattr__(self, "kinds", tuple(self.kinds))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if not self.kinds:
            raise ValueError("kinds: at least one measure kind is required")
        if not self.alphas:
            raise ValueError("alphas: at least one confidence level is required")
        if len(set(self.kinds)) != len(self.kinds):
            raise ValueError("kinds: duplicate measure kinds")
        for a in self.alphas:
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"alphas: {a} outside [0, 1]")
        if any(b <= a for a, b in zip(self.alphas, self.alphas[1:])):
            raise ValueError("alphas: values must be strictly increasing")


@dataclass(frozen=True)
class CellResult:
    kind: MeasureKind
    alpha: float
    cost: float
    pi: float
    status: SolveStatus
    wall_ms: float


@dataclass(frozen=True)
class ScenarioReport:
    """Sweep results in kind-major, alpha-ascending order plus the baseline cost."""

    cells: tuple[CellResult, ...]
    baseline_cost: float

    def cell(self, kind: MeasureKind, alpha: float) -> CellResult:
        for c in self.cells:
            if c.kind is kind and c.alpha == alpha:
                return c
        raise KeyError(f"no cell for ({kind.value}, {alpha})")


def compute_pi(cost: float, baseline: float) -> float:
    """Scaled relative gap of a cell cost against the baseline cost.

    Defined as (cost / baseline - 1) * 10^4, which reproduces the published
    gap figures this index mirrors; the baseline cell itself maps to 0.
    """
    if not baseline > 0.0:
        raise ValueError(f"baseline cost must be positive, got {baseline}")
    return (cost / baseline - 1.0) * PI_SCALE


def _pi_or_nan(cost: float, baseline: float) -> float:
    if math.isnan(cost) or math.isnan(baseline):
        return math.nan
    if baseline > 0.0:
        return compute_pi(cost, baseline)
    return 0.0 if cost == baseline else math.nan


def run_sweep(
    instance: NexusInstance,
    spec: SweepSpec | None = None,
    config: SolverConfig | None = None,
) -> ScenarioReport:
    """Solve every (kind, alpha) cell of the spec against one instance.

    The possibility/alpha=0 baseline is solved first even when the spec does
    not request it, so every cell's PI is well defined.  Cells that end on a
    solver limit are recorded with their status and NaN cost; the sweep
    keeps going.  Cell order in the report is kind-major then
    alpha-ascending, exactly as listed in the spec.

    Cells are independent (each owns its compiled problem), so a caller may
    farm them out concurrently; this implementation keeps the evaluation
    sequential and the report assembly is a deterministic reduction.
    """
    spec = spec or SweepSpec()
    cfg = config or SolverConfig()

    def solve_cell(kind: MeasureKind, alpha: float) -> tuple[float, SolveStatus, float]:
        start = time.perf_counter()
        lp = model.compile(instance, UncertaintyPlan(kind, alpha))
        sol = solve_milp(lp, cfg)
        wall_ms = (time.perf_counter() - start) * 1e3
        cost = sol.objective if sol.status is SolveStatus.OPTIMAL else math.nan
        return cost, sol.status, wall_ms

    baseline_key = (MeasureKind.POSSIBILITY, 0.0)
    raw: dict[tuple[MeasureKind, float], tuple[float, SolveStatus, float]] = {}
    raw[baseline_key] = solve_cell(*baseline_key)
    baseline_cost = raw[baseline_key][0]

    cells: list[CellResult] = []
    for kind in spec.kinds:
        for alpha in spec.alphas:
            key = (kind, alpha)
            if key not in raw:
                raw[key] = solve_cell(kind, alpha)
            cost, status, wall_ms = raw[key]
            cells.append(
                CellResult(
                    kind=kind,
                    alpha=alpha,
                    cost=cost,
                    pi=_pi_or_nan(cost, baseline_cost),
                    status=status,
                    wall_ms=wall_ms,
                )
            )
    return ScenarioReport(cells=tuple(cells), baseline_cost=baseline_cost)


def emit_report(report: ScenarioReport, format: str = "csv") -> bytes:
    """Serialize a report as CSV or as an aligned text table with equal content."""
    if format == "csv":
        lines = [CSV_HEADER]
        for c in report.cells:
            lines.append(
                f"{c.kind.value},{c.alpha!r},{c.cost!r},{c.pi!r},"
                f"{c.status.value},{c.wall_ms!r}"
            )
        return ("\n".join(lines) + "\n").encode()
    if format == "text":
        out = io.StringIO()
        header = ("kind", "alpha", "cost", "pi", "status", "wall_ms")
        rows = [
            (
                c.kind.value,
                f"{c.alpha:g}",
                f"{c.cost:.6f}" if not math.isnan(c.cost) else "nan",
                f"{c.pi:.4f}" if not math.isnan(c.pi) else "nan",
                c.status.value,
                f"{c.wall_ms:.1f}",
            )
            for c in report.cells
        ]
        widths = [
            max(len(header[k]), *(len(r[k]) for r in rows)) if rows else len(header[k])
            for k in range(6)
        ]
        out.write("  ".join(h.ljust(widths[k]) for k, h in enumerate(header)).rstrip() + "\n")
        for r in rows:
            out.write("  ".join(v.ljust(widths[k]) for k, v in enumerate(r)).rstrip() + "\n")
        out.write(f"baseline_cost {report.baseline_cost:.6f}\n")
        return out.getvalue().encode()
    raise ValueError(f"unknown report format {format!r}; expected csv or text")


def parse_report(data: bytes) -> ScenarioReport:
    """Parse the CSV schema back into a report.

    The baseline cost is taken from the possibility/alpha=0 row when the
    report contains it and is NaN otherwise.
    """
    text = data.decode()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"expected header {CSV_HEADER!r}")
    cells = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 6:
            raise ValueError(f"expected 6 fields, got {len(parts)}: {ln!r}")
        cells.append(
            CellResult(
                kind=MeasureKind.parse(parts[0]),
                alpha=float(parts[1]),
                cost=float(parts[2]),
                pi=float(parts[3]),
                status=SolveStatus(parts[4]),
                wall_ms=float(parts[5]),
            )
        )
    baseline = math.nan
    for c in cells:
        if c.kind is MeasureKind.POSSIBILITY and c.alpha == 0.0:
            baseline = c.cost
            break
    return ScenarioReport(cells=tuple(cells), baseline_cost=baseline)


def emit_plot_data(report: ScenarioReport) -> bytes:
    """Alpha-versus-cost series per measure kind, for external plotting tools.

    Series are separated by blank lines and introduced by a comment naming
    the measure; cells without an optimal cost are skipped.
    """
    blocks: list[str] = []
    seen: list[MeasureKind] = []
    for c in report.cells:
        if c.kind not in seen:
            seen.append(c.kind)
    for kind in seen:
        rows = [
            f"{c.alpha:g} {c.cost!r}"
            for c in report.cells
            if c.kind is kind and not math.isnan(c.cost)
        ]
        blocks.append(f"# measure={kind.value}\n" + "\n".join(rows) + "\n")
    return "\n".join(blocks).encode()
