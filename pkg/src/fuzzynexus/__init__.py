"""Fuzzy chance-constrained planning for energy-water nexus systems.

The package converts chance constraints over trapezoidal fuzzy parameters
into crisp bounds under the possibility, necessity, and credibility
measures, compiles a multi-period energy-water planning instance into a
mixed-integer linear program, solves it with a built-in simplex plus
branch-and-bound engine, and sweeps (measure, confidence) grids into
cost and gap-index reports.
"""

from fuzzynexus.fuzzy import (
    Direction,
    MeasureKind,
    TrapezoidalFuzzy,
    crisp_bound,
    measure_ge,
    measure_le,
    membership,
    product_nonneg,
)
from fuzzynexus.instance_io import (
    InstanceFormatError,
    demo_instance_path,
    load_instance,
    parse_instance,
    serialize_instance,
)
from fuzzynexus.model import (
    Battery,
    CostBreakdown,
    DemandProfile,
    NexusInstance,
    PenaltySchedule,
    ThermalUnit,
    TimeGrid,
    UncertaintyPlan,
    VariableLayout,
    WaterAsset,
    WaterRole,
    WindUnit,
    effective_wind_cap,
    total_cost_breakdown,
)
from fuzzynexus.solver import (
    LinearProgram,
    Relation,
    Solution,
    SolveStatus,
    SolverConfig,
    VarKind,
    solve_lp,
    solve_milp,
)
from fuzzynexus.sweep import (
    CellResult,
    ScenarioReport,
    SweepSpec,
    compute_pi,
    emit_plot_data,
    emit_report,
    parse_report,
    run_sweep,
)

__version__ = "0.1.0"
