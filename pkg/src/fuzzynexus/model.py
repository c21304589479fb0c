"""Energy-water nexus instance description and its deterministic-equivalent MILP.

An instance couples a power side (thermal units with commitment binaries,
wind with fuzzy availability and efficiency, batteries) to a water chain
(source, transmission link, treatment plant) over an hourly horizon.  Under
an uncertainty plan (measure kind, confidence level) the fuzzy wind
parameters collapse to crisp per-period dispatch caps and the whole
instance compiles to a minimization MILP whose objective is fuel plus water
operating cost plus penalties for unmet electricity, unmet water, and
untreated wastewater.  Slack variables make every compiled problem
feasible by construction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from fuzzynexus.fuzzy import (
    Direction,
    MeasureKind,
    TrapezoidalFuzzy,
    crisp_bound,
    product_nonneg,
)
from fuzzynexus.solver import (
    LinearProgram,
    Relation,
    SolveStatus,
    Solution,
    VarKind,
)

KWH_PER_MWH = 1000.0


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


@dataclass(frozen=True)
class TimeGrid:
    """Planning horizon: `periods` steps of `period_hours` each (hourly by default)."""

    periods: int = 168
    period_hours: float = 1.0

    def __post_init__(self) -> None:
        _require(self.periods >= 1, "periods: must be at least 1")
        _require(self.period_hours > 0.0, "period_hours: must be positive")


@dataclass(frozen=True)
class ThermalUnit:
    name: str
    capacity_mw: float
    min_output_mw: float = 0.0
    variable_cost: float = 0.0  # $/MWh
    water_intensity: float = 0.0  # m3 withdrawn per MWh generated

    def __post_init__(self) -> None:
        _require(
            0.0 <= self.min_output_mw <= self.capacity_mw,
            "min_output_mw: must satisfy 0 <= min output <= capacity",
        )
        _require(self.variable_cost >= 0.0, "variable_cost: must be >= 0")
        _require(self.water_intensity >= 0.0, "water_intensity: must be >= 0")


@dataclass(frozen=True)
class WindUnit:
    """Wind plant with fuzzy per-period availability and one fuzzy efficiency.

    Availability trapezoids are in MW; the efficiency trapezoid is
    dimensionless with support inside [0, 1] and is applied multiplicatively
    to every period.
    """

    name: str
    availability: tuple[TrapezoidalFuzzy, ...]
    efficiency: TrapezoidalFuzzy = TrapezoidalFuzzy(1.0, 1.0, 1.0, 1.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "availability", tuple(self.availability))
        for k, trap in enumerate(self.availability):
            _require(
                trap.mu1 >= 0.0,
                f"availability[{k}]: components must be >= 0",
            )
        _require(
            0.0 <= self.efficiency.mu1 and self.efficiency.mu4 <= 1.0,
            "efficiency: support must lie within [0, 1]",
        )


@dataclass(frozen=True)
class Battery:
    name: str
    energy_capacity_mwh: float
    max_charge_mw: float
    max_discharge_mw: float
    round_trip_efficiency: float = 1.0
    initial_mwh: float = 0.0

    def __post_init__(self) -> None:
        _require(self.energy_capacity_mwh >= 0.0, "energy_capacity_mwh: must be >= 0")
        _require(self.max_charge_mw >= 0.0, "max_charge_mw: must be >= 0")
        _require(self.max_discharge_mw >= 0.0, "max_discharge_mw: must be >= 0")
        _require(
            0.0 < self.round_trip_efficiency <= 1.0,
            "round_trip_efficiency: must lie in (0, 1]",
        )
        _require(
            0.0 <= self.initial_mwh <= self.energy_capacity_mwh,
            "initial_mwh: must satisfy 0 <= initial <= capacity",
        )


class WaterRole(enum.Enum):
    SOURCE = "source"
    LINK = "link"
    TREATMENT = "treatment"

    @classmethod
    def parse(cls, text: str) -> "WaterRole":
        key = text.strip().lower()
        for role in cls:
            if key == role.value:
                return role
        raise ValueError(f"unknown water role {text!r}; expected source, link, or treatment")


@dataclass(frozen=True)
class WaterAsset:
    name: str
    role: WaterRole
    capacity_m3h: float
    specific_energy_kwh_m3: float = 0.0
    variable_cost: float = 0.0  # $/m3

    def __post_init__(self) -> None:
        _require(self.capacity_m3h >= 0.0, "capacity_m3h: must be >= 0")
        _require(self.specific_energy_kwh_m3 >= 0.0, "specific_energy_kwh_m3: must be >= 0")
        _require(self.variable_cost >= 0.0, "variable_cost: must be >= 0")


@dataclass(frozen=True)
class DemandProfile:
    electricity_mw: tuple[float, ...]
    water_m3h: tuple[float, ...]
    wastewater_return_fraction: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "electricity_mw", tuple(float(v) for v in self.electricity_mw))
        object.__setattr__(self, "water_m3h", tuple(float(v) for v in self.water_m3h))
        _require(
            all(v >= 0.0 for v in self.electricity_mw),
            "electricity_mw: demands must be >= 0",
        )
        _require(all(v >= 0.0 for v in self.water_m3h), "water_m3h: demands must be >= 0")
        _require(
            0.0 <= self.wastewater_return_fraction <= 1.0,
            "wastewater_return_fraction: must lie in [0, 1]",
        )


@dataclass(frozen=True)
class PenaltySchedule:
    """Soft-constraint prices; keep them well above every variable cost."""

    unmet_electricity: float  # $/MWh
    unmet_water: float  # $/m3
    untreated_wastewater: float  # $/m3

    def __post_init__(self) -> None:
        _require(self.unmet_electricity >= 0.0, "unmet_electricity: must be >= 0")
        _require(self.unmet_water >= 0.0, "unmet_water: must be >= 0")
        _require(self.untreated_wastewater >= 0.0, "untreated_wastewater: must be >= 0")


@dataclass(frozen=True)
class UncertaintyPlan:
    """One defuzzification policy: measure kind plus confidence level."""

    kind: MeasureKind
    alpha: float

    def __post_init__(self) -> None:
        _require(0.0 <= self.alpha <= 1.0, "alpha: must lie in [0, 1]")


@dataclass(frozen=True)
class NexusInstance:
    time: TimeGrid
    thermal: tuple[ThermalUnit, ...] = ()
    wind: tuple[WindUnit, ...] = ()
    batteries: tuple[Battery, ...] = ()
    water: tuple[WaterAsset, ...] = ()
    demand: DemandProfile = None  # type: ignore[assignment]
    penalties: PenaltySchedule = PenaltySchedule(0.0, 0.0, 0.0)
    # optional cap on total thermal water withdrawal per period; None = unconstrained
    thermal_withdrawal_cap_m3h: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "thermal", tuple(self.thermal))
        object.__setattr__(self, "wind", tuple(self.wind))
        object.__setattr__(self, "batteries", tuple(self.batteries))
        object.__setattr__(self, "water", tuple(self.water))
        if self.demand is None:
            zeros = (0.0,) * self.time.periods
            object.__setattr__(self, "demand", DemandProfile(zeros, zeros))
        T = self.time.periods
        _require(
            len(self.demand.electricity_mw) == T,
            f"demand.electricity_mw: expected {T} values, got {len(self.demand.electricity_mw)}",
        )
        _require(
            len(self.demand.water_m3h) == T,
            f"demand.water_m3h: expected {T} values, got {len(self.demand.water_m3h)}",
        )
        for w in self.wind:
            _require(
                len(w.availability) == T,
                f"wind {w.name!r}: availability needs {T} trapezoids, got {len(w.availability)}",
            )
        seen: set[WaterRole] = set()
        for asset in self.water:
            _require(
                asset.role not in seen,
                f"water: more than one {asset.role.value} asset; the compiled chain supports one per role",
            )
            seen.add(asset.role)
        if self.thermal_withdrawal_cap_m3h is not None:
            _require(
                self.thermal_withdrawal_cap_m3h >= 0.0,
                "thermal_withdrawal_cap_m3h: must be >= 0",
            )

    def water_asset(self, role: WaterRole) -> WaterAsset | None:
        for asset in self.water:
            if asset.role is role:
                return asset
        return None


def effective_wind_cap(unit: WindUnit, t: int, plan: UncertaintyPlan) -> float:
    """Largest dispatch the chance constraint admits in period t.

    The per-period availability and the plant efficiency are combined by
    component-wise product and the greater-or-equal transform at the plan's
    measure and confidence gives the crisp cap.
    """
    combined = product_nonneg(unit.availability[t], unit.efficiency)
    return crisp_bound(combined, plan.kind, Direction.GREATER_OR_EQUAL, plan.alpha)


class VariableLayout:
    """Deterministic variable indexing of the compiled problem.

    Compilation and cost accounting both derive positions from this map, so
    a solution vector can be read back field by field without carrying
    metadata alongside the LinearProgram.
    """

    def __init__(self, instance: NexusInstance) -> None:
        self.instance = instance
        T = instance.time.periods
        G = len(instance.thermal)
        W = len(instance.wind)
        B = len(instance.batteries)
        self.per_period = 2 * G + W + 3 * B + 6
        self.n_vars = T * self.per_period
        self._g = G
        self._w = W
        self._b = B

    def _base(self, t: int) -> int:
        return t * self.per_period

    def thermal_output(self, g: int, t: int) -> int:
        return self._base(t) + 2 * g

    def commitment(self, g: int, t: int) -> int:
        return self._base(t) + 2 * g + 1

    def wind_dispatch(self, w: int, t: int) -> int:
        return self._base(t) + 2 * self._g + w

    def charge(self, b: int, t: int) -> int:
        return self._base(t) + 2 * self._g + self._w + 3 * b

    def discharge(self, b: int, t: int) -> int:
        return self.charge(b, t) + 1

    def storage(self, b: int, t: int) -> int:
        return self.charge(b, t) + 2

    def extraction(self, t: int) -> int:
        return self._base(t) + 2 * self._g + self._w + 3 * self._b

    def delivery(self, t: int) -> int:
        return self.extraction(t) + 1

    def treated(self, t: int) -> int:
        return self.extraction(t) + 2

    def unmet_electricity(self, t: int) -> int:
        return self.extraction(t) + 3

    def unmet_water(self, t: int) -> int:
        return self.extraction(t) + 4

    def untreated(self, t: int) -> int:
        return self.extraction(t) + 5


def expected_row_count(instance: NexusInstance) -> int:
    """Rows the compiler emits: balance, thermal window pair, storage, water triple."""
    T = instance.time.periods
    G = len(instance.thermal)
    B = len(instance.batteries)
    withdrawal = 1 if instance.thermal_withdrawal_cap_m3h is not None else 0
    return T * (1 + 2 * G + B + 3 + withdrawal)


def compile(instance: NexusInstance, plan: UncertaintyPlan) -> LinearProgram:
    """Build the deterministic-equivalent problem for one uncertainty plan.

    Per period: continuous thermal output with a binary commitment window,
    wind dispatch bounded by its crisp chance-constraint cap, battery
    charge/discharge/state with storage dynamics, the water chain
    extraction = delivery <= demand with treatment of returned wastewater,
    and penalized slacks that absorb any electricity, water, or treatment
    deficit.  The result is always feasible.

    Instances are immutable and compilation builds a fresh problem, so
    concurrent compiles of one instance under different plans are safe.
    """
    lay = VariableLayout(instance)
    T = instance.time.periods
    h = instance.time.period_hours
    lp = LinearProgram()

    source = instance.water_asset(WaterRole.SOURCE)
    link = instance.water_asset(WaterRole.LINK)
    treatment = instance.water_asset(WaterRole.TREATMENT)
    pen = instance.penalties

    for t in range(T):
        for g, unit in enumerate(instance.thermal):
            lp.add_variable(
                f"thermal_out[{g},{t}]", 0.0, unit.capacity_mw,
                objective=unit.variable_cost * h,
            )
            lp.add_variable(f"commit[{g},{t}]", 0.0, 1.0, kind=VarKind.BINARY)
        for w, unit in enumerate(instance.wind):
            lp.add_variable(
                f"wind[{w},{t}]", 0.0, effective_wind_cap(unit, t, plan)
            )
        for b, bat in enumerate(instance.batteries):
            lp.add_variable(f"charge[{b},{t}]", 0.0, bat.max_charge_mw)
            lp.add_variable(f"discharge[{b},{t}]", 0.0, bat.max_discharge_mw)
            lp.add_variable(f"stored[{b},{t}]", 0.0, bat.energy_capacity_mwh)
        lp.add_variable(
            "extract[%d]" % t, 0.0, source.capacity_m3h if source else 0.0,
            objective=(source.variable_cost * h) if source else 0.0,
        )
        lp.add_variable(
            "deliver[%d]" % t, 0.0, link.capacity_m3h if link else 0.0,
            objective=(link.variable_cost * h) if link else 0.0,
        )
        lp.add_variable(
            "treat[%d]" % t, 0.0, treatment.capacity_m3h if treatment else 0.0,
            objective=(treatment.variable_cost * h) if treatment else 0.0,
        )
        lp.add_variable(
            "unmet_elec[%d]" % t, 0.0, math.inf, objective=pen.unmet_electricity * h
        )
        lp.add_variable(
            "unmet_water[%d]" % t, 0.0, math.inf, objective=pen.unmet_water * h
        )
        lp.add_variable(
            "untreated[%d]" % t, 0.0, math.inf, objective=pen.untreated_wastewater * h
        )

    ret = instance.demand.wastewater_return_fraction
    for t in range(T):
        # (a) power balance: generation + net discharge + slack covers consumer
        # demand plus the electricity the water chain itself draws
        balance = []
        for g in range(len(instance.thermal)):
            balance.append((lay.thermal_output(g, t), 1.0))
        for w in range(len(instance.wind)):
            balance.append((lay.wind_dispatch(w, t), 1.0))
        for b in range(len(instance.batteries)):
            balance.append((lay.discharge(b, t), 1.0))
            balance.append((lay.charge(b, t), -1.0))
        balance.append((lay.unmet_electricity(t), 1.0))
        if source:
            balance.append((lay.extraction(t), -source.specific_energy_kwh_m3 / KWH_PER_MWH))
        if link:
            balance.append((lay.delivery(t), -link.specific_energy_kwh_m3 / KWH_PER_MWH))
        if treatment:
            balance.append((lay.treated(t), -treatment.specific_energy_kwh_m3 / KWH_PER_MWH))
        lp.add_row(
            f"power_balance[{t}]", balance, Relation.EQ,
            instance.demand.electricity_mw[t],
        )

        # (b) thermal window: min*u <= p <= cap*u
        for g, unit in enumerate(instance.thermal):
            lp.add_row(
                f"thermal_min[{g},{t}]",
                [(lay.commitment(g, t), unit.min_output_mw), (lay.thermal_output(g, t), -1.0)],
                Relation.LE, 0.0,
            )
            lp.add_row(
                f"thermal_max[{g},{t}]",
                [(lay.thermal_output(g, t), 1.0), (lay.commitment(g, t), -unit.capacity_mw)],
                Relation.LE, 0.0,
            )

        # (d) storage dynamics: s_t - s_{t-1} = eta*charge - discharge (in MWh)
        for b, bat in enumerate(instance.batteries):
            coeffs = [
                (lay.storage(b, t), 1.0),
                (lay.charge(b, t), -bat.round_trip_efficiency * h),
                (lay.discharge(b, t), h),
            ]
            rhs = 0.0
            if t == 0:
                rhs = bat.initial_mwh
            else:
                coeffs.append((lay.storage(b, t - 1), -1.0))
            lp.add_row(f"storage[{b},{t}]", coeffs, Relation.EQ, rhs)

        # (e) water chain: delivery + slack meets demand; extraction equals delivery
        lp.add_row(
            f"water_demand[{t}]",
            [(lay.delivery(t), 1.0), (lay.unmet_water(t), 1.0)],
            Relation.EQ, instance.demand.water_m3h[t],
        )
        lp.add_row(
            f"water_chain[{t}]",
            [(lay.extraction(t), 1.0), (lay.delivery(t), -1.0)],
            Relation.EQ, 0.0,
        )

        # (f) wastewater: returned flow is treated or penalized
        lp.add_row(
            f"wastewater[{t}]",
            [(lay.delivery(t), ret), (lay.treated(t), -1.0), (lay.untreated(t), -1.0)],
            Relation.EQ, 0.0,
        )

        if instance.thermal_withdrawal_cap_m3h is not None:
            lp.add_row(
                f"withdrawal_cap[{t}]",
                [
                    (lay.thermal_output(g, t), unit.water_intensity * h)
                    for g, unit in enumerate(instance.thermal)
                ],
                Relation.LE, instance.thermal_withdrawal_cap_m3h * h,
            )

    return lp


@dataclass(frozen=True)
class CostBreakdown:
    """Objective split into its cost components plus withdrawal accounting."""

    fuel: float
    water_operations: float
    unmet_electricity: float
    unmet_water: float
    untreated_wastewater: float
    thermal_withdrawal_m3: float

    @property
    def total(self) -> float:
        return (
            self.fuel
            + self.water_operations
            + self.unmet_electricity
            + self.unmet_water
            + self.untreated_wastewater
        )


def total_cost_breakdown(
    instance: NexusInstance, plan: UncertaintyPlan, solution: Solution
) -> CostBreakdown:
    """Split an optimal solve of the compiled problem into cost components."""
    if solution.status is not SolveStatus.OPTIMAL:
        raise ValueError(f"cost breakdown requires an optimal solution, got {solution.status.value}")
    lay = VariableLayout(instance)
    if solution.values is None or len(solution.values) != lay.n_vars:
        raise ValueError("solution does not match the instance's compiled layout")
    x = solution.values
    T = instance.time.periods
    h = instance.time.period_hours
    pen = instance.penalties

    fuel = 0.0
    withdrawal = 0.0
    for g, unit in enumerate(instance.thermal):
        energy = sum(x[lay.thermal_output(g, t)] for t in range(T)) * h
        fuel += unit.variable_cost * energy
        withdrawal += unit.water_intensity * energy
    water_ops = 0.0
    for role, pick in (
        (WaterRole.SOURCE, lay.extraction),
        (WaterRole.LINK, lay.delivery),
        (WaterRole.TREATMENT, lay.treated),
    ):
        asset = instance.water_asset(role)
        if asset:
            water_ops += asset.variable_cost * h * sum(x[pick(t)] for t in range(T))
    unmet_e = pen.unmet_electricity * h * sum(x[lay.unmet_electricity(t)] for t in range(T))
    unmet_w = pen.unmet_water * h * sum(x[lay.unmet_water(t)] for t in range(T))
    untreated = pen.untreated_wastewater * h * sum(x[lay.untreated(t)] for t in range(T))
    return CostBreakdown(
        fuel=fuel,
        water_operations=water_ops,
        unmet_electricity=unmet_e,
        unmet_water=unmet_w,
        untreated_wastewater=untreated,
        thermal_withdrawal_m3=withdrawal,
    )
