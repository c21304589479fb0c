"""Reading and writing planning instances as hand-editable TOML text.

An instance file has sections for the horizon, thermal units, wind units,
batteries, water assets, demands, penalties, and options.  Trapezoids are
4-element arrays [mu1, mu2, mu3, mu4].  Per-period series (wind
availability, demands) are given either in full horizon length or through a
`*_daily` key holding one day's pattern that is tiled across the horizon,
which keeps a 7x24 week down to 24 hand-written values.

Parse errors carry the field path that failed (for example
`wind[0].availability[3]`); TOML syntax errors keep the line/column
position the decoder reports.
"""

from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from fuzzynexus.fuzzy import TrapezoidalFuzzy
from fuzzynexus.model import (
    Battery,
    DemandProfile,
    NexusInstance,
    PenaltySchedule,
    ThermalUnit,
    TimeGrid,
    WaterAsset,
    WaterRole,
    WindUnit,
)


class InstanceFormatError(ValueError):
    """Invalid instance text: syntax error or a named-field invariant violation."""


def _fail(path: str, reason: str) -> None:
    raise InstanceFormatError(f"{path}: {reason}")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {type(value).__name__}")
    return float(value)


def _table(value, path: str) -> dict:
    if not isinstance(value, dict):
        _fail(path, f"expected a table, got {type(value).__name__}")
    return value


def _array(value, path: str) -> list:
    if not isinstance(value, list):
        _fail(path, f"expected an array, got {type(value).__name__}")
    return value


def _string(value, path: str) -> str:
    if not isinstance(value, str):
        _fail(path, f"expected a string, got {type(value).__name__}")
    return value


def _trapezoid(value, path: str) -> TrapezoidalFuzzy:
    arr = _array(value, path)
    if len(arr) != 4:
        _fail(path, f"trapezoid needs exactly 4 values [mu1, mu2, mu3, mu4], got {len(arr)}")
    nums = [_number(v, f"{path}[{i}]") for i, v in enumerate(arr)]
    try:
        return TrapezoidalFuzzy(*nums)
    except ValueError as exc:
        _fail(path, str(exc))


class _Section:
    """One TOML table with typed, path-reporting accessors."""

    def __init__(self, data: dict, path: str):
        self.data = data
        self.path = path

    def require(self, key: str):
        if key not in self.data:
            _fail(f"{self.path}.{key}", "required key is missing")
        return self.data[key]

    def number(self, key: str, default=None) -> float:
        if key not in self.data:
            if default is None:
                _fail(f"{self.path}.{key}", "required key is missing")
            return default
        return _number(self.data[key], f"{self.path}.{key}")

    def series(self, key: str, periods: int) -> list | None:
        """Full-length array under `key`, or a tiled `<key>_daily` pattern."""
        daily_key = f"{key}_daily"
        if key in self.data and daily_key in self.data:
            _fail(f"{self.path}.{key}", f"give either {key} or {daily_key}, not both")
        if key in self.data:
            arr = _array(self.data[key], f"{self.path}.{key}")
            if len(arr) != periods:
                _fail(f"{self.path}.{key}", f"expected {periods} entries, got {len(arr)}")
            return arr
        if daily_key in self.data:
            arr = _array(self.data[daily_key], f"{self.path}.{daily_key}")
            if not arr or periods % len(arr) != 0:
                _fail(
                    f"{self.path}.{daily_key}",
                    f"pattern of {len(arr)} entries does not tile a {periods}-period horizon",
                )
            return arr * (periods // len(arr))
        return None

    def known_keys(self, keys: set[str]) -> None:
        for key in self.data:
            if key not in keys:
                _fail(f"{self.path}.{key}", "unknown key")


def parse_instance(data: bytes | str) -> NexusInstance:
    """Validate instance text into a NexusInstance, or raise InstanceFormatError."""
    text = data.decode() if isinstance(data, bytes) else data
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise InstanceFormatError(f"syntax error: {exc}") from exc

    known_sections = {"horizon", "thermal", "wind", "battery", "water", "demand", "penalties", "options"}
    for key in doc:
        if key not in known_sections:
            _fail(key, "unknown section")

    horizon = _Section(_table(doc.get("horizon", {}), "horizon"), "horizon")
    horizon.known_keys({"periods", "period_hours"})
    periods = int(horizon.number("periods", 168.0))
    period_hours = horizon.number("period_hours", 1.0)
    try:
        grid = TimeGrid(periods=periods, period_hours=period_hours)
    except ValueError as exc:
        _fail("horizon", str(exc))

    thermal = []
    for i, raw in enumerate(_array(doc.get("thermal", []), "thermal")):
        sec = _Section(_table(raw, f"thermal[{i}]"), f"thermal[{i}]")
        sec.known_keys({"name", "capacity_mw", "min_output_mw", "variable_cost_per_mwh",
                        "water_intensity_m3_per_mwh"})
        try:
            thermal.append(
                ThermalUnit(
                    name=_string(sec.data.get("name", f"thermal-{i}"), f"thermal[{i}].name"),
                    capacity_mw=sec.number("capacity_mw"),
                    min_output_mw=sec.number("min_output_mw", 0.0),
                    variable_cost=sec.number("variable_cost_per_mwh", 0.0),
                    water_intensity=sec.number("water_intensity_m3_per_mwh", 0.0),
                )
            )
        except ValueError as exc:
            _fail(f"thermal[{i}]", str(exc))

    wind = []
    for i, raw in enumerate(_array(doc.get("wind", []), "wind")):
        path = f"wind[{i}]"
        sec = _Section(_table(raw, path), path)
        sec.known_keys({"name", "efficiency", "availability", "availability_daily"})
        series = sec.series("availability", periods)
        if series is None:
            _fail(f"{path}.availability", "required key is missing")
        traps = tuple(
            _trapezoid(v, f"{path}.availability[{k}]") for k, v in enumerate(series)
        )
        eff = (
            _trapezoid(sec.data["efficiency"], f"{path}.efficiency")
            if "efficiency" in sec.data
            else TrapezoidalFuzzy.crisp(1.0)
        )
        try:
            wind.append(
                WindUnit(
                    name=_string(sec.data.get("name", f"wind-{i}"), f"{path}.name"),
                    availability=traps,
                    efficiency=eff,
                )
            )
        except ValueError as exc:
            _fail(path, str(exc))

    batteries = []
    for i, raw in enumerate(_array(doc.get("battery", []), "battery")):
        path = f"battery[{i}]"
        sec = _Section(_table(raw, path), path)
        sec.known_keys({"name", "energy_capacity_mwh", "max_charge_mw", "max_discharge_mw",
                        "round_trip_efficiency", "initial_mwh"})
        try:
            batteries.append(
                Battery(
                    name=_string(sec.data.get("name", f"battery-{i}"), f"{path}.name"),
                    energy_capacity_mwh=sec.number("energy_capacity_mwh"),
                    max_charge_mw=sec.number("max_charge_mw"),
                    max_discharge_mw=sec.number("max_discharge_mw"),
                    round_trip_efficiency=sec.number("round_trip_efficiency", 1.0),
                    initial_mwh=sec.number("initial_mwh", 0.0),
                )
            )
        except ValueError as exc:
            _fail(path, str(exc))

    water = []
    for i, raw in enumerate(_array(doc.get("water", []), "water")):
        path = f"water[{i}]"
        sec = _Section(_table(raw, path), path)
        sec.known_keys({"name", "role", "capacity_m3h", "specific_energy_kwh_m3",
                        "variable_cost_per_m3"})
        try:
            role = WaterRole.parse(_string(sec.require("role"), f"{path}.role"))
        except ValueError as exc:
            _fail(f"{path}.role", str(exc))
        try:
            water.append(
                WaterAsset(
                    name=_string(sec.data.get("name", role.value), f"{path}.name"),
                    role=role,
                    capacity_m3h=sec.number("capacity_m3h"),
                    specific_energy_kwh_m3=sec.number("specific_energy_kwh_m3", 0.0),
                    variable_cost=sec.number("variable_cost_per_m3", 0.0),
                )
            )
        except ValueError as exc:
            _fail(path, str(exc))

    dem = _Section(_table(doc.get("demand", {}), "demand"), "demand")
    dem.known_keys({"electricity_mw", "electricity_mw_daily", "water_m3h", "water_m3h_daily",
                    "wastewater_return_fraction"})
    elec = dem.series("electricity_mw", periods) or [0.0] * periods
    wat = dem.series("water_m3h", periods) or [0.0] * periods
    try:
        demand = DemandProfile(
            electricity_mw=tuple(_number(v, f"demand.electricity_mw[{k}]") for k, v in enumerate(elec)),
            water_m3h=tuple(_number(v, f"demand.water_m3h[{k}]") for k, v in enumerate(wat)),
            wastewater_return_fraction=dem.number("wastewater_return_fraction", 0.0),
        )
    except ValueError as exc:
        _fail("demand", str(exc))

    pen = _Section(_table(doc.get("penalties", {}), "penalties"), "penalties")
    pen.known_keys({"unmet_electricity_per_mwh", "unmet_water_per_m3",
                    "untreated_wastewater_per_m3"})
    try:
        penalties = PenaltySchedule(
            unmet_electricity=pen.number("unmet_electricity_per_mwh", 0.0),
            unmet_water=pen.number("unmet_water_per_m3", 0.0),
            untreated_wastewater=pen.number("untreated_wastewater_per_m3", 0.0),
        )
    except ValueError as exc:
        _fail("penalties", str(exc))

    opts = _Section(_table(doc.get("options", {}), "options"), "options")
    opts.known_keys({"thermal_withdrawal_cap_m3h"})
    cap = None
    if "thermal_withdrawal_cap_m3h" in opts.data:
        cap = opts.number("thermal_withdrawal_cap_m3h")

    try:
        return NexusInstance(
            time=grid,
            thermal=tuple(thermal),
            wind=tuple(wind),
            batteries=tuple(batteries),
            water=tuple(water),
            demand=demand,
            penalties=penalties,
            thermal_withdrawal_cap_m3h=cap,
        )
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc


def _fmt(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return f"{v:.1f}"
    return repr(v)


def _fmt_trap(t: TrapezoidalFuzzy) -> str:
    return "[" + ", ".join(_fmt(v) for v in t.as_tuple()) + "]"


def serialize_instance(instance: NexusInstance) -> str:
    """Write an instance back to TOML with every series in full horizon length."""
    out = ["# fuzzynexus planning instance", "", "[horizon]"]
    out.append(f"periods = {instance.time.periods}")
    out.append(f"period_hours = {_fmt(instance.time.period_hours)}")
    for unit in instance.thermal:
        out += ["", "[[thermal]]", f'name = "{unit.name}"']
        out.append(f"capacity_mw = {_fmt(unit.capacity_mw)}")
        out.append(f"min_output_mw = {_fmt(unit.min_output_mw)}")
        out.append(f"variable_cost_per_mwh = {_fmt(unit.variable_cost)}")
        out.append(f"water_intensity_m3_per_mwh = {_fmt(unit.water_intensity)}")
    for unit in instance.wind:
        out += ["", "[[wind]]", f'name = "{unit.name}"']
        out.append(f"efficiency = {_fmt_trap(unit.efficiency)}")
        rows = ",\n".join(f"    {_fmt_trap(t)}" for t in unit.availability)
        out.append("availability = [\n" + rows + ",\n]")
    for bat in instance.batteries:
        out += ["", "[[battery]]", f'name = "{bat.name}"']
        out.append(f"energy_capacity_mwh = {_fmt(bat.energy_capacity_mwh)}")
        out.append(f"max_charge_mw = {_fmt(bat.max_charge_mw)}")
        out.append(f"max_discharge_mw = {_fmt(bat.max_discharge_mw)}")
        out.append(f"round_trip_efficiency = {_fmt(bat.round_trip_efficiency)}")
        out.append(f"initial_mwh = {_fmt(bat.initial_mwh)}")
    for asset in instance.water:
        out += ["", "[[water]]", f'name = "{asset.name}"']
        out.append(f'role = "{asset.role.value}"')
        out.append(f"capacity_m3h = {_fmt(asset.capacity_m3h)}")
        out.append(f"specific_energy_kwh_m3 = {_fmt(asset.specific_energy_kwh_m3)}")
        out.append(f"variable_cost_per_m3 = {_fmt(asset.variable_cost)}")
    out += ["", "[demand]"]
    out.append(
        "electricity_mw = [" + ", ".join(_fmt(v) for v in instance.demand.electricity_mw) + "]"
    )
    out.append("water_m3h = [" + ", ".join(_fmt(v) for v in instance.demand.water_m3h) + "]")
    out.append(
        f"wastewater_return_fraction = {_fmt(instance.demand.wastewater_return_fraction)}"
    )
    out += ["", "[penalties]"]
    out.append(f"unmet_electricity_per_mwh = {_fmt(instance.penalties.unmet_electricity)}")
    out.append(f"unmet_water_per_m3 = {_fmt(instance.penalties.unmet_water)}")
    out.append(f"untreated_wastewater_per_m3 = {_fmt(instance.penalties.untreated_wastewater)}")
    if instance.thermal_withdrawal_cap_m3h is not None:
        out += ["", "[options]"]
        out.append(f"thermal_withdrawal_cap_m3h = {_fmt(instance.thermal_withdrawal_cap_m3h)}")
    return "\n".join(out) + "\n"


def load_instance(path: str | Path) -> NexusInstance:
    return parse_instance(Path(path).read_bytes())


def demo_instance_path() -> Path:
    """Filesystem path of the bundled one-week demo instance."""
    return Path(str(resources.files("fuzzynexus").joinpath("data/demo_week.toml")))
