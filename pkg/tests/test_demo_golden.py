"""Pin the bundled demo instance's sweep against its frozen golden file."""

from pathlib import Path

import pytest

from fuzzynexus.sweep import parse_report

GOLDEN = Path(__file__).parent / "data" / "demo_week_sweep_golden.csv"


def test_demo_sweep_matches_golden_file(demo_sweep):
    report, _ = demo_sweep
    golden = parse_report(GOLDEN.read_bytes())
    assert len(report.cells) == len(golden.cells) == 15
    assert report.baseline_cost == pytest.approx(golden.baseline_cost, rel=1e-9)
    for got, want in zip(report.cells, golden.cells):
        assert got.kind is want.kind
        assert got.alpha == want.alpha
        assert got.status is want.status
        assert got.cost == pytest.approx(want.cost, rel=1e-9)
        assert got.pi == pytest.approx(want.pi, abs=1e-6)
