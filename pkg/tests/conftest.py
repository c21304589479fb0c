"""Shared fixtures; the full-scale demo sweep runs once per session."""

import time

import pytest

from fuzzynexus.instance_io import demo_instance_path, load_instance
from fuzzynexus.sweep import run_sweep


@pytest.fixture(scope="session")
def demo_sweep():
    """(report, wall seconds) for the default 3x5 sweep of the bundled demo."""
    instance = load_instance(demo_instance_path())
    start = time.perf_counter()
    report = run_sweep(instance)
    elapsed = time.perf_counter() - start
    return report, elapsed
