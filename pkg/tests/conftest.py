"""
Shared pytest fixtures for ctrwexit tests
"""

from pathlib import Path

import pytest

from ctrwexit.distributions import ErlangWaiting, ExponentialJumps, ProcessSpec


@pytest.fixture
def fixtures_dir():
    """Return path to test fixtures directory"""
    return Path(__file__).parent / "fixtures"


@pytest.fixture
def erlang_waiting():
    """Erlang(λ=1, n=2) sojourn times used throughout the published curves"""
    return ErlangWaiting(1.0, 2)


@pytest.fixture
def favorable_spec(erlang_waiting):
    """b=1, v=0.1, exponential upward jumps of rate γ=0.1"""
    return ProcessSpec(0.1, 1.0, erlang_waiting, ExponentialJumps(0.1))


@pytest.fixture
def adverse_small_jumps_spec(erlang_waiting):
    """b=1, v=0.1, exponential downward jumps of rate γ=4 (mean size 0.25)"""
    return ProcessSpec(0.1, 1.0, erlang_waiting, ExponentialJumps(4.0, sign=-1))


@pytest.fixture
def adverse_large_jumps_spec(erlang_waiting):
    """b=1, v=0.1, exponential downward jumps of rate γ=0.1 (mean size 10)"""
    return ProcessSpec(0.1, 1.0, erlang_waiting, ExponentialJumps(0.1, sign=-1))


@pytest.fixture
def waiting_table_path(fixtures_dir):
    """Tabulated triangular waiting-time density on [0, 2]"""
    return fixtures_dir / "triangular_waiting.csv"


@pytest.fixture
def jump_table_path(fixtures_dir):
    """Tabulated uniform jump density on [0, 0.5]"""
    return fixtures_dir / "uniform_jumps.csv"
