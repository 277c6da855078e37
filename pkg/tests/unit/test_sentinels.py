"""
Unit tests for the named non-numeric values
"""

import math

import pytest

from ctrwexit.distributions import OneSidedStableJumps
from ctrwexit.exceptions import DomainError
from ctrwexit.sentinels import (
    INFINITE,
    STEADY_STATE,
    UNDEFINED,
    Sentinel,
    check_observation_time,
    is_steady_state,
)


class TestSentinels:
    """Test sentinel identity and observation-time validation"""

    def test_distinct_members(self):
        """Should keep the three sentinels distinct"""
        assert len({UNDEFINED, INFINITE, STEADY_STATE}) == 3
        assert repr(STEADY_STATE) == "STEADY_STATE"

    def test_not_numbers(self):
        """Should never compare equal to infinity"""
        assert STEADY_STATE != math.inf
        assert not isinstance(INFINITE, float)

    def test_is_steady_state(self):
        """Should recognise only the steady-state sentinel"""
        assert is_steady_state(STEADY_STATE)
        assert not is_steady_state(math.inf)
        assert not is_steady_state(INFINITE)

    @pytest.mark.parametrize("r", [0.0, 0.4, 10.0, STEADY_STATE])
    def test_valid_observation_times(self, r):
        """Should accept finite nonnegative times and the steady state"""
        check_observation_time(r)

    @pytest.mark.parametrize("r", [-1.0, math.inf, math.nan, INFINITE, UNDEFINED])
    def test_invalid_observation_times(self, r):
        """Should reject negative, infinite and other sentinel values"""
        with pytest.raises(DomainError):
            check_observation_time(r)

    def test_heavy_tail_mean(self):
        """Should report an undefined mean for one-sided stable jumps"""
        assert OneSidedStableJumps(1.0).mean is UNDEFINED
        assert isinstance(OneSidedStableJumps(1.0).mean, Sentinel)
