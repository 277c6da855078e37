"""Explicit sentinel values used instead of infinity-as-a-number."""

from __future__ import annotations

import enum
from typing import Literal

from ctrwexit.exceptions import DomainError


class Sentinel(enum.Enum):
    """Named non-numeric values.

    UNDEFINED marks a moment that does not exist (heavy tails), INFINITE a
    divergent mean exit time, STEADY_STATE the observation time r = ∞.
    """

    UNDEFINED = "undefined"
    INFINITE = "infinite"
    STEADY_STATE = "steady-state"

    def __repr__(self) -> str:
        return self.name


UNDEFINED = Sentinel.UNDEFINED
INFINITE = Sentinel.INFINITE
STEADY_STATE = Sentinel.STEADY_STATE

# Observation time r: a nonnegative float or the r = ∞ sentinel
ObservationTime = float | Literal[Sentinel.STEADY_STATE]


def is_steady_state(r: object) -> bool:
    return r is Sentinel.STEADY_STATE


def check_observation_time(r: ObservationTime) -> None:
    """Raise DomainError unless r is a finite nonnegative time or STEADY_STATE."""
    if r is Sentinel.STEADY_STATE:
        return
    if isinstance(r, Sentinel):
        raise DomainError(f"Observation time must be a number or STEADY_STATE, got {r!r}")
    if not (r >= 0.0) or r == float("inf"):
        raise DomainError(f"Observation time must be finite and >= 0 (use STEADY_STATE), got {r}")
