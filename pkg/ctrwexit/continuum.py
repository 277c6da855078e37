"""Continuum limit of the favorable walk with one-sided stable jumps.

Letting the mean waiting time μ and the jump scale k go to zero with
k/μ → K, the after-jump transform becomes F̂(s) = 1/(v s² + K s^{3/2}) and
the mean exit time has the closed form

    T̃(x) = (2/K) √((b-x)/π) + (v/K²) [e^{K²(b-x)/v²} Erfc(K√(b-x)/v) - 1]

The product e^{z²}Erfc(z) is evaluated as scipy's erfcx.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate, special

from ctrwexit.distributions import (
    ExponentialWaiting,
    OneSidedStableJumps,
    ProcessSpec,
    WaitingTimeModel,
)
from ctrwexit.exceptions import DomainError, ModelError, SingularityError
from ctrwexit.laplace import LaplaceFunction, invert

logger = logging.getLogger(__name__)

SURVIVAL_ARGUMENTS = ("density", "printed")


@dataclass(frozen=True)
class ContinuumSpec:
    """Drift v, boundary b, limit constant K = lim k/μ and start position x."""

    drift: float
    boundary: float
    k_limit: float
    position: float = 0.0

    def __post_init__(self) -> None:
        for name in ("drift", "boundary", "k_limit"):
            value = getattr(self, name)
            if not (value > 0) or not math.isfinite(value):
                raise ModelError(f"{name} must be positive and finite, got {value}", parameter=name)
        if not (0.0 <= self.position <= self.boundary):
            raise DomainError(
                f"Position x={self.position} lies outside [0, {self.boundary}]",
                value=self.position,
            )

    @property
    def distance(self) -> float:
        return self.boundary - self.position

    @property
    def drift_exit_time(self) -> float:
        """(b - x)/v, when drift alone reaches b."""
        return self.distance / self.drift


@dataclass(frozen=True)
class PropagatorValue:
    exact: complex
    limit: complex


def propagator_double_laplace(
    k: float,
    mu: float,
    s1: complex,
    s2: complex,
    waiting: WaitingTimeModel | None = None,
) -> PropagatorValue:
    """p̂(s₁, s₂) = [1 - ψ̂(s₂)] / (s₂ [1 - ψ̂(s₂) ĥ(s₁)]); small-μ limit too.

    The limit form is μ/(μs₂ + k√s₁). ĥ is the one-sided stable law of
    scale k; ψ defaults to exponential with mean μ.

    Raises:
        DomainError: Unless Re(s₁) > 0 and Re(s₂) > 0
        SingularityError: If the denominator vanishes
    """
    if not (complex(s1).real > 0 and complex(s2).real > 0):
        raise DomainError(
            f"Propagator needs Re(s₁), Re(s₂) > 0, got {s1}, {s2}", value=(s1, s2)
        )
    if not (k > 0 and mu > 0):
        raise ModelError(f"Scale k and mean μ must be positive, got {k}, {mu}")
    psi_model = waiting if waiting is not None else ExponentialWaiting(1.0 / mu)
    psi = complex(psi_model.laplace(s2))
    h = complex(OneSidedStableJumps(k).laplace(s1))
    denominator = 1.0 - psi * h
    if abs(denominator) < 1e-12:
        raise SingularityError(
            "Propagator denominator vanishes", point=complex(s2), method="propagator"
        )
    exact = (1.0 - psi) / (s2 * denominator)
    limit = mu / (mu * s2 + k * np.sqrt(complex(s1)))
    return PropagatorValue(complex(exact), complex(limit))


def stable_density(u: ArrayLike, t: float, k_limit: float) -> np.ndarray:
    """p(u, t) = Kt / (2√(πu³)) e^{-K²t²/(4u)}, the position density of the limit process."""
    arr = np.asarray(u, dtype=float)
    safe = np.where(arr > 0, arr, 1.0)
    scale = k_limit * t
    value = scale / (2.0 * np.sqrt(np.pi * safe**3)) * np.exp(-(scale**2) / (4.0 * safe))
    return np.where(arr > 0, value, 0.0)[()]  # type: ignore[no-any-return]


def survival_probability(
    spec: ContinuumSpec, t: ArrayLike, argument: str = "density"
) -> np.ndarray:
    """Π_b(x, t), the probability of still being inside at time t.

    ``argument="density"`` uses Erfc(Kt / (2√(b-x-vt))), which is the
    integral of p(u, t) over (0, b-x-vt). ``argument="printed"`` evaluates
    Erfc(K²t² / (2√(b-x-vt))) and is kept for comparison only.

    Raises:
        DomainError: If t < 0 or the argument form is unknown
    """
    if argument not in SURVIVAL_ARGUMENTS:
        raise DomainError(f"Unknown survival argument '{argument}'", value=argument)
    times = np.asarray(t, dtype=float)
    if np.any(times < 0):
        raise DomainError("Survival probability needs t >= 0", value=float(np.min(times)))
    window = spec.distance - spec.drift * times
    inside = window > 0
    root = np.sqrt(np.where(inside, window, 1.0))
    if argument == "density":
        z = spec.k_limit * times / (2.0 * root)
    else:
        z = (spec.k_limit * times) ** 2 / (2.0 * root)
    return np.where(inside, special.erfc(z), 0.0)[()]  # type: ignore[no-any-return]


def survival_probability_by_quadrature(spec: ContinuumSpec, t: float) -> float:
    """Π_b(x, t) = ∫₀^{b-x-vt} p(u, t) du by adaptive quadrature."""
    if t < 0:
        raise DomainError(f"Survival probability needs t >= 0, got {t}", value=t)
    window = spec.distance - spec.drift * t
    if window <= 0:
        return 0.0
    if t == 0:
        return 1.0
    value, error = integrate.quad(
        lambda u: float(stable_density(u, t, spec.k_limit)),
        0.0,
        window,
        epsabs=1e-13,
        epsrel=1e-12,
    )
    logger.debug("Survival quadrature at t=%.6g: %.12g (error %.2g)", t, value, error)
    return float(value)


def mean_exit_continuum(spec: ContinuumSpec) -> float:
    """Closed-form mean exit time of the continuum limit."""
    y = spec.distance
    if y == 0:
        return 0.0
    K, v = spec.k_limit, spec.drift
    z = K * math.sqrt(y) / v
    return float((2.0 / K) * math.sqrt(y / math.pi) + (v / K**2) * (special.erfcx(z) - 1.0))


def continuum_transform(spec: ContinuumSpec) -> LaplaceFunction:
    """1 / (v s² + K s^{3/2}) with the principal branch of √s."""
    v, K = spec.drift, spec.k_limit

    def evaluate(s: np.ndarray) -> np.ndarray:
        return 1.0 / (v * s**2 + K * s * np.sqrt(s))

    return LaplaceFunction(evaluate, abscissa=0.0)


def mean_exit_continuum_via_inversion(spec: ContinuumSpec, method: str = "talbot") -> float:
    """Mean exit time by numerical inversion of the branch-cut transform at b - x."""
    if spec.distance == 0:
        return 0.0
    return float(invert(continuum_transform(spec), spec.distance, method))


def mean_exit_by_survival(spec: ContinuumSpec) -> float:
    """∫₀^{(b-x)/v} Π_b(x, t) dt, the mean exit time from the survival probability."""
    horizon = spec.drift_exit_time
    if horizon == 0:
        return 0.0
    value, _ = integrate.quad(
        lambda t: float(survival_probability(spec, t)),
        0.0,
        horizon,
        epsabs=1e-12,
        epsrel=1e-11,
        limit=200,
    )
    return float(value)


def approximating_process(spec: ContinuumSpec, mu: float) -> ProcessSpec:
    """Discrete walk with exponential waiting (mean μ) and stable jumps of scale Kμ.

    The interval is (0, b - x), so the discrete walk starts from 0.
    """
    if not (mu > 0):
        raise ModelError(f"Mean waiting time must be positive, got {mu}", parameter="mu")
    return ProcessSpec(
        drift=spec.drift,
        boundary=spec.distance,
        waiting=ExponentialWaiting(1.0 / mu),
        jumps=OneSidedStableJumps(spec.k_limit * mu),
    )
