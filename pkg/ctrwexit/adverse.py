"""Mean exit times with positive drift and negative jumps.

Jump sizes u > 0 are subtracted from the position, so the walk can leave
(0, b) through b by drifting, or through 0 by a jump. The after-jump mean
exit time solves

    T̃(x) = ∫₀^ϱ [1 - Ψ(l)] dl + (1/v) ∫ₓᵇ ψ((z-x)/v) ∫₀ᶻ h(u) T̃(z-u) du dz

For Erlang-2 waiting times this turns into a second-order
integro-differential equation with T̃(b) = 0 and T̃'(b) = -1/v; with
exponential jumps its transform in x is rational.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy import signal

from ctrwexit.distributions import (
    ErlangWaiting,
    ExponentialJumps,
    ProcessSpec,
    is_erlang,
    is_plain_exponential_jumps,
    require_mean,
)
from ctrwexit.exceptions import DomainError, RegimeError
from ctrwexit.laplace import ResidueExpansion, partial_fractions
from ctrwexit.nystrom import DEFAULT_POINTS, ExitTimeTable, NystromSolver, observed_from_table
from ctrwexit.renewal import ExcessLifeLaw, excess_life
from ctrwexit.sentinels import (
    INFINITE,
    ObservationTime,
    Sentinel,
    check_observation_time,
    is_steady_state,
)

logger = logging.getLogger(__name__)

METHODS = ("auto", "closed-form", "integral-equation")

# Relative size of λ - 2γv below which the root ξ₋ is taken to sit at 0
_COLLAPSE_TOLERANCE = 1e-12


def require_adverse(spec: ProcessSpec, allow_ruin: bool = False) -> None:
    if spec.regime != "adverse":
        raise RegimeError(
            f"Negative-jump formulas do not apply to the {spec.regime} regime",
            regime=spec.regime,
            required="adverse",
        )
    if spec.drift <= 0:
        raise RegimeError("Without drift the walk cannot reach b", regime="v=0", required="v>0")
    if spec.is_ruin_problem and not allow_ruin:
        raise RegimeError(
            "For b = ∞ only the mean ruin time is available (ruin_mean_time)",
            regime="ruin",
            required="finite b",
        )


def adverse_rates(rate: float, gamma: float, drift: float) -> tuple[float, float]:
    """ξ± = λ/v - γ/2 ± (γ/2)√(1 + 4λ/(γv))."""
    centre = rate / drift - 0.5 * gamma
    spread = 0.5 * gamma * math.sqrt(1.0 + 4.0 * rate / (gamma * drift))
    return centre + spread, centre - spread


def adverse_transform_parts(
    rate: float, gamma: float, drift: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Numerators N₀, N_A, N_B and the common denominator of the transform in x.

    T̂(s) = [N₀(s) + A N_A(s) + B N_B(s)] / D(s), with A = T̃(0), B = T̃'(0).
    """
    v = drift
    constant = rate * (rate - 2.0 * gamma * v)
    if abs(rate - 2.0 * gamma * v) <= _COLLAPSE_TOLERANCE * rate:
        constant = 0.0
    denominator = np.array([v * v, v * (gamma * v - 2.0 * rate), constant, 0.0, 0.0])
    particular = np.array([2.0 * rate, 2.0 * rate * gamma])
    at_zero = np.array([v * v, gamma * v * v - 2.0 * rate * v, -2.0 * rate * gamma * v, 0.0])
    slope_at_zero = np.array([v * v, gamma * v * v, 0.0])
    return particular, at_zero, slope_at_zero, denominator


@dataclass(frozen=True)
class AdverseClosedForm:
    """T̃(x) = G₀(x) + A G_A(x) + B G_B(x) with A, B fitted to the boundary at b."""

    particular: ResidueExpansion
    at_zero: ResidueExpansion
    slope_at_zero: ResidueExpansion
    value_at_zero: float
    slope: float

    def __call__(self, x: ArrayLike) -> np.ndarray:
        return self.derivative(x, 0)

    def derivative(self, x: ArrayLike, order: int = 1) -> np.ndarray:
        return (
            self.particular.derivative(x, order)
            + self.value_at_zero * self.at_zero.derivative(x, order)
            + self.slope * self.slope_at_zero.derivative(x, order)
        )


def fit_closed_form(spec: ProcessSpec) -> AdverseClosedForm:
    """Invert the rational transform and impose T̃(b) = 0, T̃'(b) = -1/v.

    Raises:
        RegimeError: Unless waiting times are Erlang-2 and jumps plain exponential
    """
    require_adverse(spec)
    if not (is_erlang(spec.waiting, 2) and is_plain_exponential_jumps(spec.jumps, -1)):
        raise RegimeError(
            "The adverse closed form needs Erlang-2 waiting times and exponential jumps",
            regime=f"{spec.waiting.kind}/{spec.jumps.kind}",
            required="erlang-2/exponential-negative",
        )
    assert isinstance(spec.waiting, ErlangWaiting)
    assert isinstance(spec.jumps, ExponentialJumps)
    particular, at_zero, slope_at_zero, denominator = adverse_transform_parts(
        spec.waiting.rate, spec.jumps.rate, spec.drift
    )
    g0 = partial_fractions(particular, denominator)
    ga = partial_fractions(at_zero, denominator)
    gb = partial_fractions(slope_at_zero, denominator)

    b = spec.boundary
    system = np.array([[ga(b), gb(b)], [ga.derivative(b), gb.derivative(b)]], dtype=float)
    rhs = np.array([-g0(b), -1.0 / spec.drift - g0.derivative(b)], dtype=float)
    try:
        value_at_zero, slope = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as e:
        raise RegimeError(
            f"Boundary conditions do not determine T̃(0), T̃'(0): {e}",
            regime="adverse",
            required="regular boundary fit",
        ) from e
    logger.debug("Adverse boundary fit: T̃(0)=%.10g, T̃'(0)=%.10g", value_at_zero, slope)
    return AdverseClosedForm(g0, ga, gb, float(value_at_zero), float(slope))


@dataclass(frozen=True)
class RuinMeanTime:
    """Mean time to fall below 0 with no upper boundary.

    ``value`` is INFINITE when the drift outpaces the jumps on average;
    ``boundary_case`` flags the exact balance 1/μ = γv.
    """

    value: float | Sentinel
    boundary_case: bool = False

    @property
    def is_finite(self) -> bool:
        return not isinstance(self.value, Sentinel)


def ruin_mean_time(spec: ProcessSpec, x: float) -> RuinMeanTime:
    """(1 + γx) / (1/μ - γv), the mean time to ruin from x with b = ∞.

    Exponential jump sizes make the undershoot below 0 exponential(γ), so
    Wald's identity gives the mean number of jumps to ruin. For Erlang-2
    waiting times this is 2(1 + γx)/(λ - 2γv).

    Raises:
        RegimeError: Unless jumps are plain exponential and negative
        DomainError: If x < 0
    """
    require_adverse(spec, allow_ruin=True)
    if not is_plain_exponential_jumps(spec.jumps, -1):
        raise RegimeError(
            "The mean ruin time is known for exponential jumps only",
            regime=spec.jumps.kind,
            required="exponential-negative",
        )
    if not (x >= 0.0) or math.isinf(x):
        raise DomainError(f"Ruin starting point must be finite and >= 0, got {x}", value=x)
    assert isinstance(spec.jumps, ExponentialJumps)
    gamma = spec.jumps.rate
    frequency = 1.0 / require_mean(spec.waiting)
    margin = frequency - gamma * spec.drift
    if abs(margin) <= 1e-12 * frequency:
        logger.debug("Ruin mean time at the balance point 1/μ = γv")
        return RuinMeanTime(INFINITE, boundary_case=True)
    if margin < 0:
        return RuinMeanTime(INFINITE)
    return RuinMeanTime((1.0 + gamma * x) / margin)


class AdverseSolution:
    """Exit-time solver for positive drift and negative jumps.

    The closed form (Erlang-2 waiting, exponential jumps) and the Nyström
    table are built on first use and cached.
    """

    def __init__(self, spec: ProcessSpec, points: int = DEFAULT_POINTS):
        require_adverse(spec)
        self.spec = spec
        self.points = points
        self.rates: tuple[float, float] | None = None
        if self.closed_form_available:
            assert isinstance(spec.waiting, ErlangWaiting)
            assert isinstance(spec.jumps, ExponentialJumps)
            self.rates = adverse_rates(spec.waiting.rate, spec.jumps.rate, spec.drift)
        self.exit_probability_estimates: dict[str, float] = {}
        self._closed_form: AdverseClosedForm | None = None
        self._solver: NystromSolver | None = None
        self._laws: dict[object, ExcessLifeLaw] = {}
        self._tables: dict[tuple[object, str], ExitTimeTable] = {}

    @property
    def closed_form_available(self) -> bool:
        return is_erlang(self.spec.waiting, 2) and is_plain_exponential_jumps(self.spec.jumps, -1)

    @property
    def closed_form(self) -> AdverseClosedForm:
        if self._closed_form is None:
            self._closed_form = fit_closed_form(self.spec)
        return self._closed_form

    @property
    def boundary_constants(self) -> tuple[float, float]:
        """(A, B) = (T̃(0), T̃'(0)) from the closed-form boundary fit."""
        form = self.closed_form
        return form.value_at_zero, form.slope

    def _resolve(self, method: str) -> str:
        if method not in METHODS:
            raise DomainError(
                f"Unknown method '{method}' (expected one of {METHODS})", value=method
            )
        if method == "auto":
            return "closed-form" if self.closed_form_available else "integral-equation"
        return method

    def after_jump_table(self, method: str = "auto") -> ExitTimeTable:
        method = self._resolve(method)
        key = ("after-jump", method)
        if key not in self._tables:
            if method == "closed-form":
                positions = np.linspace(0.0, self.spec.boundary, self.points)
                values = np.asarray(self.closed_form(positions), dtype=float)
                values[-1] = 0.0
                self._tables[key] = ExitTimeTable(positions, values, "closed-form")
            else:
                if self._solver is None:
                    self._solver = NystromSolver(self.spec, self.points)
                self._tables[key] = self._solver.solve()
        return self._tables[key]

    def mean_exit_after_jump(self, x: float, method: str = "auto") -> float:
        self.spec.check_position(x)
        if x == self.spec.boundary:
            return 0.0
        if self._resolve(method) == "closed-form":
            return float(self.closed_form(x))
        return float(self.after_jump_table(method)(x))

    def excess_life(self, r: ObservationTime) -> ExcessLifeLaw:
        key = "steady" if is_steady_state(r) else float(r)  # type: ignore[arg-type]
        if key not in self._laws:
            self._laws[key] = excess_life(self.spec.waiting, None, r)
        return self._laws[key]

    def observed_table(self, r: ObservationTime, method: str = "auto") -> ExitTimeTable:
        """T(·, r) on the grid from the after-jump table."""
        check_observation_time(r)
        method = self._resolve(method)
        key = ("steady" if is_steady_state(r) else float(r), method)  # type: ignore[arg-type]
        if key not in self._tables:
            law = self.excess_life(r)
            if method == "integral-equation":
                if self._solver is None:
                    self._solver = NystromSolver(self.spec, self.points)
                self._solver.solve()
                self._tables[key] = self._solver.observed(law)
            else:
                self._tables[key] = observed_from_table(
                    self.spec, law, self.closed_form, self.points, method="closed-form"
                )
        return self._tables[key]

    def mean_exit_at(self, x: float, r: ObservationTime, method: str = "auto") -> float:
        check_observation_time(r)
        self.spec.check_position(x)
        if x == self.spec.boundary:
            return 0.0
        if not is_steady_state(r) and float(r) == 0.0:  # type: ignore[arg-type]
            return self.mean_exit_after_jump(x, method)
        return float(self.observed_table(r, method)(x))

    def record_exit_split(self, upper: int, lower: int) -> None:
        """Keep the exit-side fractions of a Monte Carlo cross-check."""
        total = upper + lower
        if total <= 0:
            raise DomainError("Exit split needs at least one exited path", value=total)
        self.exit_probability_estimates = {"upper": upper / total, "lower": lower / total}


def mean_exit_after_jump_adverse(spec: ProcessSpec, x: float, method: str = "auto") -> float:
    """T̃_b(x) for negative jumps.

    Raises:
        DomainError: If x lies outside [0, b]
        RegimeError: If the jumps can be positive, v = 0 or b = ∞
        DiscretizationError: If the Nyström system is singular
    """
    return AdverseSolution(spec).mean_exit_after_jump(x, method)


def mean_exit_at_adverse(
    spec: ProcessSpec, x: float, r: ObservationTime, method: str = "auto"
) -> float:
    """T_b(x, r) for negative jumps."""
    return AdverseSolution(spec).mean_exit_at(x, r, method)


def integro_differential_residual(
    spec: ProcessSpec,
    solution: ExitTimeTable | AdverseClosedForm,
    points: int = 201,
    nodes: int = 64,
) -> float:
    """Sup-norm residual of the Erlang-2 integro-differential equation.

        T'' - (2λ/v) T' + (λ²/v²) T - 2λ/v² - (λ²/v²) ∫₀ˣ h(u) T(x-u) du

    Tables are differentiated with centered differences and convolved with
    the trapezoid rule on their own grid. A closed form is differentiated
    exactly and convolved with Gauss-Legendre quadrature at ``points``
    interior positions.

    Raises:
        RegimeError: Unless waiting times are Erlang-2
    """
    require_adverse(spec)
    if not is_erlang(spec.waiting, 2):
        raise RegimeError(
            "The integro-differential form holds for Erlang-2 waiting times only",
            regime=spec.waiting.kind,
            required="erlang-2",
        )
    assert isinstance(spec.waiting, ErlangWaiting)
    lam = spec.waiting.rate
    v = spec.drift

    def size_density(u: np.ndarray) -> np.ndarray:
        return np.asarray(spec.jumps.pdf(-u), dtype=float)

    if isinstance(solution, ExitTimeTable):
        x = solution.positions
        t = solution.values
        h = solution.step
        kernel = size_density(x)
        convolution = signal.fftconvolve(kernel, t)[: x.size] * h
        convolution -= 0.5 * h * (kernel[0] * t + kernel * t[0])
        first = (t[2:] - t[:-2]) / (2.0 * h)
        second = (t[2:] - 2.0 * t[1:-1] + t[:-2]) / h**2
        value = t[1:-1]
        convolution = convolution[1:-1]
    else:
        x = np.linspace(0.0, spec.boundary, points)[1:-1]
        value = np.asarray(solution(x), dtype=float)
        first = np.asarray(solution.derivative(x, 1), dtype=float)
        second = np.asarray(solution.derivative(x, 2), dtype=float)
        unit, weights = np.polynomial.legendre.leggauss(nodes)
        sizes = 0.5 * (unit[None, :] + 1.0) * x[:, None]
        integrand = size_density(sizes) * np.asarray(solution(x[:, None] - sizes), dtype=float)
        convolution = 0.5 * x * (integrand @ weights)

    residual = (
        second
        - (2.0 * lam / v) * first
        + (lam / v) ** 2 * value
        - 2.0 * lam / v**2
        - (lam / v) ** 2 * convolution
    )
    return float(np.max(np.abs(residual)))
