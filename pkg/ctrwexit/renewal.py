"""Renewal function m(t) and the excess-life law Φ(t|r).

m(t) is the expected number of jumps in [0, t]; it solves the Volterra
equation m = Ψ + m * ψ. The excess life E_r is the time from an arbitrary
observation instant r to the next jump; its law drives every "observed at
time r" correction in the exit-time solvers.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate
from scipy.interpolate import CubicSpline

from ctrwexit.distributions import (
    ComplexArray,
    ErlangWaiting,
    FloatArray,
    JumpModel,
    PiecewiseLinearDensity,
    WaitingTimeModel,
    is_erlang,
)
from ctrwexit.exceptions import (
    CoverageError,
    DomainError,
    ModelError,
    NumericalFailureError,
    RegimeError,
    UnsupportedOperationError,
)
from ctrwexit.sentinels import (
    STEADY_STATE,
    ObservationTime,
    check_observation_time,
    is_steady_state,
)

logger = logging.getLogger(__name__)

SOURCES = ("volterra-numeric", "closed-form-erlang2", "closed-form-poisson")

# Evaluation chunk for (t, history-node) products
_CHUNK_ELEMENTS = 2_000_000


def _unwrap(values: np.ndarray) -> FloatArray:
    return values[()]  # type: ignore[no-any-return]


@dataclass(frozen=True, eq=False)
class RenewalSolution:
    """Renewal function sampled on a uniform grid t_i = iΔt."""

    grid: FloatArray
    values: FloatArray
    step: float
    source: str

    def __post_init__(self) -> None:
        if self.source not in SOURCES:
            raise ValueError(f"Unknown renewal source '{self.source}'")
        self.grid.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def horizon(self) -> float:
        return float(self.grid[-1])

    def covers(self, t: float) -> bool:
        return t <= self.horizon * (1.0 + 1e-12) + 1e-14

    def require(self, t: float) -> None:
        if not self.covers(t):
            raise CoverageError(
                f"Renewal solution covers [0, {self.horizon:.6g}] but t={t:.6g} is needed",
                horizon=self.horizon,
                required=t,
            )

    def __call__(self, t: ArrayLike) -> FloatArray:
        arr = np.asarray(t, dtype=float)
        if arr.size:
            self.require(float(np.max(arr)))
        return _unwrap(np.interp(arr, self.grid, self.values))

    def stieltjes_nodes(self, lower: float, upper: float) -> tuple[FloatArray, FloatArray]:
        """Nodes t′ and weights w with Σ w g(t′) ≈ ∫_lower^upper g(t′) dm(t′).

        Weights are trapezoid-consistent: half of each adjacent increment
        m(t_{i+1}) - m(t_i).
        """
        self.require(upper)
        if upper <= lower:
            return np.zeros(0), np.zeros(0)
        inner = self.grid[(self.grid > lower) & (self.grid < upper)]
        nodes = np.concatenate(([lower], inner, [upper]))
        increments = np.diff(np.interp(nodes, self.grid, self.values))
        weights = np.zeros_like(nodes)
        weights[:-1] += 0.5 * increments
        weights[1:] += 0.5 * increments
        return nodes, weights


def solve_renewal_numeric(
    waiting: WaitingTimeModel | JumpModel, horizon: float, step: float
) -> RenewalSolution:
    """Solve m(t) = Ψ(t) + ∫₀ᵗ m(t - t′) dΨ(t′) on [0, horizon].

    Any law on [0, ∞) with a CDF and a partial first moment works, including
    positive jump-size laws (the renewal count of the jump sizes).

    Product integration: m is linear between grid points and each cell is
    integrated exactly against Ψ (using the partial first moment), which
    keeps the scheme second order for any waiting-time law.
    """
    if not (step > 0) or not math.isfinite(step):
        raise DomainError(f"Renewal step must be positive, got {step}", value=step)
    if not (horizon >= step) or not math.isfinite(horizon):
        raise DomainError(f"Renewal horizon must be >= step, got {horizon}", value=horizon)

    count = int(math.ceil(horizon / step - 1e-9))
    grid = step * np.arange(count + 1, dtype=float)
    cdf = np.asarray(waiting.cdf(grid), dtype=float)
    moment = np.asarray(waiting.partial_first_moment(grid), dtype=float)
    if not np.all(np.isfinite(cdf)) or np.any(np.diff(cdf) < -1e-12) or cdf[-1] > 1.0 + 1e-8:
        raise ModelError(
            f"Waiting-time CDF of '{waiting.kind}' is not a distribution on [0, {horizon}]",
            details={"final_cdf": float(cdf[-1])},
        )

    d_cdf = np.diff(cdf)
    upper = (np.diff(moment) - grid[:-1] * d_cdf) / step
    upper = np.clip(upper, 0.0, d_cdf)
    kernel = np.zeros(count + 1)
    kernel[:-1] += d_cdf - upper
    kernel[1:] += upper

    values = np.zeros(count + 1)
    diagonal = 1.0 - kernel[0]
    for i in range(1, count + 1):
        values[i] = (cdf[i] + np.dot(kernel[1:i], values[i - 1 : 0 : -1])) / diagonal

    logger.debug("Volterra renewal solve: %d steps of %.3g (%s)", count, step, waiting.kind)
    return RenewalSolution(grid, values, float(step), "volterra-numeric")


def renewal_erlang2(rate: float, t: ArrayLike) -> FloatArray:
    """m(t) = (2λt + e^{-2λt} - 1)/4 for Erlang(λ, 2) waiting times."""
    if not rate > 0:
        raise ModelError(f"Erlang rate must be positive, got {rate}", parameter="rate")
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise DomainError("Renewal function is defined for t >= 0")
    x = 2.0 * rate * arr
    return _unwrap((x + np.expm1(-x)) / 4.0)


def solve_renewal(
    waiting: WaitingTimeModel, horizon: float, step: float | None = None
) -> RenewalSolution:
    """Closed form when one is known (Poisson, Erlang-2), Volterra solve otherwise."""
    if step is None:
        step = default_step(waiting)
    count = int(math.ceil(horizon / step - 1e-9))
    grid = step * np.arange(count + 1, dtype=float)
    if is_erlang(waiting, 1):
        assert isinstance(waiting, ErlangWaiting)
        return RenewalSolution(grid, waiting.rate * grid, step, "closed-form-poisson")
    if is_erlang(waiting, 2):
        assert isinstance(waiting, ErlangWaiting)
        values = np.asarray(renewal_erlang2(waiting.rate, grid), dtype=float)
        return RenewalSolution(grid, values, step, "closed-form-erlang2")
    return solve_renewal_numeric(waiting, horizon, step)


def default_step(waiting: WaitingTimeModel) -> float:
    return waiting.mean / 2000.0


def renewal_laplace(waiting: WaitingTimeModel, s: ArrayLike) -> ComplexArray:
    """m̂(s) = ψ̂(s) / (s(1 - ψ̂(s)))."""
    s_arr = np.asarray(s, dtype=complex)
    psi = np.asarray(waiting.laplace(s_arr))
    return _unwrap(psi / (s_arr * (1.0 - psi)))


# ---------------------------------------------------------------------------
# Excess life
# ---------------------------------------------------------------------------


class ExcessLifeLaw(ABC):
    """Law of E_r, the time from r to the next jump.

    Implements the SojournLaw interface, so the integral-equation solvers
    accept it wherever they accept a waiting-time model.
    """

    kind = "excess-life"

    def __init__(self, r: ObservationTime, time_scale: float):
        self.r = r
        self.time_scale = time_scale

    @abstractmethod
    def cdf(self, t: ArrayLike) -> FloatArray:
        """Φ(t|r)."""

    @abstractmethod
    def pdf(self, t: ArrayLike) -> FloatArray:
        """φ(t|r)."""

    @abstractmethod
    def laplace(self, s: ArrayLike) -> ComplexArray:
        """φ̂(s|r)."""

    @abstractmethod
    def integrated_survival(self, t: ArrayLike) -> FloatArray:
        """∫₀ᵗ [1 - Φ(l|r)] dl."""

    @property
    @abstractmethod
    def mean(self) -> float:
        """μ_r = E[E_r]."""

    @property
    def second_moment(self) -> float:
        return 2.0 * survival_integral(self, power=1)

    def survival(self, t: ArrayLike) -> FloatArray:
        return _unwrap(1.0 - np.asarray(self.cdf(t)))

    def partial_first_moment(self, t: ArrayLike) -> FloatArray:
        arr = np.maximum(np.asarray(t, dtype=float), 0.0)
        return _unwrap(
            np.asarray(self.integrated_survival(arr)) - arr * np.asarray(self.survival(arr))
        )

    def mean_by_quadrature(self) -> float:
        return survival_integral(self, power=0)

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        raise UnsupportedOperationError(
            f"Excess-life law '{self.kind}' has no direct sampler; "
            "use ctrwexit.montecarlo.sample_excess_life",
            operation="sample",
        )


def survival_integral(law: ExcessLifeLaw, power: int = 0, tolerance: float = 1e-10) -> float:
    """∫₀^∞ t^power [1 - Φ(t|r)] dt.

    The integral is truncated where the survival drops below ``tolerance``;
    the remainder is bounded by an exponential majorant fitted on the last
    tenth of the truncated range.
    """
    horizon = 10.0 * law.time_scale
    for _ in range(40):
        if float(law.survival(horizon)) < tolerance:
            break
        horizon *= 2.0
    else:
        raise NumericalFailureError(
            "Excess-life survival does not decay", method="survival-integral",
            diagnostics={"horizon": horizon},
        )

    points = 4097
    t = np.linspace(0.0, horizon, points)
    surv = np.asarray(law.survival(t), dtype=float)
    body = float(integrate.simpson(t**power * surv, x=t))

    start = int(0.9 * (points - 1))
    head, last = surv[start], surv[-1]
    tail = 0.0
    if last > 0 and head > last:
        decay = math.log(head / last) / (t[-1] - t[start])
        tail = last / decay if power == 0 else last * (t[-1] / decay + 1.0 / decay**2)
    return body + tail


class MixtureExcessLife(ExcessLifeLaw):
    """E_r as a finite mixture of Erlang(λ, k) laws (Erlang waiting times)."""

    kind = "erlang-mixture"

    def __init__(self, r: ObservationTime, rate: float, weights: Sequence[float]):
        probs = np.clip(np.asarray(weights, dtype=float), 0.0, None)
        total = probs.sum()
        if not total > 0:
            raise ModelError("Excess-life mixture weights sum to zero")
        if abs(total - 1.0) > 1e-6:
            logger.debug("Renormalizing excess-life weights (sum %.10f)", total)
        self.weights = probs / total
        self.rate = float(rate)
        self.components = [ErlangWaiting(rate, k) for k in range(1, probs.size + 1)]
        super().__init__(r, time_scale=probs.size / rate)

    def __repr__(self) -> str:
        return f"MixtureExcessLife(r={self.r!r}, rate={self.rate}, weights={self.weights.tolist()})"

    def _combine(self, method: Callable[[ErlangWaiting], np.ndarray]) -> np.ndarray:
        total: np.ndarray | float = 0.0
        for weight, comp in zip(self.weights, self.components, strict=True):
            if weight > 0:
                total = total + weight * np.asarray(method(comp))
        return np.asarray(total)

    def cdf(self, t: ArrayLike) -> FloatArray:
        return _unwrap(self._combine(lambda c: c.cdf(t)))

    def pdf(self, t: ArrayLike) -> FloatArray:
        return _unwrap(self._combine(lambda c: c.pdf(t)))

    def laplace(self, s: ArrayLike) -> ComplexArray:
        return _unwrap(self._combine(lambda c: c.laplace(s)))

    def integrated_survival(self, t: ArrayLike) -> FloatArray:
        return _unwrap(self._combine(lambda c: c.integrated_survival(t)))

    def partial_first_moment(self, t: ArrayLike) -> FloatArray:
        return _unwrap(self._combine(lambda c: c.partial_first_moment(t)))

    @property
    def mean(self) -> float:
        return float(sum(w * c.mean for w, c in zip(self.weights, self.components, strict=True)))

    @property
    def second_moment(self) -> float:
        return float(
            sum(w * c.second_moment for w, c in zip(self.weights, self.components, strict=True))
        )

    def rational(self) -> tuple[np.ndarray, np.ndarray]:
        """φ̂(s|r) as (numerator, denominator) coefficients in s, highest power first."""
        n = len(self.components)
        lam = self.rate
        numerator = np.zeros(1)
        for k, weight in enumerate(self.weights, start=1):
            # w_k λᵏ (s + λ)ⁿ⁻ᵏ on plain coefficient arrays
            term = float(weight) * lam**k * np.poly(np.full(n - k, -lam))
            numerator = np.polyadd(numerator, term)
        denominator = np.poly(np.full(n, -lam))
        return numerator, denominator

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        shapes = rng.choice(np.arange(1, self.weights.size + 1), size=size, p=self.weights)
        return rng.gamma(shapes, 1.0 / self.rate)


class RenewalExcessLife(ExcessLifeLaw):
    """E_r for a general waiting-time law, by Stieltjes quadrature against dm.

    Uses the history form 1 - Φ(t|r) = 1 - Ψ(r+t) + ∫₀ʳ [1 - Ψ(r+t-t′)] dm(t′),
    which needs the renewal function on [0, r] only.
    """

    kind = "renewal-quadrature"

    def __init__(self, waiting: WaitingTimeModel, renewal: RenewalSolution, r: float):
        renewal.require(r)
        super().__init__(r, time_scale=waiting.mean)
        self.waiting = waiting
        self.renewal = renewal
        starts, weights = renewal.stieltjes_nodes(0.0, r)
        # ages r - t′ of the last jump, plus the origin term with unit weight
        self._ages = np.concatenate(([r], r - starts))
        self._weights = np.concatenate(([1.0], weights))

    def _history(self, func: Callable[[np.ndarray], np.ndarray], t: ArrayLike) -> FloatArray:
        arr = np.asarray(t, dtype=float)
        flat = arr.reshape(-1)
        out = np.empty_like(flat)
        chunk = max(1, _CHUNK_ELEMENTS // self._ages.size)
        for start in range(0, flat.size, chunk):
            block = flat[start : start + chunk]
            values = np.asarray(func(self._ages[None, :] + block[:, None]), dtype=float)
            out[start : start + chunk] = values @ self._weights
        return _unwrap(out.reshape(arr.shape))

    def cdf(self, t: ArrayLike) -> FloatArray:
        arr = np.asarray(t, dtype=float)
        surv = np.asarray(self._history(self.waiting.survival, np.maximum(arr, 0.0)))
        return _unwrap(np.where(arr <= 0, 0.0, np.clip(1.0 - surv, 0.0, 1.0)))

    def pdf(self, t: ArrayLike) -> FloatArray:
        arr = np.asarray(t, dtype=float)
        dens = np.asarray(self._history(self.waiting.pdf, np.maximum(arr, 0.0)))
        return _unwrap(np.where(arr < 0, 0.0, dens))

    def integrated_survival(self, t: ArrayLike) -> FloatArray:
        arr = np.maximum(np.asarray(t, dtype=float), 0.0)
        base = np.asarray(self.waiting.integrated_survival(self._ages)) @ self._weights
        shifted = np.asarray(self._history(self.waiting.integrated_survival, arr))
        return _unwrap(shifted - base)

    def forward_cdf(self, t: ArrayLike) -> FloatArray:
        """Φ(t|r) = ∫_r^{r+t} [1 - Ψ(r+t-t′)] dm(t′), needing m up to r + t."""
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(arr)
        for i, value in enumerate(arr):
            if value <= 0:
                out[i] = 0.0
                continue
            nodes, weights = self.renewal.stieltjes_nodes(float(self.r), float(self.r) + value)
            out[i] = np.asarray(self.waiting.survival(float(self.r) + value - nodes)) @ weights
        return _unwrap(out.reshape(np.shape(t)))

    @property
    def mean(self) -> float:
        # ∫₀^∞ [1 - Ψ(a+t)] dt = μ - ∫₀ᵃ [1 - Ψ]
        tails = self.waiting.mean - np.asarray(self.waiting.integrated_survival(self._ages))
        return float(tails @ self._weights)

    @cached_property
    def _density_table(self) -> PiecewiseLinearDensity:
        horizon = 10.0 * self.time_scale
        while float(self.survival(horizon)) > 1e-10 and horizon < 1e6 * self.time_scale:
            horizon *= 2.0
        t = np.linspace(0.0, horizon, 4097)
        return PiecewiseLinearDensity(t, np.asarray(self.pdf(t)), name="excess-life density")

    def laplace(self, s: ArrayLike) -> ComplexArray:
        return self._density_table.laplace(s)

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        return self._density_table.sample(rng, size)


class SteadyStateExcessLife(ExcessLifeLaw):
    """E_∞ for a general waiting-time law: density [1 - Ψ(t)]/μ."""

    kind = "steady-state"

    def __init__(self, waiting: WaitingTimeModel):
        super().__init__(STEADY_STATE, time_scale=waiting.mean)
        self.waiting = waiting
        horizon = 10.0 * waiting.mean
        while float(waiting.survival(horizon)) > 1e-12 and horizon < 1e6 * waiting.mean:
            horizon *= 2.0
        grid = np.linspace(0.0, horizon, 4097)
        self._horizon = horizon
        self._cumulative = CubicSpline(grid, waiting.integrated_survival(grid)).antiderivative()

    def cdf(self, t: ArrayLike) -> FloatArray:
        arr = np.maximum(np.asarray(t, dtype=float), 0.0)
        return _unwrap(np.asarray(self.waiting.integrated_survival(arr)) / self.waiting.mean)

    def pdf(self, t: ArrayLike) -> FloatArray:
        arr = np.asarray(t, dtype=float)
        value = np.asarray(self.waiting.survival(np.maximum(arr, 0.0))) / self.waiting.mean
        return _unwrap(np.where(arr < 0, 0.0, value))

    def laplace(self, s: ArrayLike) -> ComplexArray:
        return steady_state_laplace(self.waiting, s)

    def integrated_survival(self, t: ArrayLike) -> FloatArray:
        arr = np.maximum(np.asarray(t, dtype=float), 0.0)
        capped = np.minimum(arr, self._horizon)
        area = np.asarray(self._cumulative(capped)) + self.waiting.mean * (arr - capped)
        return _unwrap(arr - area / self.waiting.mean)

    @property
    def mean(self) -> float:
        return self.waiting.second_moment / (2.0 * self.waiting.mean)


def steady_state_laplace(waiting: WaitingTimeModel, s: ArrayLike) -> ComplexArray:
    """φ̂(s|∞) = (1 - ψ̂(s)) / (sμ)."""
    s_arr = np.asarray(s, dtype=complex)
    if np.any(s_arr == 0):
        raise DomainError("Steady-state excess-life transform needs s != 0 (value 1 at s = 0)")
    return _unwrap((1.0 - np.asarray(waiting.laplace(s_arr))) / (s_arr * waiting.mean))


def erlang_excess_weights(
    waiting: ErlangWaiting, r: ObservationTime, renewal: RenewalSolution | None = None
) -> np.ndarray:
    """Weights of Erlang(λ, 1..n) in the law of E_r.

    The residual of an Erlang(λ, n) sojourn of age a is a Poisson(λa) thinning
    of its phases, so E_r mixes Erlang(λ, n-k) with weight
    (λ^k/k!) [r^k e^{-λr} + ∫₀ʳ (r-t′)^k e^{-λ(r-t′)} dm(t′)].
    """
    n, lam = waiting.shape, waiting.rate
    weights = np.zeros(n)
    if is_steady_state(r):
        weights[:] = 1.0 / n
        return weights
    r = float(r)  # type: ignore[arg-type]
    if r == 0.0 or n == 1:
        weights[-1] = 1.0
        return weights
    if n == 2:
        stay = 0.5 * (1.0 + math.exp(-2.0 * lam * r))
        weights[:] = (1.0 - stay, stay)
        return weights

    if renewal is None:
        renewal = solve_renewal(waiting, r, default_step(waiting))
    starts, dm = renewal.stieltjes_nodes(0.0, r)
    ages = np.concatenate(([r], r - starts))
    mass = np.concatenate(([1.0], dm))
    for k in range(n):
        phases = (lam * ages) ** k * np.exp(-lam * ages) / math.factorial(k)
        weights[n - 1 - k] = float(phases @ mass)
    return weights


def excess_life(
    waiting: WaitingTimeModel,
    renewal: RenewalSolution | None,
    r: ObservationTime,
    method: str = "auto",
) -> ExcessLifeLaw:
    """Law of the excess life E_r.

    Args:
        waiting: Sojourn-time law ψ
        renewal: Renewal solution covering [0, r]; solved on demand when None
        r: Observation time, or STEADY_STATE for r = ∞
        method: "auto" uses the Erlang mixture (closed form for n <= 2) when ψ
            is Erlang; "quadrature" forces Stieltjes quadrature against dm

    Raises:
        CoverageError: If the renewal grid ends before r
        DomainError: If r is negative or infinite as a number
    """
    check_observation_time(r)
    if method not in ("auto", "quadrature"):
        raise DomainError(f"Unknown excess-life method '{method}'", value=method)

    if isinstance(waiting, ErlangWaiting) and method == "auto":
        if renewal is not None and not is_steady_state(r):
            renewal.require(float(r))  # type: ignore[arg-type]
        weights = erlang_excess_weights(waiting, r, renewal)
        return MixtureExcessLife(r, waiting.rate, weights)

    if is_steady_state(r):
        return SteadyStateExcessLife(waiting)
    r_value = float(r)  # type: ignore[arg-type]
    if renewal is None:
        renewal = solve_renewal_numeric(
            waiting, max(r_value, default_step(waiting)), default_step(waiting)
        )
    return RenewalExcessLife(waiting, renewal, r_value)


def excess_life_laplace(
    waiting: WaitingTimeModel,
    r: ObservationTime,
    s: ArrayLike,
    renewal: RenewalSolution | None = None,
) -> ComplexArray:
    """φ̂(s|r).

    Erlang waiting times give a rational function of s. Otherwise
    φ̂(s|r) = [1 - ψ̂(s)] ∫_r^∞ e^{-s(l-r)} dm(l): the renewal density seen
    from r, filtered by one sojourn. The integral runs against dm up to the
    end of the renewal grid and continues with the asymptotic density 1/μ.
    """
    check_observation_time(r)
    s_arr = np.asarray(s, dtype=complex)
    if is_steady_state(r):
        return steady_state_laplace(waiting, s_arr)
    r_value = float(r)  # type: ignore[arg-type]
    if r_value == 0.0:
        return _unwrap(np.asarray(waiting.laplace(s_arr)))
    if isinstance(waiting, ErlangWaiting):
        return excess_life(waiting, renewal, r_value).laplace(s_arr)

    if np.any(s_arr.real <= 0):
        raise DomainError(
            "The renewal-density integral diverges for Re(s) <= 0", value=complex(s_arr.flat[0])
        )
    window = 40.0 * waiting.mean
    if renewal is None:
        renewal = solve_renewal_numeric(waiting, r_value + window, default_step(waiting))
    upper = renewal.horizon
    if upper < r_value + window:
        raise CoverageError(
            "Renewal solution too short for the excess-life transform",
            horizon=upper,
            required=r_value + window,
        )
    nodes, weights = renewal.stieltjes_nodes(r_value, upper)
    flat = s_arr.reshape(-1)
    body = np.exp(-np.outer(flat, nodes - r_value)) @ weights
    tail = np.exp(-flat * (upper - r_value)) / (flat * waiting.mean)
    psi = np.asarray(waiting.laplace(flat))
    return _unwrap(((1.0 - psi) * (body + tail)).reshape(s_arr.shape))


def zero_drift_correction(
    waiting: WaitingTimeModel,
    r: ObservationTime,
    tjump: float,
    drift: float = 0.0,
    renewal: RenewalSolution | None = None,
) -> float:
    """T_b(x, r) = T̃_b(x) - μ + μ_r for a walk without drift.

    Raises:
        RegimeError: If drift is nonzero
    """
    if drift != 0.0:
        raise RegimeError(
            f"The additive correction holds only without drift (v={drift})",
            regime="drifting",
            required="v=0",
        )
    check_observation_time(r)
    if not is_steady_state(r) and float(r) == 0.0:  # type: ignore[arg-type]
        return tjump
    law = excess_life(waiting, renewal, r)
    return tjump - waiting.mean + law.mean
