"""Mean exit times when drift and jumps both point toward b.

With positive jumps only, the walk can leave (0, b) only through b, and the
exit time after a jump is a function of the distance y = b - x alone. Its
transform in y is

    F̂(s) = [1 - ψ̂(sv)] / (v s² [1 - ψ̂(sv) ĥ(s)])

and observing at an arbitrary time r replaces the first sojourn law by the
excess-life law, giving Ĵ(s|r). Erlang-2 waiting times with exponential
jumps have closed forms in terms of the two rates z±.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike

from ctrwexit.distributions import (
    ErlangWaiting,
    ExponentialJumps,
    ProcessSpec,
    has_tabulated_law,
    is_erlang,
    is_plain_exponential_jumps,
    require_mean,
)
from ctrwexit.exceptions import DomainError, RegimeError, SingularityError
from ctrwexit.laplace import LaplaceFunction, invert
from ctrwexit.nystrom import DEFAULT_POINTS, ExitTimeTable, NystromSolver, observed_from_table
from ctrwexit.renewal import (
    ExcessLifeLaw,
    excess_life,
    solve_renewal_numeric,
    zero_drift_correction,
)
from ctrwexit.sentinels import ObservationTime, check_observation_time, is_steady_state

logger = logging.getLogger(__name__)

METHODS = ("auto", "closed-form", "transform-inversion", "quadrature", "integral-equation")

# |1 - ψ̂(sv)ĥ(s)| below this counts as a pole
SINGULARITY_THRESHOLD = 1e-12


def require_favorable(spec: ProcessSpec) -> None:
    if spec.regime != "favorable":
        raise RegimeError(
            f"Positive-jump formulas do not apply to the {spec.regime} regime",
            regime=spec.regime,
            required="favorable",
        )
    if spec.is_ruin_problem:
        raise RegimeError(
            "With positive jumps and b = ∞ the walk never exits",
            regime="ruin",
            required="finite b",
        )


def _check_method(method: str) -> None:
    if method not in METHODS:
        raise DomainError(f"Unknown method '{method}' (expected one of {METHODS})", value=method)


def transform_F(spec: ProcessSpec, s: ArrayLike) -> np.ndarray:
    """F̂(s), the transform in y = b - x of the mean exit time after a jump.

    Raises:
        RegimeError: If jumps can be negative or v = 0
        SingularityError: If 1 - ψ̂(sv)ĥ(s) vanishes at s
    """
    require_favorable(spec)
    if spec.drift <= 0:
        raise RegimeError("F̂ degenerates at v = 0", regime="v=0", required="v>0")
    v = spec.drift
    s_arr = np.asarray(s, dtype=complex)
    psi = np.asarray(spec.waiting.laplace(s_arr * v))
    h = np.asarray(spec.jumps.laplace(s_arr))
    denominator = 1.0 - psi * h
    close = (np.abs(denominator) < SINGULARITY_THRESHOLD) | (s_arr == 0)
    if np.any(close):
        point = complex(s_arr[close].flat[0])
        raise SingularityError(
            f"F̂ is singular at s = {point:.6g}", point=point, method="transform_F"
        )
    return ((1.0 - psi) / (v * s_arr**2 * denominator))[()]  # type: ignore[no-any-return]


def erlang_exponential_rational(
    rate: float, shape: int, gamma: float, drift: float
) -> tuple[np.ndarray, np.ndarray]:
    """(numerator, denominator) of F̂ for Erlang(λ, n) waiting and exponential(γ) jumps."""
    lam_n = rate**shape
    phases = np.poly1d([drift, rate]) ** shape
    kept = np.poly1d(np.r_[phases.coeffs[:-1], 0.0])  # (λ + sv)ⁿ - λⁿ
    numerator = kept * np.poly1d([1.0, gamma])
    bracket = phases * np.poly1d([1.0, gamma])
    bracket = np.poly1d(np.r_[bracket.coeffs[:-1], 0.0])  # minus λⁿγ, the constant term
    logger.debug("Rational F̂: λⁿγ = %.6g removed from the constant term", lam_n * gamma)
    denominator = np.poly1d([drift, 0.0, 0.0]) * bracket
    return np.asarray(numerator.coeffs, dtype=float), np.asarray(denominator.coeffs, dtype=float)


def favorable_transform(spec: ProcessSpec) -> LaplaceFunction:
    """F̂ as a LaplaceFunction; rational for Erlang waiting and exponential jumps."""
    require_favorable(spec)
    if isinstance(spec.waiting, ErlangWaiting) and is_plain_exponential_jumps(spec.jumps, 1):
        assert isinstance(spec.jumps, ExponentialJumps)
        num, den = erlang_exponential_rational(
            spec.waiting.rate, spec.waiting.shape, spec.jumps.rate, spec.drift
        )
        return LaplaceFunction.rational(num, den)
    return LaplaceFunction(lambda s: np.asarray(transform_F(spec, s)), abscissa=0.0)


def favorable_rates(rate: float, gamma: float, drift: float) -> tuple[complex, complex]:
    """z± = λ + (γv/2)(1 ± √(1 - 4λ/(γv))), rates of the Erlang-2/exponential form."""
    half = 0.5 * gamma * drift
    root = cmath.sqrt(1.0 - 4.0 * rate / (gamma * drift))
    return complex(rate + half * (1.0 + root)), complex(rate + half * (1.0 - root))


def _divided_difference(
    func: Callable[[complex], np.ndarray],
    slope: Callable[[complex], np.ndarray],
    plus: complex,
    minus: complex,
) -> np.ndarray:
    """[f(z₋) - f(z₊)] / (z₊ - z₋), real-valued for conjugate or real pairs."""
    gap = plus - minus
    if abs(gap) <= 1e-7 * abs(plus):
        return -np.real(slope(0.5 * (plus + minus)))
    if plus.imag != 0.0:
        return -np.imag(func(plus)) / plus.imag
    return np.real(func(minus) - func(plus)) / gap.real


def closed_form_after_jump(rate: float, gamma: float, drift: float, y: ArrayLike) -> np.ndarray:
    """T̃ at distance y = b - x for Erlang(λ, 2) waiting and exponential(γ) jumps."""
    rho = np.asarray(y, dtype=float) / drift
    plus, minus = favorable_rates(rate, gamma, drift)

    def g(z: complex) -> np.ndarray:
        return -np.expm1(-z * rho) / z**2

    def dg(z: complex) -> np.ndarray:
        decay = np.exp(-z * rho)
        return (rho * z * decay + 2.0 * np.expm1(-z * rho)) / z**3

    linear = 2.0 * gamma * drift / (rate + 2.0 * gamma * drift) * rho
    value = linear + rate**2 * _divided_difference(g, dg, plus, minus)
    return value[()]  # type: ignore[no-any-return]


def closed_form_observed(
    rate: float, gamma: float, drift: float, y: ArrayLike, r: ObservationTime
) -> np.ndarray:
    """T at distance y and observation time r, same specialization."""
    rho = np.asarray(y, dtype=float) / drift
    plus, minus = favorable_rates(rate, gamma, drift)
    if is_steady_state(r):
        lost = 0.5
    else:
        lost = -0.5 * math.expm1(-2.0 * rate * float(r))  # type: ignore[arg-type]

    def k(z: complex) -> np.ndarray:
        return -np.expm1(-z * rho) / z

    def dk(z: complex) -> np.ndarray:
        return (rho * z * np.exp(-z * rho) + np.expm1(-z * rho)) / z**2

    tilde = closed_form_after_jump(rate, gamma, drift, y)
    value = tilde - rate * lost * _divided_difference(k, dk, plus, minus)
    return value[()]  # type: ignore[no-any-return]


def driftless_mean_exit(spec: ProcessSpec, x: float) -> float:
    """T̃ for v = 0: one sojourn per jump, and jumps until their sum passes b - x.

    T̃ = μ [1 + m_h(b - x)], m_h the renewal function of the jump sizes.
    """
    spec.check_position(x)
    distance = spec.boundary - x
    if distance == 0:
        return 0.0
    mu = require_mean(spec.waiting)
    if is_plain_exponential_jumps(spec.jumps, 1):
        assert isinstance(spec.jumps, ExponentialJumps)
        return mu * (1.0 + spec.jumps.rate * distance)
    renewal = solve_renewal_numeric(spec.jumps, distance, distance / 4000.0)
    return mu * (1.0 + float(renewal(distance)))


class FavorableSolution:
    """Exit-time solver for a process with positive drift and positive jumps.

    Transforms, closed-form rates and tabulated routes are built once and
    reused across positions and observation times.
    """

    def __init__(
        self, spec: ProcessSpec, points: int = DEFAULT_POINTS, inversion: str | None = None
    ):
        require_favorable(spec)
        self.spec = spec
        self.points = points
        self.tabulated = has_tabulated_law(spec)
        self.inversion = inversion or default_inversion(spec)
        self.transform: LaplaceFunction | None = None
        self.rates: tuple[complex, complex] | None = None
        if spec.drift > 0:
            self.transform = favorable_transform(spec)
        if self.closed_form_available:
            assert isinstance(spec.waiting, ErlangWaiting)
            assert isinstance(spec.jumps, ExponentialJumps)
            self.rates = favorable_rates(spec.waiting.rate, spec.jumps.rate, spec.drift)
        self._laws: dict[object, ExcessLifeLaw] = {}
        self._tables: dict[tuple[object, str], ExitTimeTable] = {}
        self._solver: NystromSolver | None = None

    @property
    def closed_form_available(self) -> bool:
        return (
            self.spec.drift > 0
            and is_erlang(self.spec.waiting, 2)
            and is_plain_exponential_jumps(self.spec.jumps, 1)
        )

    def _params(self) -> tuple[float, float, float]:
        assert isinstance(self.spec.waiting, ErlangWaiting)
        assert isinstance(self.spec.jumps, ExponentialJumps)
        return self.spec.waiting.rate, self.spec.jumps.rate, self.spec.drift

    def _resolve(self, method: str) -> str:
        _check_method(method)
        if method == "closed-form" and not self.closed_form_available:
            raise RegimeError(
                "The closed form needs Erlang-2 waiting times, exponential jumps and v > 0",
                regime=f"{self.spec.waiting.kind}/{self.spec.jumps.kind}",
                required="erlang-2/exponential",
            )
        if method == "auto":
            return "closed-form" if self.closed_form_available else "quadrature"
        return method

    def excess_life(self, r: ObservationTime) -> ExcessLifeLaw:
        key = "steady" if is_steady_state(r) else float(r)  # type: ignore[arg-type]
        if key not in self._laws:
            self._laws[key] = excess_life(self.spec.waiting, None, r)
        return self._laws[key]

    def transform_J(self, r: ObservationTime) -> LaplaceFunction:
        """Ĵ(·|r) as a LaplaceFunction."""
        check_observation_time(r)
        if self.transform is None:
            raise RegimeError("Ĵ degenerates at v = 0", regime="v=0", required="v>0")
        if not is_steady_state(r) and float(r) == 0.0:  # type: ignore[arg-type]
            return self.transform
        law = self.excess_life(r)
        spec = self.spec
        base = self.transform

        def evaluate(s: np.ndarray) -> np.ndarray:
            return _apply_correction(spec, s, base(s), law.laplace(s * spec.drift))

        return LaplaceFunction(evaluate, abscissa=base.abscissa)

    def mean_exit_after_jump(self, x: float, method: str = "auto") -> float:
        spec = self.spec
        spec.check_position(x)
        if spec.drift == 0:
            return driftless_mean_exit(spec, x)
        method = self._resolve(method)
        y = spec.boundary - x
        if y == 0:
            return 0.0
        if method == "closed-form":
            return float(closed_form_after_jump(*self._params(), y))
        if method == "transform-inversion":
            assert self.transform is not None
            return float(invert(self.transform, y, self.inversion))
        return float(self.after_jump_table(method)(x))

    def mean_exit_at(self, x: float, r: ObservationTime, method: str = "auto") -> float:
        check_observation_time(r)
        spec = self.spec
        spec.check_position(x)
        if spec.drift == 0:
            return zero_drift_correction(spec.waiting, r, driftless_mean_exit(spec, x))
        if not is_steady_state(r) and float(r) == 0.0:  # type: ignore[arg-type]
            return self.mean_exit_after_jump(x, method)
        method = self._resolve(method)
        y = spec.boundary - x
        if y == 0:
            return 0.0
        if method == "closed-form":
            return float(closed_form_observed(*self._params(), y, r))
        if method == "transform-inversion":
            return float(invert(self.transform_J(r), y, self.inversion))
        return float(self.observed_table(r, method)(x))

    def after_jump_table(self, method: str = "quadrature") -> ExitTimeTable:
        """T̃ on the grid: closed form or inversion for "quadrature", Nyström otherwise.

        Tabulated laws always take the Nyström route; their transforms are
        piecewise exponential and blow up on the left of the Talbot contour.
        """
        key = ("after-jump", method)
        if key in self._tables:
            return self._tables[key]
        if method == "integral-equation" or self.tabulated:
            table = self._nystrom().solve()
        else:
            positions = np.linspace(0.0, self.spec.boundary, self.points)
            distances = self.spec.boundary - positions
            values = np.zeros_like(positions)
            inside = distances > 0
            if self.closed_form_available:
                values[inside] = closed_form_after_jump(*self._params(), distances[inside])
            else:
                assert self.transform is not None
                values[inside] = invert(self.transform, distances[inside], self.inversion)
            table = ExitTimeTable(positions, values, "transform-inversion")
        logger.debug("Tabulated T̃ by %s on %d points", method, table.positions.size)
        self._tables[key] = table
        return table

    def observed_table(self, r: ObservationTime, method: str = "quadrature") -> ExitTimeTable:
        """T(·, r) on the grid by one application of the exit operator."""
        key = ("steady" if is_steady_state(r) else float(r), method)  # type: ignore[arg-type]
        if key in self._tables:
            return self._tables[key]
        law = self.excess_life(r)
        if method == "integral-equation":
            table = self._nystrom().observed(law)
        else:
            table = observed_from_table(
                self.spec, law, self.after_jump_table("quadrature"), self.points
            )
        self._tables[key] = table
        return table

    def _nystrom(self) -> NystromSolver:
        if self._solver is None:
            self._solver = NystromSolver(self.spec, self.points)
        return self._solver


def default_inversion(spec: ProcessSpec) -> str:
    """Gaver-Stehfest (real s only) for tabulated laws, Talbot otherwise."""
    return "gaver-stehfest" if has_tabulated_law(spec) else "talbot"


def _apply_correction(
    spec: ProcessSpec, s: np.ndarray, base: np.ndarray, phi: np.ndarray
) -> np.ndarray:
    # Ĵ = F̂ - (1 - ĥ) / (v s² (1 - ψ̂ĥ)) [φ̂(sv|r) - ψ̂(sv)]
    v = spec.drift
    psi = np.asarray(spec.waiting.laplace(s * v))
    h = np.asarray(spec.jumps.laplace(s))
    return base - (1.0 - h) / (v * s**2 * (1.0 - psi * h)) * (phi - psi)


def mean_exit_after_jump(spec: ProcessSpec, x: float, method: str = "auto") -> float:
    """T̃_b(x) for positive jumps.

    Raises:
        DomainError: If x lies outside [0, b]
        RegimeError: If the jumps can be negative
    """
    return FavorableSolution(spec).mean_exit_after_jump(x, method)


def transform_J(spec: ProcessSpec, r: ObservationTime, s: ArrayLike) -> np.ndarray:
    """Ĵ(s|r); at r = STEADY_STATE the excess life has density [1 - Ψ]/μ."""
    check_observation_time(r)
    s_arr = np.asarray(s, dtype=complex)
    base = np.asarray(transform_F(spec, s_arr))
    if not is_steady_state(r) and float(r) == 0.0:  # type: ignore[arg-type]
        return base[()]  # type: ignore[no-any-return]
    law = excess_life(spec.waiting, None, r)
    phi = np.asarray(law.laplace(s_arr * spec.drift))
    return _apply_correction(spec, s_arr, base, phi)[()]  # type: ignore[no-any-return]


def mean_exit_at(
    spec: ProcessSpec, x: float, r: ObservationTime, method: str = "auto"
) -> float:
    """T_b(x, r) for positive jumps."""
    return FavorableSolution(spec).mean_exit_at(x, r, method)


def small_v_expansion(
    spec: ProcessSpec, r: ObservationTime, s: ArrayLike, order: int = 1
) -> np.ndarray:
    """Ĵ(s|r) expanded to first order in the drift.

    Ĵ ≈ F̂ - (μ - μ_r)/s + v [ĥ/(1-ĥ) (μ - μ_r) μ - (E[E_r²] - E[τ²])/2]

    Raises:
        ModelError: If the mean waiting time is undefined
        DomainError: If order is not 0 or 1
    """
    if order not in (0, 1):
        raise DomainError(f"Expansion order must be 0 or 1, got {order}", value=order)
    check_observation_time(r)
    mu = require_mean(spec.waiting)
    law = excess_life(spec.waiting, None, r)
    gap = mu - law.mean
    s_arr = np.asarray(s, dtype=complex)
    value = np.asarray(transform_F(spec, s_arr)) - gap / s_arr
    if order == 1:
        h = np.asarray(spec.jumps.laplace(s_arr))
        spread = law.second_moment - spec.waiting.second_moment
        value = value + spec.drift * (h / (1.0 - h) * gap * mu - 0.5 * spread)
    return value[()]  # type: ignore[no-any-return]
