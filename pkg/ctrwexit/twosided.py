"""Mean exit times with jumps of both signs.

The jump law is a mixture h = q h₊ + p h₋. In general the after-jump mean
exit time solves a Fredholm-type equation over the whole interval and is
found by the Nyström solver. When every negative jump is larger than b
("ruin jumps") a negative jump always ends the walk through 0, h₋ drops out,
and in z = sv

    F̂(s) = (v/z) [z² + (2λ+γv)z + 2λγv] / [z³ + (2λ+γv)z² + λ(λ+2γv)z + pλ²γv]

for Erlang-2 waiting times and exponential positive jumps.
"""

from __future__ import annotations

import logging
import math
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike

from ctrwexit.distributions import (
    ErlangWaiting,
    ExponentialJumps,
    MixtureJumps,
    ProcessSpec,
    is_erlang,
    is_plain_exponential_jumps,
    require_mean,
)
from ctrwexit.exceptions import DomainError, NumericalFailureError, RegimeError, SingularityError
from ctrwexit.favorable import (
    SINGULARITY_THRESHOLD,
    closed_form_after_jump,
    default_inversion,
)
from ctrwexit.laplace import LaplaceFunction, ResidueExpansion, invert, partial_fractions
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

METHODS = ("auto", "closed-form", "transform-inversion", "integral-equation")

# Relative tolerance of the λ = γv test
EQUAL_RATES_TOLERANCE = 1e-12


def require_mixture(spec: ProcessSpec) -> MixtureJumps:
    if not isinstance(spec.jumps, MixtureJumps):
        raise RegimeError(
            "Two-sided formulas need a mixture jump law q h₊ + p h₋",
            regime=spec.jumps.kind,
            required="mixture",
        )
    if spec.drift <= 0:
        raise RegimeError("Two-sided solver needs a positive drift", regime="v=0", required="v>0")
    if spec.is_ruin_problem:
        raise RegimeError(
            "Two-sided solver needs a finite boundary", regime="ruin", required="finite b"
        )
    return spec.jumps


def has_ruin_jumps(spec: ProcessSpec) -> bool:
    """True when every negative jump exceeds b in size."""
    jumps = spec.jumps
    if not isinstance(jumps, MixtureJumps) or math.isinf(spec.boundary):
        return False
    return jumps.p == 0.0 or float(jumps.negative.cdf(-spec.boundary)) >= 1.0 - 1e-12


def _require_ruin_jumps(spec: ProcessSpec) -> MixtureJumps:
    jumps = require_mixture(spec)
    if not has_ruin_jumps(spec):
        raise RegimeError(
            "Negative jumps must all lie below -b for the ruin-jump formulas",
            regime="two-sided",
            required="ruin-jumps",
        )
    return jumps


def _closed_form_parameters(spec: ProcessSpec) -> tuple[float, float, float, float] | None:
    """(λ, γ, v, p) when waiting times are Erlang-2 and h₊ is exponential."""
    if not (has_ruin_jumps(spec) and is_erlang(spec.waiting, 2)):
        return None
    assert isinstance(spec.jumps, MixtureJumps)
    if not is_plain_exponential_jumps(spec.jumps.positive, 1):
        return None
    assert isinstance(spec.waiting, ErlangWaiting)
    assert isinstance(spec.jumps.positive, ExponentialJumps)
    return spec.waiting.rate, spec.jumps.positive.rate, spec.drift, spec.jumps.p


def ruin_jump_rational(
    rate: float, gamma: float, drift: float, p: float
) -> tuple[np.ndarray, np.ndarray]:
    """(numerator, denominator) of F̂ in s for the Erlang-2/exponential ruin-jump case."""
    v = drift
    numerator = np.array([v**3, (2.0 * rate + gamma * v) * v**2, 2.0 * rate * gamma * v**2])
    denominator = np.array(
        [
            v**4,
            (2.0 * rate + gamma * v) * v**3,
            rate * (rate + 2.0 * gamma * v) * v**2,
            p * rate**2 * gamma * v**2,
            0.0,
        ]
    )
    return numerator, denominator


def _cubic(rate: float, gamma: float, drift: float, p: float) -> list[float]:
    return [
        1.0,
        2.0 * rate + gamma * drift,
        rate * (rate + 2.0 * gamma * drift),
        p * rate**2 * gamma * drift,
    ]


def cubic_roots(rate: float, gamma: float, drift: float, p: float) -> np.ndarray:
    """Roots z_j of z³ + (2λ+γv)z² + λ(λ+2γv)z + pλ²γv."""
    return np.roots(_cubic(rate, gamma, drift, p))


def ruin_jump_transform(spec: ProcessSpec) -> LaplaceFunction:
    """F̂ for ruin jumps: [1 - ψ̂(sv)] / (v s² [1 - q ψ̂(sv) ĥ₊(s)]).

    Rational for Erlang-2 waiting times with exponential h₊.
    """
    jumps = _require_ruin_jumps(spec)
    params = _closed_form_parameters(spec)
    if params is not None:
        return LaplaceFunction.rational(*ruin_jump_rational(*params))
    v = spec.drift
    q = jumps.q

    def evaluate(s: np.ndarray) -> np.ndarray:
        psi = np.asarray(spec.waiting.laplace(s * v))
        h_plus = np.asarray(jumps.positive.laplace(s)) if q > 0 else 0.0
        return (1.0 - psi) / (v * s**2 * (1.0 - q * psi * h_plus))

    return LaplaceFunction(evaluate, abscissa=0.0)


def transform_F_ruinjump(spec: ProcessSpec, s: ArrayLike) -> np.ndarray:
    """F̂(s) in the ruin-jump case, independent of the law of h₋.

    Raises:
        RegimeError: If some negative jumps land inside (-b, 0)
        SingularityError: At a pole of F̂
    """
    transform = ruin_jump_transform(spec)
    s_arr = np.asarray(s, dtype=complex)
    if transform.is_rational:
        assert transform.denominator is not None
        denominator = np.polyval(np.asarray(transform.denominator), s_arr)
        scale = np.polyval(np.abs(np.asarray(transform.denominator)), np.abs(s_arr))
        close = np.abs(denominator) < SINGULARITY_THRESHOLD * np.maximum(scale, 1.0)
    else:
        close = s_arr == 0
    if np.any(close):
        point = complex(s_arr[close].flat[0])
        raise SingularityError(
            f"Ruin-jump transform is singular at s = {point:.6g}",
            point=point,
            method="transform_F_ruinjump",
        )
    return np.asarray(transform(s_arr))[()]  # type: ignore[no-any-return]


def asymptotic_mean_exit(spec: ProcessSpec) -> float | Sentinel:
    """lim T̃_b as b → ∞: μ/p, i.e. 2/(pλ) for Erlang-2 waiting times.

    Each sojourn ends in a ruin jump with probability p, so the walk makes
    1/p sojourns on average. INFINITE when p = 0.
    """
    jumps = spec.jumps
    if not isinstance(jumps, MixtureJumps):
        raise RegimeError(
            "The large-b limit needs a mixture jump law", regime=jumps.kind, required="mixture"
        )
    if jumps.p == 0.0:
        return INFINITE
    return require_mean(spec.waiting) / jumps.p


def equal_rates_roots(rate: float, q: float) -> np.ndarray:
    """z_j = λ(q^{1/3} e^{2πij/3} - 1), j = 1, 2, 3, with the real cube root of q."""
    root = q ** (1.0 / 3.0)
    turns = np.exp(2j * np.pi * np.arange(1, 4) / 3.0)
    return rate * (root * turns - 1.0)


def equal_rates_coefficients(rate: float, q: float) -> np.ndarray:
    """(1 + q^{-1/3} e^{-2πij/3}) / (3 z_j)."""
    turns = np.exp(-2j * np.pi * np.arange(1, 4) / 3.0)
    return (1.0 + q ** (-1.0 / 3.0) * turns) / (3.0 * equal_rates_roots(rate, q))


def mean_exit_equal_rates(spec: ProcessSpec, x: float) -> float:
    """T̃_b(x) = 2/(pλ) + Σ_j (1 + q^{-1/3} e^{-2πij/3}) / (3z_j) e^{z_j ϱ} for λ = γv.

    Raises:
        RegimeError: Unless λ = γv and the ruin-jump specialization applies
        NumericalFailureError: If the residue sum is not real
    """
    params = _closed_form_parameters(spec)
    if params is None:
        raise RegimeError(
            "The equal-rates formula needs Erlang-2 waiting, exponential h₊ and ruin jumps",
            regime=f"{spec.waiting.kind}/{spec.jumps.kind}",
            required="erlang-2/ruin-jumps",
        )
    rate, gamma, v, p = params
    if abs(rate - gamma * v) > EQUAL_RATES_TOLERANCE * rate:
        raise RegimeError(
            f"λ = {rate} differs from γv = {gamma * v}", regime="λ≠γv", required="λ=γv"
        )
    spec.check_position(x)
    rho = spec.distance_in_time(x)
    q = 1.0 - p
    if q == 0.0:
        return float(spec.waiting.integrated_survival(rho))
    if p == 0.0:
        return float(closed_form_after_jump(rate, gamma, v, spec.boundary - x))

    roots = equal_rates_roots(rate, q)
    coefficients = equal_rates_coefficients(rate, q)
    _check_against_residues(rate, gamma, v, p, roots, coefficients)
    total = 2.0 / (p * rate) + np.sum(coefficients * np.exp(roots * rho))
    if abs(total.imag) > 1e-10 * max(1.0, abs(total.real)):
        raise NumericalFailureError(
            "Equal-rates residue sum is not real",
            method="equal-rates",
            diagnostics={"imaginary": float(total.imag)},
        )
    return 0.0 if x == spec.boundary else float(total.real)


def _check_against_residues(
    rate: float, gamma: float, v: float, p: float, roots: np.ndarray, coefficients: np.ndarray
) -> None:
    expansion = partial_fractions(*ruin_jump_rational(rate, gamma, v, p))
    computed = _residues_in_z(expansion, v)
    for root, coefficient in zip(roots, coefficients, strict=True):
        nearest = min(computed, key=lambda item: abs(item[0] - root))
        if abs(nearest[1] - coefficient) > 1e-8 * max(1.0, abs(coefficient)):
            logger.warning(
                "Residue at z=%.6g is %.10g, displayed coefficient gives %.10g",
                root,
                nearest[1],
                coefficient,
            )


def _residues_in_z(expansion: ResidueExpansion, drift: float) -> list[tuple[complex, complex]]:
    """(z_j, C_j) pairs of the nonzero simple poles, with poles rescaled to z = sv."""
    pairs = []
    for root, coeffs in zip(expansion.roots, expansion.coefficients, strict=True):
        if root == 0:
            continue
        pairs.append((complex(root * drift), complex(coeffs[0])))
    return pairs


class TwoSidedSolution:
    """Exit-time solver for a mixture of positive and negative jumps.

    In the ruin-jump specialization it also carries the cubic roots z_j and
    the residue constants C_j of T̃(x) = 2/(pλ) + Σ_j C_j e^{z_j ϱ}.
    """

    def __init__(
        self, spec: ProcessSpec, points: int = DEFAULT_POINTS, inversion: str | None = None
    ):
        self.jumps = require_mixture(spec)
        self.spec = spec
        self.points = points
        self.inversion = inversion or default_inversion(spec)
        self.ruin_jumps = has_ruin_jumps(spec)
        self.roots: np.ndarray | None = None
        self.transform: LaplaceFunction | None = None
        params = _closed_form_parameters(spec)
        if self.ruin_jumps:
            self.transform = ruin_jump_transform(spec)
        if params is not None and params[3] > 0:
            self.roots = cubic_roots(*params)
            if np.any(self.roots.real >= 0):
                raise NumericalFailureError(
                    "Ruin-jump cubic has a root with nonnegative real part",
                    method="roots",
                    diagnostics={"roots": self.roots.tolist()},
                )
        self._solver: NystromSolver | None = None
        self._laws: dict[object, ExcessLifeLaw] = {}
        self._tables: dict[tuple[object, str], ExitTimeTable] = {}

    @property
    def closed_form_available(self) -> bool:
        return self.roots is not None

    @cached_property
    def expansion(self) -> ResidueExpansion:
        """Partial fractions of the rational F̂ in y = b - x."""
        if not self.closed_form_available:
            raise RegimeError(
                "The closed form needs Erlang-2 waiting, exponential h₊ and ruin jumps",
                regime="two-sided",
                required="erlang-2/ruin-jumps",
            )
        assert self.transform is not None
        assert self.transform.numerator is not None
        assert self.transform.denominator is not None
        return partial_fractions(self.transform.numerator, self.transform.denominator)

    def residue_constants(self) -> tuple[np.ndarray, np.ndarray]:
        """(z_j, C_j) from the partial fractions of the rational F̂."""
        params = _closed_form_parameters(self.spec)
        if params is None or params[3] == 0:
            raise RegimeError(
                "Residue constants exist for the Erlang-2 ruin-jump case with p > 0",
                regime=f"{self.spec.waiting.kind}/{self.spec.jumps.kind}",
                required="erlang-2/ruin-jumps",
            )
        expansion = partial_fractions(*ruin_jump_rational(*params))
        pairs = _residues_in_z(expansion, params[2])
        pairs.sort(key=lambda item: (item[0].real, item[0].imag))
        return np.array([z for z, _ in pairs]), np.array([c for _, c in pairs])

    def _resolve(self, method: str) -> str:
        if method not in METHODS:
            raise DomainError(
                f"Unknown method '{method}' (expected one of {METHODS})", value=method
            )
        if method == "closed-form" and not self.closed_form_available:
            raise RegimeError(
                "The closed form needs Erlang-2 waiting, exponential h₊ and ruin jumps",
                regime="two-sided",
                required="erlang-2/ruin-jumps",
            )
        if method == "transform-inversion" and self.transform is None:
            raise RegimeError(
                "Transform inversion needs ruin jumps", regime="two-sided", required="ruin-jumps"
            )
        if method == "auto":
            return "closed-form" if self.closed_form_available else "integral-equation"
        return method

    def after_jump_table(self, method: str = "integral-equation") -> ExitTimeTable:
        method = self._resolve(method)
        key = ("after-jump", method)
        if key in self._tables:
            return self._tables[key]
        if method == "integral-equation":
            table = self._nystrom().solve()
        else:
            positions = np.linspace(0.0, self.spec.boundary, self.points)
            values = np.zeros_like(positions)
            inside = positions < self.spec.boundary
            assert self.transform is not None
            distances = self.spec.boundary - positions[inside]
            if method == "closed-form":
                values[inside] = self.expansion(distances)
            else:
                values[inside] = invert(self.transform, distances, self.inversion)
            table = ExitTimeTable(positions, values, method)
        self._tables[key] = table
        return table

    def mean_exit_after_jump(self, x: float, method: str = "auto") -> float:
        self.spec.check_position(x)
        if x == self.spec.boundary:
            return 0.0
        method = self._resolve(method)
        if method == "closed-form":
            return float(self.expansion(self.spec.boundary - x))
        if method == "transform-inversion":
            assert self.transform is not None
            return float(invert(self.transform, self.spec.boundary - x, self.inversion))
        return float(self.after_jump_table(method)(x))

    def excess_life(self, r: ObservationTime) -> ExcessLifeLaw:
        key = "steady" if is_steady_state(r) else float(r)  # type: ignore[arg-type]
        if key not in self._laws:
            self._laws[key] = excess_life(self.spec.waiting, None, r)
        return self._laws[key]

    def observed_table(self, r: ObservationTime, method: str = "auto") -> ExitTimeTable:
        check_observation_time(r)
        method = self._resolve(method)
        key = ("steady" if is_steady_state(r) else float(r), method)  # type: ignore[arg-type]
        if key not in self._tables:
            law = self.excess_life(r)
            if method == "integral-equation":
                solver = self._nystrom()
                solver.solve()
                self._tables[key] = solver.observed(law)
            else:
                self._tables[key] = observed_from_table(
                    self.spec, law, self.after_jump_table(method), self.points, method=method
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

    def _nystrom(self) -> NystromSolver:
        if self._solver is None:
            self._solver = NystromSolver(self.spec, self.points)
        return self._solver


def mean_exit_twosided_general(spec: ProcessSpec, x: float, points: int = DEFAULT_POINTS) -> float:
    """T̃_b(x) from the Nyström solve of the two-sided equation.

    Raises:
        RegimeError: Unless jumps are a mixture, v > 0 and b finite
        DiscretizationError: If the system is singular
    """
    return TwoSidedSolution(spec, points).mean_exit_after_jump(x, "integral-equation")


def mean_exit_at_twosided(
    spec: ProcessSpec, x: float, r: ObservationTime, method: str = "auto"
) -> float:
    """T_b(x, r) for a mixture jump law."""
    return TwoSidedSolution(spec).mean_exit_at(x, r, method)


def cubic_residual(rate: float, gamma: float, drift: float, p: float, z: ArrayLike) -> np.ndarray:
    """Relative residual of the ruin-jump cubic at z."""
    coeffs = _cubic(rate, gamma, drift, p)
    z_arr = np.asarray(z, dtype=complex)
    scale = np.polyval(np.abs(coeffs), np.abs(z_arr))
    return np.abs(np.polyval(coeffs, z_arr)) / scale

