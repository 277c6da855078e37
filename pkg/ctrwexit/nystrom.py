"""Dense Nyström solver for the mean exit time after a jump, in every regime.

After a jump at x the walk drifts for a sojourn ℓ; it exits through b if
ℓ ≥ ϱ = (b - x)/v, otherwise it jumps from z = x + vℓ to z + u. Hence

    T̃(x) = ∫₀^ϱ [1 - Ψ(l)] dl + ∫ₓᵇ dΨ((z-x)/v) ∫ T̃(z+u) dH(u),  u ∈ (-z, b-z)

with T̃ = 0 outside (0, b). Favorable, adverse and two-sided jumps only
differ in which part of H falls inside the window. The same operator with
the excess-life law Φ(·|r) in place of Ψ maps T̃ to T(x, r).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg
from scipy.interpolate import CubicSpline

from ctrwexit.distributions import FloatArray, JumpModel, ProcessSpec, SojournLaw
from ctrwexit.exceptions import DiscretizationError, RegimeError

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 2001

# Reciprocal condition number below which the system counts as singular
_MIN_RCOND = 1e-13


@dataclass(frozen=True, eq=False)
class ExitTimeTable:
    """Mean exit times tabulated on a uniform grid of [0, b].

    Values between grid points come from a cubic spline.
    """

    positions: FloatArray
    values: FloatArray
    method: str
    condition_number: float | None = None
    diagnostics: dict[str, float] = field(default_factory=dict)

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.positions, self.values)

    def __call__(self, x: ArrayLike) -> FloatArray:
        return self._spline(np.asarray(x, dtype=float))[()]  # type: ignore[no-any-return]

    def derivative(self, x: ArrayLike) -> FloatArray:
        return self._spline(np.asarray(x, dtype=float), 1)[()]  # type: ignore[no-any-return]

    @property
    def step(self) -> float:
        return float(self.positions[1] - self.positions[0])

    def boundary_slope(self) -> float:
        """Second-order one-sided difference quotient at x = b."""
        h = self.step
        t = self.values
        return float((3.0 * t[-1] - 4.0 * t[-2] + t[-3]) / (2.0 * h))


def jump_matrix(jumps: JumpModel, boundary: float, points: int) -> np.ndarray:
    """C with (C T)_j ≈ ∫ T(z_j + u) dH(u) over u ∈ (-z_j, b - z_j).

    T is taken linear on each cell and the cell is weighted by its
    H-increment (trapezoid-Stieltjes). The matrix is Toeplitz in k - j.
    """
    step = boundary / (points - 1)
    offsets = np.arange(-(points - 1), points) * step
    cdf = np.asarray(jumps.cdf(offsets), dtype=float)
    # increments[k + N - 1] = H((k+1)Δ) - H(kΔ) for k = -(N-1) .. N-2
    increments = np.diff(cdf)
    lag = np.arange(points)[None, :] - np.arange(points)[:, None]
    # cell [w_{k-1}, w_k] seen from z_j has increment index k - 1 - j
    left_index = lag - 1 + (points - 1)
    right_index = lag + (points - 1)
    left = np.where(
        (np.arange(points)[None, :] >= 1) & (left_index >= 0),
        increments[np.clip(left_index, 0, increments.size - 1)],
        0.0,
    )
    right = np.where(
        np.arange(points)[None, :] <= points - 2,
        increments[np.clip(right_index, 0, increments.size - 1)],
        0.0,
    )
    return 0.5 * (left + right)


def sojourn_matrix(
    law: SojournLaw, boundary: float, drift: float, points: int
) -> tuple[np.ndarray, np.ndarray]:
    """Ω and G for the outer integral ∫ₓᵇ I(z) dΨ((z-x)/v).

    I is linear between grid points and each cell is integrated exactly
    against the sojourn law, so Ω is upper-triangular Toeplitz. G holds the
    drift-exit term ∫₀^ϱ [1 - Ψ(l)] dl at every grid point.
    """
    step = boundary / (points - 1)
    delta = step / drift
    ages = np.arange(points) * delta
    cdf = np.asarray(law.cdf(ages), dtype=float)
    moment = np.asarray(law.partial_first_moment(ages), dtype=float)
    d_cdf = np.diff(cdf)
    upper = np.clip((np.diff(moment) - ages[:-1] * d_cdf) / delta, 0.0, d_cdf)
    lower = d_cdf - upper

    kernel = np.zeros(points)
    kernel[:-1] += lower
    kernel[1:] += upper
    omega = linalg.toeplitz(np.r_[kernel[0], np.zeros(points - 1)], kernel)
    # the last grid point only closes cells, it opens none
    rows = np.arange(points - 1)
    omega[rows, points - 1] = upper[points - 2 - rows]
    omega[points - 1, :] = 0.0

    remaining = (points - 1 - np.arange(points)) * delta
    drift_exit = np.asarray(law.integrated_survival(remaining), dtype=float)
    return omega, drift_exit


@dataclass
class _Level:
    positions: np.ndarray
    values: np.ndarray
    inner: np.ndarray
    condition_number: float


class NystromSolver:
    """Dense Nyström discretization of the exit-time equation on (0, b).

    Args:
        spec: Process with v > 0 and finite b
        points: Grid size N (uniform in x, both ends included)
        extrapolate: Combine the N grid with the (N+1)/2 grid by Richardson
            extrapolation
    """

    def __init__(self, spec: ProcessSpec, points: int = DEFAULT_POINTS, extrapolate: bool = True):
        if spec.drift <= 0:
            raise RegimeError(
                "The integral-equation route needs a positive drift",
                regime="v=0",
                required="v>0",
            )
        if math.isinf(spec.boundary):
            raise RegimeError(
                "The integral-equation route needs a finite boundary",
                regime="ruin",
                required="finite b",
            )
        if points < 5:
            raise DiscretizationError(f"Nyström grid needs at least 5 points, got {points}")
        self.spec = spec
        self.points = points
        self.extrapolate = extrapolate and points % 2 == 1 and points >= 9
        self._levels: dict[int, _Level] = {}

    def _grids(self) -> list[int]:
        if self.extrapolate:
            return [self.points, (self.points + 1) // 2]
        return [self.points]

    def _level(self, points: int) -> _Level:
        if points in self._levels:
            return self._levels[points]
        spec = self.spec
        positions = np.linspace(0.0, spec.boundary, points)
        jumps = jump_matrix(spec.jumps, spec.boundary, points)
        omega, drift_exit = sojourn_matrix(spec.waiting, spec.boundary, spec.drift, points)
        system = np.eye(points) - omega @ jumps

        try:
            lu, piv = linalg.lu_factor(system, check_finite=True)
            norm = np.linalg.norm(system, 1)
            rcond, _ = linalg.lapack.dgecon(lu, norm, norm="1")
        except (ValueError, np.linalg.LinAlgError) as e:
            raise DiscretizationError(
                f"Nyström system could not be factorized: {e}", condition_number=math.inf
            ) from e
        condition = math.inf if rcond == 0 else 1.0 / rcond
        if rcond < _MIN_RCOND:
            raise DiscretizationError(
                f"Nyström system is singular (condition number {condition:.3g})",
                condition_number=condition,
                diagnostics={"points": points},
            )
        values = linalg.lu_solve((lu, piv), drift_exit)
        if not np.all(np.isfinite(values)):
            raise DiscretizationError("Nyström solution is not finite", condition_number=condition)

        logger.debug("Nyström solve: N=%d, condition number %.3g", points, condition)
        level = _Level(positions, values, jumps @ values, condition)
        self._levels[points] = level
        return level

    def solve(self) -> ExitTimeTable:
        """T̃ on the grid."""
        levels = [self._level(n) for n in self._grids()]
        values = _richardson(levels[0].values, levels[-1].values, self.extrapolate)
        values[-1] = 0.0
        return ExitTimeTable(
            levels[0].positions,
            values,
            "integral-equation",
            condition_number=levels[0].condition_number,
        )

    def observed(self, law: SojournLaw) -> ExitTimeTable:
        """T(·, r) = G_r + Ω_r C T̃ with the excess-life law in place of Ψ."""
        results = []
        for points in self._grids():
            level = self._level(points)
            omega, drift_exit = sojourn_matrix(law, self.spec.boundary, self.spec.drift, points)
            results.append(drift_exit + omega @ level.inner)
        values = _richardson(results[0], results[-1], self.extrapolate)
        values[-1] = 0.0
        fine = self._levels[self.points]
        return ExitTimeTable(
            fine.positions, values, "integral-equation", condition_number=fine.condition_number
        )


def _richardson(fine: np.ndarray, coarse: np.ndarray, extrapolate: bool) -> np.ndarray:
    """Second-order Richardson step; the coarse grid is every other fine point."""
    if not extrapolate or fine.size == coarse.size:
        return fine.copy()
    positions = np.linspace(0.0, 1.0, fine.size)
    correction = (fine[::2] - coarse) / 3.0
    return fine + np.interp(positions, positions[::2], correction)


def observed_from_table(
    spec: ProcessSpec,
    law: SojournLaw,
    after_jump: Callable[[np.ndarray], ArrayLike],
    points: int = DEFAULT_POINTS,
    extrapolate: bool = True,
    method: str = "quadrature",
) -> ExitTimeTable:
    """T(·, r) from a known T̃ by one application of the exit operator.

    Args:
        spec: Process (v > 0, finite b)
        law: Sojourn law of the first drift phase, e.g. an excess-life law
        after_jump: T̃ as a function of position (closed form or table)
        points: Grid size N
        extrapolate: Richardson-combine the N and (N+1)/2 grids
    """
    if spec.drift <= 0 or math.isinf(spec.boundary):
        raise RegimeError(
            "The exit operator needs v > 0 and a finite boundary",
            regime="v=0" if spec.drift <= 0 else "ruin",
            required="v>0, finite b",
        )
    extrapolate = extrapolate and points % 2 == 1 and points >= 9
    sizes = [points, (points + 1) // 2] if extrapolate else [points]
    results = []
    for size in sizes:
        positions = np.linspace(0.0, spec.boundary, size)
        tilde = np.asarray(after_jump(positions), dtype=float)
        inner = jump_matrix(spec.jumps, spec.boundary, size) @ tilde
        omega, drift_exit = sojourn_matrix(law, spec.boundary, spec.drift, size)
        results.append(drift_exit + omega @ inner)
    values = _richardson(results[0], results[-1], extrapolate)
    values[-1] = 0.0
    return ExitTimeTable(np.linspace(0.0, spec.boundary, points), values, method)


def solve_exit_table(
    spec: ProcessSpec, points: int = DEFAULT_POINTS, extrapolate: bool = True
) -> ExitTimeTable:
    return NystromSolver(spec, points, extrapolate).solve()
