"""Waiting-time and jump-size laws of the drifting CTRW.

The process is X_t = x + v t + Σ J_n, with i.i.d. waiting times τ_n of
density ψ between jumps and i.i.d. jump sizes J_n of density h. Every law
here exposes its analytic structure (CDF, Laplace transform, moments) next to
an exact sampler driven by an explicit ``numpy.random.Generator``.

Evaluators accept scalars or arrays and return numpy values of the same shape.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from ctrwexit.exceptions import (
    DomainError,
    ModelError,
    RegimeError,
    UnsupportedOperationError,
)
from ctrwexit.sentinels import UNDEFINED, Sentinel

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]

# Below this |s·Δ| the segment integrals switch to their Taylor series
_SERIES_THRESHOLD = 1e-3


def _unwrap(values: NDArray) -> NDArray:
    # 0-d results come back as numpy scalars
    return values[()]  # type: ignore[no-any-return]


class SojournLaw(Protocol):
    """Anything that can act as the law of the time to the next jump.

    Implemented by every WaitingTimeModel (first waiting time after a jump)
    and by the excess-life laws of ``ctrwexit.renewal`` (first waiting time
    seen from an arbitrary present).
    """

    def cdf(self, t: ArrayLike) -> FloatArray: ...

    def pdf(self, t: ArrayLike) -> FloatArray: ...

    def partial_first_moment(self, t: ArrayLike) -> FloatArray: ...

    def integrated_survival(self, t: ArrayLike) -> FloatArray: ...


class PiecewiseLinearDensity:
    """Density given by linear interpolation of tabulated (point, value) pairs.

    The density is zero outside the grid. Mass, moments and Laplace transforms
    are integrated exactly segment by segment, so the transform stays accurate
    for large |Im(s)|.
    """

    def __init__(self, points: ArrayLike, values: ArrayLike, name: str = "density"):
        nodes = np.asarray(points, dtype=float)
        dens = np.asarray(values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != dens.shape or nodes.size < 2:
            raise ModelError(f"Tabulated {name} needs two equal-length columns of >= 2 rows")
        if np.any(np.diff(nodes) <= 0):
            raise ModelError(f"Tabulated {name} grid must be strictly increasing")
        if np.any(dens < 0) or not np.all(np.isfinite(dens)):
            raise ModelError(f"Tabulated {name} values must be finite and nonnegative")

        width = np.diff(nodes)
        mass = float(np.sum(0.5 * (dens[:-1] + dens[1:]) * width))
        if abs(mass - 1.0) > 1e-3:
            raise ModelError(
                f"Tabulated {name} integrates to {mass:.6g}, not 1",
                details={"mass": mass},
            )
        if abs(mass - 1.0) > 1e-8:
            logger.warning("Renormalizing tabulated %s (mass %.10f)", name, mass)
            dens = dens / mass

        self.points = nodes
        self.values = dens
        self._start = nodes[:-1]
        self._width = width
        self._left = dens[:-1]
        self._slope = (dens[1:] - dens[:-1]) / width

        seg_mass = self._left * width + 0.5 * self._slope * width**2
        seg_moment = (
            self._start * seg_mass
            + self._left * width**2 / 2.0
            + self._slope * width**3 / 3.0
        )
        self._cum_mass = np.concatenate(([0.0], np.cumsum(seg_mass)))
        self._cum_moment = np.concatenate(([0.0], np.cumsum(seg_moment)))
        self._cum_mass /= self._cum_mass[-1]

    def _locate(self, x: FloatArray) -> tuple[NDArray[np.intp], FloatArray]:
        idx = np.clip(np.searchsorted(self.points, x, side="right") - 1, 0, self._width.size - 1)
        offset = np.clip(x - self._start[idx], 0.0, self._width[idx])
        return idx, offset

    def pdf(self, x: ArrayLike) -> FloatArray:
        return _unwrap(np.interp(np.asarray(x, dtype=float), self.points, self.values, 0.0, 0.0))

    def cdf(self, x: ArrayLike) -> FloatArray:
        arr = np.asarray(x, dtype=float)
        idx, w = self._locate(arr)
        value = self._cum_mass[idx] + self._left[idx] * w + 0.5 * self._slope[idx] * w**2
        value = np.where(arr < self.points[0], 0.0, np.where(arr >= self.points[-1], 1.0, value))
        return _unwrap(np.clip(value, 0.0, 1.0))

    def partial_first_moment(self, x: ArrayLike) -> FloatArray:
        """∫ u h(u) du over (-∞, x]."""
        arr = np.asarray(x, dtype=float)
        idx, w = self._locate(arr)
        a = self._start[idx]
        f0 = self._left[idx]
        c = self._slope[idx]
        partial = a * (f0 * w + 0.5 * c * w**2) + f0 * w**2 / 2.0 + c * w**3 / 3.0
        value = self._cum_moment[idx] + partial
        value = np.where(arr >= self.points[-1], self.mean, value)
        value = np.where(arr < self.points[0], 0.0, value)
        return _unwrap(value)

    @property
    def mean(self) -> float:
        return float(self._cum_moment[-1])

    @property
    def second_moment(self) -> float:
        a, d, f0, c = self._start, self._width, self._left, self._slope
        total = (
            a**2 * (f0 * d + c * d**2 / 2.0)
            + 2.0 * a * (f0 * d**2 / 2.0 + c * d**3 / 3.0)
            + (f0 * d**3 / 3.0 + c * d**4 / 4.0)
        )
        return float(np.sum(total))

    def mass_between(self, lower: float, upper: float) -> float:
        return float(self.cdf(upper) - self.cdf(lower))

    def laplace(
        self, s: ArrayLike, origin: float = 0.0, lower: float | None = None
    ) -> ComplexArray:
        """∫ e^{-s(x - origin)} h(x) dx over [lower, ∞), exact for the interpolant."""
        s_arr = np.asarray(s, dtype=complex)
        nodes, values = self.points, self.values
        if lower is not None and lower > nodes[0]:
            keep = nodes > lower
            nodes = np.concatenate(([lower], nodes[keep]))
            values = np.concatenate(([float(self.pdf(lower))], values[keep]))
            if nodes.size < 2:
                return _unwrap(np.zeros_like(s_arr))

        start = nodes[:-1]
        width = np.diff(nodes)
        slope = (values[1:] - values[:-1]) / width
        sv = s_arr[..., None]
        z = sv * width
        small = np.abs(z) < _SERIES_THRESHOLD
        z_safe = np.where(small, 1.0, z)
        s_safe = np.where(small, 1.0, sv)
        exponent = -sv * (start - origin)
        # segment ends weighted in one exponent each, no product of e^{±s·x} factors
        head = np.exp(exponent)
        tail = np.exp(exponent - z_safe)
        # I0 = ∫_0^Δ e^{-su} du, I1 = ∫_0^Δ u e^{-su} du
        i0 = width * (1 - z / 2 + z**2 / 6 - z**3 / 24)
        i1 = width**2 * (0.5 - z / 3 + z**2 / 8 - z**3 / 30)
        series = head * (values[:-1] * i0 + slope * i1)
        exact = values[:-1] * (head - tail) / s_safe + slope * (
            head - tail * (1 + z_safe)
        ) / s_safe**2
        terms = np.where(small, series, exact)
        return _unwrap(np.sum(terms, axis=-1))

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        """Exact inversion of the piecewise-quadratic CDF."""
        u = rng.random(size)
        idx = np.clip(np.searchsorted(self._cum_mass, u, side="right") - 1, 0, self._width.size - 1)
        residual = u - self._cum_mass[idx]
        f0 = self._left[idx]
        c = self._slope[idx]
        root = np.sqrt(np.maximum(f0**2 + 2.0 * c * residual, 0.0))
        denom = f0 + root
        w = np.divide(2.0 * residual, denom, out=np.zeros_like(residual), where=denom > 0)
        return self._start[idx] + np.clip(w, 0.0, self._width[idx])


# ---------------------------------------------------------------------------
# Waiting-time laws
# ---------------------------------------------------------------------------


class WaitingTimeModel(ABC):
    """Law ψ of the sojourn times between consecutive jumps."""

    kind: str = "abstract"

    @abstractmethod
    def pdf(self, t: ArrayLike) -> FloatArray:
        """Density ψ(t), zero for t < 0."""

    @abstractmethod
    def cdf(self, t: ArrayLike) -> FloatArray:
        """Distribution function Ψ(t)."""

    @abstractmethod
    def laplace(self, s: ArrayLike) -> ComplexArray:
        """Laplace transform ψ̂(s) (analytic continuation where closed)."""

    @property
    @abstractmethod
    def mean(self) -> float:
        """Mean waiting time μ."""

    @property
    @abstractmethod
    def second_moment(self) -> float:
        """E[τ²]."""

    @abstractmethod
    def partial_first_moment(self, t: ArrayLike) -> FloatArray:
        """∫₀ᵗ l ψ(l) dl."""

    @abstractmethod
    def shifted_laplace(self, a: float, s: ArrayLike) -> ComplexArray:
        """∫₀^∞ e^{-st} ψ(a + t) dt, the transform of the residual density at a."""

    def survival(self, t: ArrayLike) -> FloatArray:
        return _unwrap(1.0 - np.asarray(self.cdf(t)))

    def integrated_survival(self, t: ArrayLike) -> FloatArray:
        """∫₀ᵗ [1 - Ψ(l)] dl = E[min(t, τ)]."""
        arr = np.maximum(np.asarray(t, dtype=float), 0.0)
        return _unwrap(arr * (1.0 - np.asarray(self.cdf(arr))) + self.partial_first_moment(arr))

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        raise UnsupportedOperationError(
            f"Waiting-time model '{self.kind}' has no sampler", operation="sample"
        )


class ErlangWaiting(WaitingTimeModel):
    """Erlang(λ, n): sum of n independent exponential(λ) waiting times."""

    kind = "erlang"

    def __init__(self, rate: float, shape: int = 2):
        if not (rate > 0) or not math.isfinite(rate):
            raise ModelError(f"Erlang rate must be positive, got {rate}", parameter="rate")
        if int(shape) != shape or shape < 1:
            raise ModelError(
                f"Erlang shape must be an integer >= 1, got {shape}", parameter="shape"
            )
        self.rate = float(rate)
        self.shape = int(shape)

    def __repr__(self) -> str:
        return f"ErlangWaiting(rate={self.rate}, shape={self.shape})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ErlangWaiting)
            and self.rate == other.rate
            and self.shape == other.shape
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.rate, self.shape))

    def pdf(self, t: ArrayLike) -> FloatArray:
        arr = np.asarray(t, dtype=float)
        lam, n = self.rate, self.shape
        positive = arr > 0
        safe = np.where(positive, arr, 1.0)
        log_pdf = n * math.log(lam) + (n - 1) * np.log(safe) - lam * safe - special.gammaln(n)
        at_zero = lam if n == 1 else 0.0
        value = np.where(positive, np.exp(log_pdf), np.where(arr == 0, at_zero, 0.0))
        return _unwrap(value)

    def cdf(self, t: ArrayLike) -> FloatArray:
        arr = np.asarray(t, dtype=float)
        return _unwrap(special.gammainc(self.shape, self.rate * np.maximum(arr, 0.0)))

    def laplace(self, s: ArrayLike) -> ComplexArray:
        s_arr = np.asarray(s, dtype=complex)
        base = self.rate + s_arr
        if np.any(base == 0):
            raise DomainError(f"ψ̂(s) has a pole at s = {-self.rate}", value=-self.rate)
        return _unwrap((self.rate / base) ** self.shape)

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def second_moment(self) -> float:
        return self.shape * (self.shape + 1) / self.rate**2

    def partial_first_moment(self, t: ArrayLike) -> FloatArray:
        arr = np.maximum(np.asarray(t, dtype=float), 0.0)
        return _unwrap(self.mean * special.gammainc(self.shape + 1, self.rate * arr))

    def shifted_laplace(self, a: float, s: ArrayLike) -> ComplexArray:
        # ψ̂(s) e^{-λa} Σ_{k<n} ((λ+s)a)^k / k!
        s_arr = np.asarray(s, dtype=complex)
        scaled = (self.rate + s_arr) * a
        series = np.zeros_like(scaled)
        term = np.ones_like(scaled)
        for k in range(self.shape):
            if k:
                term = term * scaled / k
            series = series + term
        return _unwrap(np.asarray(self.laplace(s_arr)) * math.exp(-self.rate * a) * series)

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        draws = rng.exponential(1.0 / self.rate, size=(size, self.shape))
        return draws.sum(axis=1)


class ExponentialWaiting(ErlangWaiting):
    """Exponential(λ) waiting times (Poisson jump instants)."""

    kind = "exponential"

    def __init__(self, rate: float):
        super().__init__(rate, shape=1)

    def __repr__(self) -> str:
        return f"ExponentialWaiting(rate={self.rate})"


def read_density_table(path: str, what: str) -> FloatArray:
    """Two numeric columns from a CSV file; rows with non-numeric cells are dropped."""
    try:
        data = np.genfromtxt(path, delimiter=",", dtype=float)
    except OSError as e:
        raise ModelError(f"Cannot read {what} table {path}: {e}") from e
    data = np.atleast_2d(data)
    data = data[~np.isnan(data).any(axis=1)]
    if data.ndim != 2 or data.shape[1] != 2:
        raise ModelError(f"The {what} table {path} must have two columns")
    return data


class TabulatedWaiting(WaitingTimeModel):
    """Waiting-time density interpolated linearly on a user grid (t ≥ 0)."""

    kind = "tabulated"

    def __init__(self, times: ArrayLike, density: ArrayLike):
        grid = np.asarray(times, dtype=float)
        if grid.size and grid[0] < 0:
            raise ModelError("Tabulated waiting times must start at t >= 0", parameter="times")
        self.table = PiecewiseLinearDensity(grid, density, name="waiting-time density")

    @classmethod
    def from_csv(cls, path: str) -> TabulatedWaiting:
        """Load a two-column (t, density) CSV; a non-numeric header row is skipped."""
        data = read_density_table(path, "waiting-time")
        return cls(data[:, 0], data[:, 1])

    def pdf(self, t: ArrayLike) -> FloatArray:
        return self.table.pdf(t)

    def cdf(self, t: ArrayLike) -> FloatArray:
        return self.table.cdf(t)

    def laplace(self, s: ArrayLike) -> ComplexArray:
        return self.table.laplace(s)

    @property
    def mean(self) -> float:
        return self.table.mean

    @property
    def second_moment(self) -> float:
        return self.table.second_moment

    def partial_first_moment(self, t: ArrayLike) -> FloatArray:
        return self.table.partial_first_moment(t)

    def shifted_laplace(self, a: float, s: ArrayLike) -> ComplexArray:
        return self.table.laplace(s, origin=a, lower=a)

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        return self.table.sample(rng, size)


# ---------------------------------------------------------------------------
# Jump laws
# ---------------------------------------------------------------------------


class JumpModel(ABC):
    """Law h of the signed jump sizes J_n."""

    kind: str = "abstract"

    @abstractmethod
    def pdf(self, u: ArrayLike) -> FloatArray:
        """Density h(u) over the real line."""

    @abstractmethod
    def cdf(self, u: ArrayLike) -> FloatArray:
        """P(J ≤ u)."""

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        """Draw signed jump sizes."""

    @property
    @abstractmethod
    def mean(self) -> float | Sentinel:
        """E[J], or UNDEFINED when it does not exist."""

    @property
    @abstractmethod
    def positive_mass(self) -> float:
        """P(J > 0)."""

    @property
    def negative_mass(self) -> float:
        return 1.0 - self.positive_mass

    def partial_first_moment(self, u: ArrayLike) -> FloatArray:
        """∫ w h(w) dw over (-∞, u]."""
        raise UnsupportedOperationError(
            f"Jump model '{self.kind}' has no partial first moment",
            operation="partial_first_moment",
        )

    def laplace(self, s: ArrayLike) -> ComplexArray:
        """One-sided transform ĥ(s) = ∫₀^∞ h(u) e^{-su} du."""
        raise RegimeError(
            f"Jump model '{self.kind}' has negative support; "
            "use sign_decomposition() and transform the positive part",
            regime="negative-support",
            required="positive-support",
        )

    def sign_decomposition(self) -> tuple[float, JumpModel | None, float, JumpModel | None]:
        """Return (q, h₊, p, h₋) with h = q h₊ + p h₋."""
        q = self.positive_mass
        if q >= 1.0:
            return 1.0, self, 0.0, None
        if q <= 0.0:
            return 0.0, None, 1.0, self
        raise UnsupportedOperationError(
            f"Jump model '{self.kind}' cannot be split by sign; use MixtureJumps",
            operation="sign_decomposition",
        )


class ExponentialJumps(JumpModel):
    """Exponential jump sizes of rate γ, signed and optionally shifted.

    With sign=+1 the support is [offset, ∞); with sign=-1 it is (-∞, -offset].
    A nonzero offset expresses negative tails lying entirely below -b.
    """

    def __init__(self, rate: float, sign: int = 1, offset: float = 0.0):
        if not (rate > 0) or not math.isfinite(rate):
            raise ModelError(f"Jump rate must be positive, got {rate}", parameter="rate")
        if sign not in (1, -1):
            raise ModelError(f"Jump sign must be +1 or -1, got {sign}", parameter="sign")
        if offset < 0:
            raise ModelError(f"Jump offset must be >= 0, got {offset}", parameter="offset")
        self.rate = float(rate)
        self.sign = sign
        self.offset = float(offset)
        self.kind = "exponential-positive" if sign > 0 else "exponential-negative"

    def __repr__(self) -> str:
        return f"ExponentialJumps(rate={self.rate}, sign={self.sign}, offset={self.offset})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ExponentialJumps) and (
            (self.rate, self.sign, self.offset) == (other.rate, other.sign, other.offset)
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.rate, self.offset))

    def pdf(self, u: ArrayLike) -> FloatArray:
        w = self.sign * np.asarray(u, dtype=float) - self.offset
        return _unwrap(np.where(w >= 0, self.rate * np.exp(-self.rate * np.maximum(w, 0.0)), 0.0))

    def cdf(self, u: ArrayLike) -> FloatArray:
        arr = np.asarray(u, dtype=float)
        if self.sign > 0:
            w = np.maximum(arr - self.offset, 0.0)
            return _unwrap(np.where(arr >= self.offset, -np.expm1(-self.rate * w), 0.0))
        w = np.maximum(-arr - self.offset, 0.0)
        return _unwrap(np.where(arr <= -self.offset, np.exp(-self.rate * w), 1.0))

    def laplace(self, s: ArrayLike) -> ComplexArray:
        if self.sign < 0:
            return super().laplace(s)
        s_arr = np.asarray(s, dtype=complex)
        base = self.rate + s_arr
        if np.any(base == 0):
            raise DomainError(f"ĥ(s) has a pole at s = {-self.rate}", value=-self.rate)
        return _unwrap(np.exp(-s_arr * self.offset) * self.rate / base)

    def partial_first_moment(self, u: ArrayLike) -> FloatArray:
        if self.sign < 0:
            return super().partial_first_moment(u)
        arr = np.asarray(u, dtype=float)
        w = np.maximum(arr - self.offset, 0.0)
        scale = 1.0 / self.rate
        value = (self.offset + scale) - (arr + scale) * np.exp(-self.rate * w)
        return _unwrap(np.where(arr >= self.offset, value, 0.0))

    @property
    def mean(self) -> float:
        return self.sign * (self.offset + 1.0 / self.rate)

    @property
    def positive_mass(self) -> float:
        return 1.0 if self.sign > 0 else 0.0

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        return self.sign * (self.offset + rng.exponential(1.0 / self.rate, size=size))


class PointMassJumps(JumpModel):
    """Every jump has the same size (a degenerate law, no density)."""

    kind = "point-mass"

    def __init__(self, location: float):
        if location == 0 or not math.isfinite(location):
            raise ModelError(f"Point-mass jump must be finite and nonzero, got {location}")
        self.location = float(location)

    def __repr__(self) -> str:
        return f"PointMassJumps(location={self.location})"

    def pdf(self, u: ArrayLike) -> FloatArray:
        raise UnsupportedOperationError("A point-mass jump law has no density", operation="pdf")

    def cdf(self, u: ArrayLike) -> FloatArray:
        return _unwrap(np.where(np.asarray(u, dtype=float) >= self.location, 1.0, 0.0))

    def laplace(self, s: ArrayLike) -> ComplexArray:
        if self.location < 0:
            return super().laplace(s)
        return _unwrap(np.exp(-np.asarray(s, dtype=complex) * self.location))

    def partial_first_moment(self, u: ArrayLike) -> FloatArray:
        arr = np.asarray(u, dtype=float)
        return _unwrap(np.where(arr >= self.location, self.location, 0.0))

    @property
    def mean(self) -> float:
        return self.location

    @property
    def positive_mass(self) -> float:
        return 1.0 if self.location > 0 else 0.0

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        return np.full(size, self.location)


class OneSidedStableJumps(JumpModel):
    """Positive jumps with ĥ(s) = e^{-k√s}: the one-sided stable law of index 1/2.

    h(u) = k / (2√(π u³)) e^{-k²/(4u)}; the mean does not exist.
    """

    kind = "one-sided-stable-half"

    def __init__(self, scale: float):
        if not (scale > 0) or not math.isfinite(scale):
            raise ModelError(f"Stable scale k must be positive, got {scale}", parameter="scale")
        self.scale = float(scale)

    def __repr__(self) -> str:
        return f"OneSidedStableJumps(scale={self.scale})"

    def pdf(self, u: ArrayLike) -> FloatArray:
        arr = np.asarray(u, dtype=float)
        k = self.scale
        safe = np.where(arr > 0, arr, 1.0)
        value = k / (2.0 * np.sqrt(np.pi * safe**3)) * np.exp(-(k**2) / (4.0 * safe))
        return _unwrap(np.where(arr > 0, value, 0.0))

    def cdf(self, u: ArrayLike) -> FloatArray:
        arr = np.asarray(u, dtype=float)
        safe = np.where(arr > 0, arr, 1.0)
        return _unwrap(np.where(arr > 0, special.erfc(self.scale / (2.0 * np.sqrt(safe))), 0.0))

    def laplace(self, s: ArrayLike) -> ComplexArray:
        s_arr = np.asarray(s, dtype=complex)
        on_cut = (s_arr.imag == 0) & (s_arr.real < 0)
        if np.any(on_cut):
            raise DomainError("e^{-k√s} is evaluated on its branch cut (negative real axis)")
        return _unwrap(np.exp(-self.scale * np.sqrt(s_arr)))

    def partial_first_moment(self, u: ArrayLike) -> FloatArray:
        arr = np.asarray(u, dtype=float)
        k = self.scale
        safe = np.where(arr > 0, arr, 1.0)
        bulk = k * np.sqrt(safe / np.pi) * np.exp(-(k**2) / (4.0 * safe))
        value = bulk - 0.5 * k**2 * special.erfc(k / (2.0 * np.sqrt(safe)))
        return _unwrap(np.where(arr > 0, value, 0.0))

    @property
    def mean(self) -> Sentinel:
        return UNDEFINED

    @property
    def positive_mass(self) -> float:
        return 1.0

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        z = rng.standard_normal(size)
        return self.scale**2 / (2.0 * z**2)


class TabulatedJumps(JumpModel):
    """Jump density interpolated linearly on a signed grid."""

    kind = "tabulated"

    def __init__(self, sizes: ArrayLike, density: ArrayLike):
        self.table = PiecewiseLinearDensity(sizes, density, name="jump density")

    @classmethod
    def from_csv(cls, path: str) -> TabulatedJumps:
        """Load a two-column (signed size, density) CSV."""
        data = read_density_table(path, "jump")
        return cls(data[:, 0], data[:, 1])

    def pdf(self, u: ArrayLike) -> FloatArray:
        return self.table.pdf(u)

    def cdf(self, u: ArrayLike) -> FloatArray:
        return self.table.cdf(u)

    def partial_first_moment(self, u: ArrayLike) -> FloatArray:
        return self.table.partial_first_moment(u)

    def laplace(self, s: ArrayLike) -> ComplexArray:
        if self.table.points[0] < 0 and self.table.mass_between(self.table.points[0], 0.0) > 0:
            return super().laplace(s)
        return self.table.laplace(s)

    @property
    def mean(self) -> float:
        return self.table.mean

    @property
    def positive_mass(self) -> float:
        return 1.0 - float(self.table.cdf(0.0))

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        return self.table.sample(rng, size)


class MixtureJumps(JumpModel):
    """h = q h₊ + p h₋ with h₊ on (0, ∞), h₋ on (-∞, 0) and p = 1 - q."""

    kind = "mixture"

    def __init__(self, q: float, positive: JumpModel, negative: JumpModel):
        if not 0.0 <= q <= 1.0:
            raise ModelError(f"Mixture weight q must lie in [0, 1], got {q}", parameter="q")
        if positive.negative_mass > 0:
            raise ModelError("Positive part of a mixture must be supported on (0, ∞)")
        if negative.positive_mass > 0:
            raise ModelError("Negative part of a mixture must be supported on (-∞, 0)")
        self.q = float(q)
        self.p = 1.0 - self.q
        self.positive = positive
        self.negative = negative

    def __repr__(self) -> str:
        return f"MixtureJumps(q={self.q}, positive={self.positive!r}, negative={self.negative!r})"

    def pdf(self, u: ArrayLike) -> FloatArray:
        value = np.zeros_like(np.asarray(u, dtype=float))
        if self.q > 0:
            value = value + self.q * np.asarray(self.positive.pdf(u))
        if self.p > 0:
            value = value + self.p * np.asarray(self.negative.pdf(u))
        return _unwrap(value)

    def cdf(self, u: ArrayLike) -> FloatArray:
        return _unwrap(
            self.q * np.asarray(self.positive.cdf(u)) + self.p * np.asarray(self.negative.cdf(u))
        )

    def laplace(self, s: ArrayLike) -> ComplexArray:
        if self.p > 0:
            return super().laplace(s)
        return self.positive.laplace(s)

    @property
    def mean(self) -> float | Sentinel:
        plus, minus = self.positive.mean, self.negative.mean
        if isinstance(plus, Sentinel) or isinstance(minus, Sentinel):
            return UNDEFINED
        return self.q * plus + self.p * minus

    @property
    def positive_mass(self) -> float:
        return self.q

    def sign_decomposition(self) -> tuple[float, JumpModel | None, float, JumpModel | None]:
        return self.q, self.positive, self.p, self.negative

    def sample(self, rng: np.random.Generator, size: int) -> FloatArray:
        upward = rng.random(size) < self.q
        ups = self.positive.sample(rng, size)
        downs = self.negative.sample(rng, size)
        return np.where(upward, ups, downs)


# ---------------------------------------------------------------------------
# Process specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProcessSpec:
    """Drifting CTRW on (0, b): drift v, upper boundary b, laws ψ and h.

    v = 0 selects the drift-less branch; b = math.inf the ruin problem.
    """

    drift: float
    boundary: float
    waiting: WaitingTimeModel
    jumps: JumpModel

    def __post_init__(self) -> None:
        if not (self.drift >= 0) or not math.isfinite(self.drift):
            raise ModelError(
                f"Drift v must be finite and >= 0, got {self.drift}", parameter="drift"
            )
        if not (self.boundary > 0):
            raise ModelError(
                f"Boundary b must be positive, got {self.boundary}", parameter="boundary"
            )

    @property
    def regime(self) -> str:
        """'favorable' (jumps ≥ 0), 'adverse' (jumps ≤ 0) or 'two-sided'."""
        if self.jumps.negative_mass <= 0:
            return "favorable"
        if self.jumps.positive_mass <= 0:
            return "adverse"
        return "two-sided"

    def sampled_regime(self, draws: int = 4096, seed: int = 0) -> str:
        """Classify the regime from the signs of sampled jumps."""
        sizes = self.jumps.sample(np.random.default_rng(seed), draws)
        if np.all(sizes >= 0):
            return "favorable"
        if np.all(sizes <= 0):
            return "adverse"
        return "two-sided"

    @property
    def is_ruin_problem(self) -> bool:
        return math.isinf(self.boundary)

    def distance_in_time(self, x: float) -> float:
        """ϱ = (b - x)/v, the time drift alone needs to reach b."""
        return (self.boundary - x) / self.drift

    def check_position(self, x: float) -> None:
        if not (0.0 <= x <= self.boundary):
            raise DomainError(f"Position x={x} lies outside [0, {self.boundary}]", value=x)


def require_mean(law: WaitingTimeModel | JumpModel) -> float:
    """Return the mean of a law, raising ModelError when it is undefined."""
    mean = law.mean
    if isinstance(mean, Sentinel):
        raise ModelError(f"The mean of '{law.kind}' is undefined", parameter="mean")
    return float(mean)


def is_erlang(model: WaitingTimeModel, shape: int | None = None) -> bool:
    if not isinstance(model, ErlangWaiting):
        return False
    return shape is None or model.shape == shape


def has_tabulated_law(spec: ProcessSpec) -> bool:
    """True when a waiting or jump law (or a mixture component) is tabulated."""
    jumps = spec.jumps
    parts = [jumps.positive, jumps.negative] if isinstance(jumps, MixtureJumps) else [jumps]
    return spec.waiting.kind == "tabulated" or any(part.kind == "tabulated" for part in parts)


def is_plain_exponential_jumps(model: JumpModel | None, sign: int) -> bool:
    return (
        isinstance(model, ExponentialJumps) and model.sign == sign and model.offset == 0.0
    )


def sample_waiting(
    model: WaitingTimeModel, rng: np.random.Generator, size: int | None = None
) -> float | FloatArray:
    """Draw waiting times; a single float when size is None."""
    if size is None:
        return float(model.sample(rng, 1)[0])
    return model.sample(rng, size)


def laplace_psi(model: WaitingTimeModel, s: complex) -> complex:
    return complex(model.laplace(s))


def laplace_h(model: JumpModel, s: complex) -> complex:
    return complex(model.laplace(s))
