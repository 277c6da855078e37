"""Inverse Laplace transforms: fixed Talbot, Gaver-Stehfest and residues.

``invert`` handles general transforms (branch points included) numerically;
``invert_rational`` inverts strictly proper rational transforms exactly by
partial fractions, with poles found as companion-matrix eigenvalues.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial
from numpy.typing import ArrayLike, NDArray

from ctrwexit.exceptions import DomainError, NumericalFailureError, UnsupportedOperationError

logger = logging.getLogger(__name__)

Evaluator = Callable[[NDArray[np.complex128]], NDArray[np.complex128]]

DEFAULT_TALBOT_NODES = 48
DEFAULT_STEHFEST_TERMS = 16
METHODS = ("talbot", "gaver-stehfest")

# Roots closer than this (relative to the largest) form one double pole
ROOT_CLUSTER_TOLERANCE = 1e-7
# Allowed imaginary residue leakage relative to the term magnitudes
IMAGINARY_LEAKAGE_TOLERANCE = 1e-8


@dataclass(frozen=True)
class LaplaceFunction:
    """A transform ĝ(s) evaluable for Re(s) > abscissa.

    The evaluator must accept complex numpy arrays. Rational functions keep
    their coefficients (highest power first) so they can also be inverted
    exactly.
    """

    evaluator: Evaluator
    abscissa: float = 0.0
    numerator: tuple[float, ...] | None = field(default=None)
    denominator: tuple[float, ...] | None = field(default=None)

    @property
    def is_rational(self) -> bool:
        return self.numerator is not None and self.denominator is not None

    def __call__(self, s: ArrayLike) -> NDArray[np.complex128]:
        return np.asarray(self.evaluator(np.asarray(s, dtype=complex)), dtype=complex)

    @classmethod
    def rational(cls, numerator: ArrayLike, denominator: ArrayLike) -> LaplaceFunction:
        num = _trim(np.asarray(numerator, dtype=float))
        den = _trim(np.asarray(denominator, dtype=float))
        if den.size <= num.size:
            raise DomainError(
                f"Rational transform must be strictly proper "
                f"(numerator degree {num.size - 1}, denominator degree {den.size - 1})"
            )
        roots = np.roots(den)
        abscissa = float(np.max(roots.real)) if roots.size else -math.inf

        def evaluate(s: NDArray[np.complex128]) -> NDArray[np.complex128]:
            return np.polyval(num, s) / np.polyval(den, s)

        return cls(evaluate, abscissa, tuple(num.tolist()), tuple(den.tolist()))


def _trim(coeffs: np.ndarray) -> np.ndarray:
    nonzero = np.flatnonzero(coeffs)
    if nonzero.size == 0:
        return np.zeros(1)
    return coeffs[nonzero[0] :]


def _check_times(t: ArrayLike) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
        raise DomainError("Inversion times must be finite and positive", value=t)
    return arr


def talbot(f: LaplaceFunction, t: ArrayLike, nodes: int = DEFAULT_TALBOT_NODES) -> np.ndarray:
    """Fixed Talbot inversion on the contour s(θ) = (ρ/t) θ (cot θ + i), ρ = 2M/5.

    A positive abscissa σ₀ is handled by inverting ĝ(s + σ₀) and
    multiplying by e^{σ₀ t}.
    """
    times = _check_times(t)
    shift = max(f.abscissa, 0.0) if math.isfinite(f.abscissa) else 0.0
    flat = times.reshape(-1)

    rho = 0.4 * nodes
    theta = np.arange(1, nodes) * np.pi / nodes
    cot = 1.0 / np.tan(theta)
    sigma = theta + (theta * cot - 1.0) * cot
    scaled = rho * theta * (cot + 1j)

    points = np.empty((flat.size, nodes), dtype=complex)
    points[:, 0] = rho / flat
    points[:, 1:] = scaled[None, :] / flat[:, None]
    values = f(points + shift)
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))
        raise NumericalFailureError(
            "Transform is not finite on the Talbot contour",
            method="talbot",
            diagnostics={
                "nodes": (points + shift)[~np.isfinite(values)].tolist()[:8],
                "count": int(bad.shape[0]),
                "abscissa": f.abscissa,
            },
        )

    head = 0.5 * math.exp(rho) * values[:, 0].real
    body = np.real(np.exp(flat[:, None] * points[:, 1:]) * values[:, 1:] * (1.0 + 1j * sigma))
    result = rho / (nodes * flat) * (head + body.sum(axis=1))
    result = result * np.exp(shift * flat)
    return result.reshape(times.shape)[()]  # type: ignore[no-any-return]


@lru_cache(maxsize=8)
def stehfest_coefficients(terms: int) -> tuple[float, ...]:
    """Salzer summation weights V_k, k = 1..N (N even)."""
    if terms % 2 or terms < 2:
        raise DomainError(f"Gaver-Stehfest needs an even number of terms, got {terms}")
    half = terms // 2
    weights = []
    for k in range(1, terms + 1):
        total = 0.0
        for j in range((k + 1) // 2, min(k, half) + 1):
            total += (
                j**half
                * math.factorial(2 * j)
                / (
                    math.factorial(half - j)
                    * math.factorial(j)
                    * math.factorial(j - 1)
                    * math.factorial(k - j)
                    * math.factorial(2 * j - k)
                )
            )
        weights.append((-1) ** (k + half) * total)
    return tuple(weights)


def gaver_stehfest(
    f: LaplaceFunction, t: ArrayLike, terms: int = DEFAULT_STEHFEST_TERMS
) -> np.ndarray:
    """Gaver-Stehfest inversion from real-axis samples at s = k ln2 / t."""
    times = _check_times(t)
    flat = times.reshape(-1)
    weights = np.asarray(stehfest_coefficients(terms))
    points = np.arange(1, terms + 1)[None, :] * math.log(2.0) / flat[:, None]
    values = f(points.astype(complex))
    if not np.all(np.isfinite(values)):
        raise NumericalFailureError(
            "Transform is not finite on the real axis",
            method="gaver-stehfest",
            diagnostics={"nodes": points[~np.isfinite(values)].tolist()[:8]},
        )
    result = math.log(2.0) / flat * (values.real @ weights)
    return result.reshape(times.shape)[()]  # type: ignore[no-any-return]


def invert(
    f: LaplaceFunction,
    t: ArrayLike,
    method: str = "talbot",
    nodes: int | None = None,
) -> np.ndarray:
    """Numerical Bromwich inversion of ĝ at time(s) t.

    Args:
        f: Transform to invert
        t: Positive time or array of times
        method: "talbot" (default, M=48) or "gaver-stehfest" (N=16)
        nodes: Override M or N

    Raises:
        DomainError: If any t <= 0 or the method is unknown
        NumericalFailureError: If ĝ is not finite at a quadrature node
    """
    if method == "talbot":
        return talbot(f, t, nodes or DEFAULT_TALBOT_NODES)
    if method == "gaver-stehfest":
        return gaver_stehfest(f, t, nodes or DEFAULT_STEHFEST_TERMS)
    raise DomainError(f"Unknown inversion method '{method}' (expected one of {METHODS})")


# ---------------------------------------------------------------------------
# Exact inversion of rational transforms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidueExpansion:
    """g(t) = Σ_k e^{z_k t} Σ_j a_{kj} t^j, the inverse of a rational transform."""

    roots: tuple[complex, ...]
    coefficients: tuple[tuple[complex, ...], ...]

    def _evaluate(self, t: ArrayLike, order: int) -> np.ndarray:
        times = np.asarray(t, dtype=float)
        total = np.zeros(times.shape, dtype=complex)
        magnitude = np.zeros(times.shape)
        for root, coeffs in zip(self.roots, self.coefficients, strict=True):
            ascending = np.asarray(coeffs, dtype=complex)
            # d^k/dt^k e^{zt}P(t) = e^{zt} Σ_m C(k,m) z^{k-m} P^(m)(t)
            poly = np.zeros(times.shape, dtype=complex)
            for m in range(min(order, ascending.size - 1) + 1):
                shape = polynomial.polyder(ascending, m) if m else ascending
                weight = math.comb(order, m) * root ** (order - m)
                poly = poly + weight * polynomial.polyval(times, shape)
            term = np.exp(root * times) * poly
            total = total + term
            magnitude = magnitude + np.abs(term)

        leakage = np.abs(total.imag)
        limit = IMAGINARY_LEAKAGE_TOLERANCE * np.maximum(1.0, magnitude)
        if np.any(leakage > limit):
            raise NumericalFailureError(
                "Residues leave an imaginary part in a real inverse transform",
                method="residues",
                diagnostics={"max_leakage": float(np.max(leakage)), "roots": list(self.roots)},
            )
        return total.real[()]  # type: ignore[no-any-return]

    def __call__(self, t: ArrayLike) -> np.ndarray:
        return self._evaluate(t, 0)

    def derivative(self, t: ArrayLike, order: int = 1) -> np.ndarray:
        if order < 0:
            raise DomainError(f"Derivative order must be >= 0, got {order}", value=order)
        return self._evaluate(t, order)


def _series_quotient(numerator: np.ndarray, denominator: np.ndarray, count: int) -> np.ndarray:
    """First ``count`` Taylor coefficients at 0 of N/Q (ascending powers)."""
    num = numerator[::-1]
    den = denominator[::-1]
    out = np.zeros(count)
    for j in range(count):
        acc = num[j] if j < num.size else 0.0
        for i in range(1, min(j, den.size - 1) + 1):
            acc -= den[i] * out[j - i]
        out[j] = acc / den[0]
    return out


def _cluster_roots(roots: np.ndarray) -> list[tuple[complex, int]]:
    if roots.size == 0:
        return []
    scale = float(np.max(np.abs(roots)))
    tol = ROOT_CLUSTER_TOLERANCE * scale
    remaining = list(roots)
    clusters: list[tuple[complex, int]] = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed] + [z for z in remaining if abs(z - seed) <= tol]
        remaining = [z for z in remaining if abs(z - seed) > tol]
        if len(members) > 2:
            raise UnsupportedOperationError(
                f"Pole of multiplicity {len(members)} near {seed:.6g} (at most 2 supported)",
                operation="invert_rational",
            )
        clusters.append((complex(np.mean(members)), len(members)))
    return clusters


def partial_fractions(numerator: ArrayLike, denominator: ArrayLike) -> ResidueExpansion:
    """Residue expansion of a strictly proper rational transform N(s)/D(s).

    Poles at the origin may have any multiplicity (1/s^k prefactors); other
    poles come from the companion matrix of D and may be simple or double.

    Raises:
        DomainError: If the function is not strictly proper
        UnsupportedOperationError: If a nonzero pole has multiplicity > 2
    """
    num = _trim(np.asarray(numerator, dtype=float))
    den = _trim(np.asarray(denominator, dtype=float))
    if den.size <= num.size or not np.any(den):
        raise DomainError("Rational transform must be strictly proper")
    if not np.any(num):
        return ResidueExpansion((), ())

    # Cancel common powers of s, then peel the pole at the origin
    while num[-1] == 0 and den[-1] == 0:
        num, den = num[:-1], den[:-1]
    zero_order = 0
    while den[-1] == 0:
        den = den[:-1]
        zero_order += 1
    reduced = den
    full = np.concatenate((den, np.zeros(zero_order)))

    roots: list[complex] = []
    coefficients: list[tuple[complex, ...]] = []
    if zero_order:
        taylor = _series_quotient(num, reduced, zero_order)
        poly = [
            complex(taylor[zero_order - 1 - p] / math.factorial(p)) for p in range(zero_order)
        ]
        roots.append(0j)
        coefficients.append(tuple(poly))

    d1 = np.polyder(full, 1)
    d2 = np.polyder(full, 2)
    d3 = np.polyder(full, 3) if full.size > 3 else np.zeros(1)
    dn = np.polyder(num, 1) if num.size > 1 else np.zeros(1)

    for root, multiplicity in _cluster_roots(np.roots(reduced)):
        n_val = np.polyval(num, root)
        if multiplicity == 1:
            coefficients.append((n_val / np.polyval(d1, root),))
        else:
            dd2 = np.polyval(d2, root)
            dd3 = np.polyval(d3, root)
            linear = 2.0 * n_val / dd2
            constant = 2.0 * np.polyval(dn, root) / dd2 - (2.0 / 3.0) * n_val * dd3 / dd2**2
            coefficients.append((constant, linear))
        roots.append(root)

    logger.debug("Partial fractions: %d poles (%d at the origin)", len(roots), zero_order)
    return ResidueExpansion(tuple(roots), tuple(coefficients))


def invert_rational(numerator: ArrayLike, denominator: ArrayLike, t: ArrayLike) -> np.ndarray:
    """Exact inverse of N(s)/D(s) at time(s) t."""
    return partial_fractions(numerator, denominator)(t)
