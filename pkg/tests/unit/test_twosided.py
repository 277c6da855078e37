"""
Unit tests for the two-sided regime (jumps of both signs)
"""

import math

import numpy as np
import pytest

from ctrwexit.distributions import (
    ErlangWaiting,
    ExponentialJumps,
    MixtureJumps,
    ProcessSpec,
)
from ctrwexit.exceptions import RegimeError
from ctrwexit.favorable import FavorableSolution, transform_F
from ctrwexit.sentinels import INFINITE
from ctrwexit.twosided import (
    TwoSidedSolution,
    asymptotic_mean_exit,
    cubic_residual,
    cubic_roots,
    equal_rates_coefficients,
    has_ruin_jumps,
    mean_exit_equal_rates,
    mean_exit_twosided_general,
    transform_F_ruinjump,
)

RANDOM_S = np.array([0.3, 1.0, 2.7, 0.8 + 1.5j])


def ruin_jump_spec(p, rate=1.0, gamma=0.1, drift=0.1, boundary=1.0):
    """Mixture whose negative jumps all land below -b"""
    jumps = MixtureJumps(
        1.0 - p, ExponentialJumps(gamma), ExponentialJumps(1.0, sign=-1, offset=boundary)
    )
    return ProcessSpec(drift, boundary, ErlangWaiting(rate, 2), jumps)


def inner_jump_spec(p):
    """Mixture whose negative jumps can land inside (0, b)"""
    jumps = MixtureJumps(1.0 - p, ExponentialJumps(0.1), ExponentialJumps(4.0, sign=-1))
    return ProcessSpec(0.1, 1.0, ErlangWaiting(1.0, 2), jumps)


class TestRuinJumpTransform:
    """Test F̂ when negative jumps always end the walk"""

    def test_detects_ruin_jumps(self):
        """Should tell ruin jumps from jumps landing inside the interval"""
        assert has_ruin_jumps(ruin_jump_spec(0.5))
        assert not has_ruin_jumps(inner_jump_spec(0.5))

    def test_no_negative_jumps_is_favorable(self, favorable_spec):
        """Should reduce to the favorable transform at p = 0"""
        np.testing.assert_allclose(
            transform_F_ruinjump(ruin_jump_spec(0.0), RANDOM_S),
            transform_F(favorable_spec, RANDOM_S),
            rtol=1e-12,
        )

    def test_only_negative_jumps(self):
        """Should give the transform of E[min(ϱ, τ₁)] at p = 1"""
        s = RANDOM_S
        v, lam = 0.1, 1.0
        expected = (s * v + 2 * lam) / (s * (lam + s * v) ** 2)

        np.testing.assert_allclose(
            transform_F_ruinjump(ruin_jump_spec(1.0), s), expected, rtol=1e-10
        )

    def test_independent_of_negative_law(self):
        """Should not depend on h₋ once it lies below -b"""
        other = MixtureJumps(
            0.5, ExponentialJumps(0.1), ExponentialJumps(0.01, sign=-1, offset=2.0)
        )
        spec = ProcessSpec(0.1, 1.0, ErlangWaiting(1.0, 2), other)

        np.testing.assert_allclose(
            transform_F_ruinjump(spec, RANDOM_S),
            transform_F_ruinjump(ruin_jump_spec(0.5), RANDOM_S),
        )

    def test_requires_ruin_jumps(self):
        """Should raise RegimeError when negative jumps stay inside"""
        with pytest.raises(RegimeError) as exc_info:
            transform_F_ruinjump(inner_jump_spec(0.5), 1.0)
        assert exc_info.value.required == "ruin-jumps"


class TestRuinJumpMeanExit:
    """Test T̃_b(x) in the ruin-jump case"""

    def test_only_negative_jumps(self):
        """Should give 2 - 12e^{-10} at ϱ = 10 when every jump is a ruin jump"""
        solution = TwoSidedSolution(ruin_jump_spec(1.0))
        expected = 2.0 - 12.0 * math.exp(-10.0)

        closed = solution.mean_exit_after_jump(0.0, "closed-form")

        assert closed == pytest.approx(expected, abs=1e-9)
        assert solution.mean_exit_after_jump(0.0, "transform-inversion") == pytest.approx(
            expected, abs=1e-8
        )

    def test_closed_form_matches_nystrom(self):
        """Should agree with the general Fredholm solve"""
        spec = ruin_jump_spec(0.5)
        solution = TwoSidedSolution(spec)
        closed = solution.mean_exit_after_jump(0.3, "closed-form")

        assert mean_exit_twosided_general(spec, 0.3) == pytest.approx(closed, abs=1e-5)

    def test_cubic_roots(self):
        """Should find three roots in the left half plane"""
        solution = TwoSidedSolution(ruin_jump_spec(0.5))

        assert solution.roots is not None
        assert np.all(solution.roots.real < 0)
        assert np.all(cubic_residual(1.0, 0.1, 0.1, 0.5, solution.roots) < 1e-12)

    @pytest.mark.parametrize("seed", [1, 2, 3, 4])
    def test_cubic_roots_stable_for_random_parameters(self, seed):
        """Should keep all roots in the left half plane over random (λ, γ, v, p)"""
        rng = np.random.default_rng(seed)
        for rate, gamma, drift in rng.uniform(0.1, 10.0, size=(50, 3)):
            p = 1.0 - rng.random()
            roots = cubic_roots(rate, gamma, drift, p)

            assert roots.size == 3
            assert np.max(roots.real) < 0.0, (rate, gamma, drift, p)

    def test_residues_vanish_at_boundary(self):
        """Should give 2/(pλ) + Σ C_j = 0 so that T̃(b) = 0"""
        _, constants = TwoSidedSolution(ruin_jump_spec(0.5)).residue_constants()

        assert (2.0 / 0.5 + constants.sum()).real == pytest.approx(0.0, abs=1e-9)

    def test_observed_routes_agree(self):
        """Should give the same T(x, r) from the closed form and the Nyström table"""
        solution = TwoSidedSolution(ruin_jump_spec(0.5))
        closed = solution.mean_exit_at(0.5, 10.0, "closed-form")

        assert solution.mean_exit_at(0.5, 10.0, "integral-equation") == pytest.approx(
            closed, abs=1e-4
        )

    def test_r_zero_equals_after_jump(self):
        """Should equal T̃ at r = 0"""
        solution = TwoSidedSolution(ruin_jump_spec(0.5))

        assert solution.mean_exit_at(0.4, 0.0) == pytest.approx(
            solution.mean_exit_after_jump(0.4), abs=1e-6
        )

    def test_boundary_is_zero(self):
        """Should return 0 at x = b"""
        solution = TwoSidedSolution(ruin_jump_spec(0.5))

        assert solution.mean_exit_after_jump(1.0) == 0.0
        assert solution.mean_exit_at(1.0, 10.0) == 0.0


class TestEqualRates:
    """Test the λ = γv residue formula"""

    def test_matches_rational_inversion(self):
        """Should equal exact inversion of F̂ for λ=1, γ=10, v=0.1, p=0.5"""
        spec = ruin_jump_spec(0.5, gamma=10.0)
        exact = TwoSidedSolution(spec).mean_exit_after_jump(0.0, "closed-form")

        assert mean_exit_equal_rates(spec, 0.0) == pytest.approx(exact, abs=1e-8)

    def test_residue_sum_at_boundary(self):
        """Should make 2/(pλ) + Σ_j C_j vanish"""
        coefficients = equal_rates_coefficients(1.0, 0.5)

        assert abs(2.0 / 0.5 + coefficients.sum()) < 1e-9

    def test_boundary_is_zero(self):
        """Should return 0 at x = b"""
        assert mean_exit_equal_rates(ruin_jump_spec(0.5, gamma=10.0), 1.0) == 0.0

    def test_requires_equal_rates(self):
        """Should raise RegimeError when λ ≠ γv"""
        with pytest.raises(RegimeError) as exc_info:
            mean_exit_equal_rates(ruin_jump_spec(0.5), 0.0)
        assert exc_info.value.required == "λ=γv"

    def test_only_negative_jumps(self):
        """Should route q = 0 to E[min(ϱ, τ₁)]"""
        value = mean_exit_equal_rates(ruin_jump_spec(1.0, gamma=10.0), 0.0)

        assert value == pytest.approx(2.0 - 12.0 * math.exp(-10.0), abs=1e-12)


class TestLargeBoundary:
    """Test the b → ∞ limit μ/p"""

    def test_half_ruin(self):
        """Should give 2/(pλ) = 4 for p = 0.5, λ = 1"""
        assert asymptotic_mean_exit(ruin_jump_spec(0.5)) == pytest.approx(4.0)

    def test_all_ruin(self):
        """Should give 1 for p = 1, λ = 2"""
        assert asymptotic_mean_exit(ruin_jump_spec(1.0, rate=2.0)) == pytest.approx(1.0)

    def test_no_ruin(self):
        """Should be infinite without negative jumps"""
        assert asymptotic_mean_exit(ruin_jump_spec(0.0)) is INFINITE

    def test_solution_approaches_limit(self):
        """Should be within 1% of the limit at b = 40 E[J₊]"""
        spec = ruin_jump_spec(0.5, gamma=10.0, boundary=4.0)
        value = TwoSidedSolution(spec).mean_exit_after_jump(0.0, "closed-form")

        assert value == pytest.approx(4.0, rel=1e-2)

    def test_requires_mixture(self, favorable_spec):
        """Should raise RegimeError for one-sided jump laws"""
        with pytest.raises(RegimeError):
            asymptotic_mean_exit(favorable_spec)


class TestGeneralTwoSided:
    """Test the Fredholm solve with negative jumps landing inside"""

    def test_no_negative_jumps_matches_favorable(self, favorable_spec):
        """Should reproduce the favorable closed form at q = 1"""
        spec = inner_jump_spec(0.0)
        expected = FavorableSolution(favorable_spec).mean_exit_after_jump(0.4, "closed-form")

        assert mean_exit_twosided_general(spec, 0.4) == pytest.approx(expected, abs=1e-5)

    def test_auto_uses_integral_equation(self):
        """Should fall back to the Nyström solve without ruin jumps"""
        solution = TwoSidedSolution(inner_jump_spec(0.5))

        assert not solution.closed_form_available
        assert solution.mean_exit_after_jump(0.5) > 0.0

    def test_no_transform_without_ruin_jumps(self):
        """Should refuse transform inversion when h₋ matters"""
        with pytest.raises(RegimeError):
            TwoSidedSolution(inner_jump_spec(0.5)).mean_exit_after_jump(
                0.5, "transform-inversion"
            )

    def test_requires_mixture(self, favorable_spec):
        """Should raise RegimeError for a one-sided jump law"""
        with pytest.raises(RegimeError) as exc_info:
            TwoSidedSolution(favorable_spec)
        assert exc_info.value.required == "mixture"

    def test_requires_finite_boundary(self):
        """Should raise RegimeError for b = ∞"""
        jumps = MixtureJumps(0.5, ExponentialJumps(0.1), ExponentialJumps(1.0, sign=-1))
        spec = ProcessSpec(0.1, math.inf, ErlangWaiting(1.0, 2), jumps)

        with pytest.raises(RegimeError):
            TwoSidedSolution(spec)
