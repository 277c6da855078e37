"""
Unit tests for the continuum limit with one-sided stable jumps
"""

import math

import numpy as np
import pytest

from ctrwexit.continuum import (
    ContinuumSpec,
    approximating_process,
    mean_exit_by_survival,
    mean_exit_continuum,
    mean_exit_continuum_via_inversion,
    propagator_double_laplace,
    survival_probability,
    survival_probability_by_quadrature,
)
from ctrwexit.exceptions import DomainError, ModelError
from ctrwexit.favorable import mean_exit_after_jump


@pytest.fixture
def unit_spec():
    """K = v = b = 1, starting from x = 0"""
    return ContinuumSpec(drift=1.0, boundary=1.0, k_limit=1.0)


class TestMeanExit:
    """Test the closed-form mean exit time of the limit process"""

    def test_unit_value(self, unit_spec):
        """Should give 2/√π + (e Erfc(1) - 1) = 0.555963"""
        assert mean_exit_continuum(unit_spec) == pytest.approx(0.555963, abs=1e-6)

    def test_boundary_is_zero(self):
        """Should return 0 at x = b"""
        spec = ContinuumSpec(drift=1.0, boundary=1.0, k_limit=1.0, position=1.0)

        assert mean_exit_continuum(spec) == 0.0
        assert mean_exit_continuum_via_inversion(spec) == 0.0

    def test_negligible_drift(self):
        """Should approach 2/√π as v → 0"""
        spec = ContinuumSpec(drift=1e-6, boundary=1.0, k_limit=1.0)

        assert mean_exit_continuum(spec) == pytest.approx(2.0 / math.sqrt(math.pi), abs=1e-5)

    def test_linear_near_boundary_when_drift_dominates(self):
        """Should vanish like (b - x)/v when K√(b - x)/v ≪ 1"""
        near = ContinuumSpec(drift=1.0, boundary=1.0, k_limit=1.0, position=1.0 - 1e-4)
        less_near = ContinuumSpec(drift=1.0, boundary=1.0, k_limit=1.0, position=1.0 - 4e-4)

        # the √ terms cancel to first order in K√y/v
        ratio = mean_exit_continuum(less_near) / mean_exit_continuum(near)
        assert ratio == pytest.approx(4.0, rel=0.02)
        assert mean_exit_continuum(near) == pytest.approx(1e-4, rel=0.02)

    def test_square_root_scaling_when_jumps_dominate(self):
        """Should scale like √(b - x) when K√(b - x)/v ≫ 1"""
        near = ContinuumSpec(drift=1e-3, boundary=1.0, k_limit=1.0, position=1.0 - 1e-2)
        less_near = ContinuumSpec(drift=1e-3, boundary=1.0, k_limit=1.0, position=1.0 - 4e-2)

        ratio = mean_exit_continuum(less_near) / mean_exit_continuum(near)
        assert ratio == pytest.approx(2.0, rel=0.02)

    @pytest.mark.parametrize("distance", [1.0, 4.0])
    def test_talbot_inversion_agrees(self, distance):
        """Should match Talbot inversion of 1/(vs² + Ks^{3/2}) within 1e-6"""
        spec = ContinuumSpec(drift=1.0, boundary=distance, k_limit=1.0)

        assert mean_exit_continuum_via_inversion(spec) == pytest.approx(
            mean_exit_continuum(spec), abs=1e-6
        )

    def test_gaver_stehfest_cross_check(self, unit_spec):
        """Should match Gaver-Stehfest inversion to a few digits"""
        value = mean_exit_continuum_via_inversion(unit_spec, "gaver-stehfest")

        assert value == pytest.approx(0.555963, abs=1e-4)

    def test_survival_integral_agrees(self, unit_spec):
        """Should equal ∫ Π_b(x, t) dt within 1e-6"""
        assert mean_exit_by_survival(unit_spec) == pytest.approx(
            mean_exit_continuum(unit_spec), abs=1e-6
        )

    def test_discrete_walks_converge(self, unit_spec):
        """Should approach the limit monotonically as μ = k/K shrinks"""
        exact = mean_exit_continuum(unit_spec)
        errors = []
        for mu in (0.1, 0.05, 0.025):
            walk = approximating_process(unit_spec, mu)
            value = mean_exit_after_jump(walk, 0.0, "transform-inversion")
            errors.append(abs(value - exact))

        assert errors[0] > errors[1] > errors[2]

    def test_approximating_process_needs_positive_mu(self, unit_spec):
        """Should reject μ <= 0"""
        with pytest.raises(ModelError):
            approximating_process(unit_spec, 0.0)


class TestSurvival:
    """Test the survival probability Π_b(x, t)"""

    def test_starts_at_one(self, unit_spec):
        """Should be 1 at t = 0"""
        assert float(survival_probability(unit_spec, 0.0)) == pytest.approx(1.0)

    def test_zero_once_drift_exits(self, unit_spec):
        """Should be 0 for t >= (b - x)/v"""
        np.testing.assert_array_equal(survival_probability(unit_spec, [1.0, 2.0]), [0.0, 0.0])

    def test_vanishes_continuously(self, unit_spec):
        """Should approach 0 just before the drift exit time"""
        assert float(survival_probability(unit_spec, 1.0 - 1e-8)) < 1e-6

    def test_density_argument_matches_quadrature(self, unit_spec):
        """Should equal ∫ p(u, t) du over the remaining window within 1e-8"""
        expected = survival_probability_by_quadrature(unit_spec, 0.5)

        assert float(survival_probability(unit_spec, 0.5)) == pytest.approx(expected, abs=1e-8)

    def test_printed_argument_differs(self, unit_spec):
        """Should keep the printed Erfc argument for comparison; it disagrees at K t != 1"""
        expected = survival_probability_by_quadrature(unit_spec, 0.5)
        printed = float(survival_probability(unit_spec, 0.5, argument="printed"))

        assert abs(printed - expected) > 1e-3

    def test_rejects_negative_time(self, unit_spec):
        """Should raise DomainError for t < 0"""
        with pytest.raises(DomainError):
            survival_probability(unit_spec, -0.1)
        with pytest.raises(DomainError):
            survival_probability_by_quadrature(unit_spec, -0.1)

    def test_rejects_unknown_argument(self, unit_spec):
        """Should name the supported forms"""
        with pytest.raises(DomainError):
            survival_probability(unit_spec, 0.5, argument="other")


class TestPropagator:
    """Test the double Laplace transform of the propagator"""

    def test_total_mass(self):
        """Should approach 1/s₂ as s₁ → 0"""
        value = propagator_double_laplace(1.0, 1.0, 1e-14, 2.0)

        assert value.exact.real == pytest.approx(0.5, rel=1e-5)

    def test_small_parameter_limit(self):
        """Should agree with μ/(μs₂ + k√s₁) within 0.2% for k = μ = 1e-3"""
        value = propagator_double_laplace(1e-3, 1e-3, 1.0, 1.0)

        assert abs(value.exact - value.limit) <= 2e-3 * abs(value.limit)

    def test_exponential_waiting_value(self):
        """Should evaluate the exact form for μ = k = 0.5 at s₁ = s₂ = 1"""
        psi = 2.0 / 3.0
        expected = (1.0 - psi) / (1.0 - psi * math.exp(-0.5))

        value = propagator_double_laplace(0.5, 0.5, 1.0, 1.0)
        assert value.exact.real == pytest.approx(expected, rel=1e-12)

    def test_rejects_left_half_plane(self):
        """Should require Re(s₁), Re(s₂) > 0"""
        with pytest.raises(DomainError):
            propagator_double_laplace(1.0, 1.0, -1.0, 1.0)

    def test_rejects_bad_parameters(self):
        """Should require k, μ > 0"""
        with pytest.raises(ModelError):
            propagator_double_laplace(0.0, 1.0, 1.0, 1.0)


class TestContinuumSpec:
    """Test validation of the continuum parameters"""

    def test_rejects_nonpositive_k(self):
        """Should require K > 0"""
        with pytest.raises(ModelError) as exc_info:
            ContinuumSpec(drift=1.0, boundary=1.0, k_limit=0.0)
        assert exc_info.value.parameter == "k_limit"

    def test_rejects_outside_position(self):
        """Should require 0 <= x <= b"""
        with pytest.raises(DomainError):
            ContinuumSpec(drift=1.0, boundary=1.0, k_limit=1.0, position=2.0)

    def test_drift_exit_time(self):
        """Should give (b - x)/v"""
        spec = ContinuumSpec(drift=0.5, boundary=2.0, k_limit=1.0, position=1.0)

        assert spec.drift_exit_time == pytest.approx(2.0)
