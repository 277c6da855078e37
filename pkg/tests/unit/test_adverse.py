"""
Unit tests for the adverse regime (downward jumps against the drift)
"""

import math

import numpy as np
import pytest

from ctrwexit.adverse import (
    AdverseSolution,
    RuinMeanTime,
    adverse_rates,
    fit_closed_form,
    integro_differential_residual,
    mean_exit_after_jump_adverse,
    mean_exit_at_adverse,
    ruin_mean_time,
)
from ctrwexit.distributions import (
    ErlangWaiting,
    ExponentialJumps,
    PointMassJumps,
    ProcessSpec,
)
from ctrwexit.exceptions import DomainError, RegimeError
from ctrwexit.nystrom import ExitTimeTable
from ctrwexit.sentinels import INFINITE, STEADY_STATE


def ruin_spec(rate=1.0, gamma=0.1, drift=0.1):
    return ProcessSpec(drift, math.inf, ErlangWaiting(rate, 2), ExponentialJumps(gamma, sign=-1))


class TestClosedForm:
    """Test the rational-transform solution for Erlang-2 waiting and exponential jumps"""

    def test_rates(self):
        """Should give real roots with product λ(λ - 2γv)/v²"""
        plus, minus = adverse_rates(1.0, 0.1, 0.1)

        assert plus * minus == pytest.approx(98.0)
        assert plus + minus == pytest.approx(2.0 * (1.0 / 0.1 - 0.05))

    def test_boundary_conditions(self, adverse_large_jumps_spec):
        """Should satisfy T̃(b) = 0 and T̃'(b) = -1/v"""
        form = fit_closed_form(adverse_large_jumps_spec)

        assert float(form(1.0)) == pytest.approx(0.0, abs=1e-9)
        assert float(form.derivative(1.0)) == pytest.approx(-10.0, abs=1e-8)

    def test_boundary_constants(self, adverse_large_jumps_spec):
        """Should expose A = T̃(0) and B = T̃'(0)"""
        solution = AdverseSolution(adverse_large_jumps_spec)
        value_at_zero, slope = solution.boundary_constants

        assert value_at_zero == pytest.approx(solution.mean_exit_after_jump(0.0), abs=1e-10)
        assert slope == pytest.approx(float(solution.closed_form.derivative(0.0)), abs=1e-8)

    def test_closed_form_solves_equation(self, adverse_large_jumps_spec):
        """Should leave a relative residual below 1e-6 of 2λ/v²"""
        form = fit_closed_form(adverse_large_jumps_spec)

        assert integro_differential_residual(adverse_large_jumps_spec, form) <= 1e-6 * 200.0

    def test_zero_table_residual(self, adverse_large_jumps_spec):
        """Should leave exactly 2λ/v² for T̃ ≡ 0"""
        positions = np.linspace(0.0, 1.0, 101)
        table = ExitTimeTable(positions, np.zeros_like(positions), "closed-form")

        residual = integro_differential_residual(adverse_large_jumps_spec, table)

        assert residual == pytest.approx(200.0)

    def test_requires_erlang2_exponential(self):
        """Should refuse the closed form for other laws"""
        spec = ProcessSpec(0.1, 1.0, ErlangWaiting(1.0, 3), ExponentialJumps(0.1, sign=-1))

        with pytest.raises(RegimeError) as exc_info:
            fit_closed_form(spec)
        assert exc_info.value.required == "erlang-2/exponential-negative"

    def test_collapsed_root(self):
        """Should handle λ = 2γv, where one root sits at the origin"""
        spec = ProcessSpec(0.1, 1.0, ErlangWaiting(1.0, 2), ExponentialJumps(5.0, sign=-1))
        solution = AdverseSolution(spec)

        closed = solution.mean_exit_after_jump(0.5, "closed-form")
        assert closed == pytest.approx(
            solution.mean_exit_after_jump(0.5, "integral-equation"), abs=1e-4
        )


class TestMeanExit:
    """Test T̃_b(x) and T_b(x, r) with downward jumps"""

    def test_boundary_is_zero(self, adverse_large_jumps_spec):
        """Should return 0 at x = b"""
        assert mean_exit_after_jump_adverse(adverse_large_jumps_spec, 1.0) == 0.0
        assert mean_exit_at_adverse(adverse_large_jumps_spec, 1.0, 0.4) == 0.0

    def test_large_jumps_closed_form_matches_nystrom(self, adverse_large_jumps_spec):
        """Should agree with the Nyström solve within 1e-5 at x = 0.5"""
        solution = AdverseSolution(adverse_large_jumps_spec)
        closed = solution.mean_exit_after_jump(0.5, "closed-form")

        assert solution.mean_exit_after_jump(0.5, "integral-equation") == pytest.approx(
            closed, abs=1e-5
        )

    @pytest.mark.parametrize("x", [0.1, 0.9])
    def test_small_jumps_closed_form_matches_nystrom(self, adverse_small_jumps_spec, x):
        """Should agree with the Nyström solve within 1e-5 for γ = 4"""
        solution = AdverseSolution(adverse_small_jumps_spec)
        closed = solution.mean_exit_after_jump(x, "closed-form")

        assert solution.mean_exit_after_jump(x, "integral-equation") == pytest.approx(
            closed, abs=1e-5
        )

    def test_nystrom_boundary_slope(self, adverse_large_jumps_spec):
        """Should reproduce T̃'(b) = -1/v from the table"""
        table = AdverseSolution(adverse_large_jumps_spec).after_jump_table("integral-equation")

        assert table.boundary_slope() == pytest.approx(-10.0, rel=1e-3)

    def test_nystrom_residual(self, adverse_large_jumps_spec):
        """Should solve the integro-differential form to 1e-3 relative"""
        table = AdverseSolution(adverse_large_jumps_spec).after_jump_table("integral-equation")

        assert integro_differential_residual(adverse_large_jumps_spec, table) <= 1e-3 * 200.0

    def test_r_zero_equals_after_jump(self, adverse_large_jumps_spec):
        """Should equal T̃ at r = 0"""
        solution = AdverseSolution(adverse_large_jumps_spec)

        assert solution.mean_exit_at(0.5, 0.0) == pytest.approx(
            solution.mean_exit_after_jump(0.5), abs=1e-6
        )

    def test_observed_routes_agree(self, adverse_large_jumps_spec):
        """Should give the same T(x, r) from the closed form and the Nyström table"""
        solution = AdverseSolution(adverse_large_jumps_spec)
        closed = solution.mean_exit_at(0.5, 0.4, "closed-form")

        assert solution.mean_exit_at(0.5, 0.4, "integral-equation") == pytest.approx(
            closed, abs=1e-4
        )

    def test_interior_maximum(self, adverse_large_jumps_spec):
        """Should peak inside (0, b) when observed at r = 0.4"""
        solution = AdverseSolution(adverse_large_jumps_spec)
        x = np.linspace(0.0, 1.0, 41)
        values = [solution.mean_exit_at(float(point), 0.4) for point in x]
        peak = int(np.argmax(values))

        assert 0 < peak < x.size - 1

    def test_crossover(self, adverse_small_jumps_spec):
        """Should cross T̃ once observed late: below it near 0, above it near b"""
        solution = AdverseSolution(adverse_small_jumps_spec)
        x = np.linspace(0.0, 0.95, 20)
        late = np.array([solution.mean_exit_at(float(point), 10.0) for point in x])
        tilde = np.array([solution.mean_exit_after_jump(float(point)) for point in x])
        diff = late - tilde

        assert diff[0] < 0 < diff[-1]

    def test_steady_state(self, adverse_small_jumps_spec):
        """Should match r = 50 in the steady state"""
        solution = AdverseSolution(adverse_small_jumps_spec)

        assert solution.mean_exit_at(0.5, STEADY_STATE) == pytest.approx(
            solution.mean_exit_at(0.5, 50.0), abs=1e-8
        )

    def test_point_mass_jumps_use_nystrom(self):
        """Should solve non-exponential jump laws by the integral equation"""
        spec = ProcessSpec(0.1, 1.0, ErlangWaiting(1.0, 2), PointMassJumps(-0.3))
        solution = AdverseSolution(spec)

        assert not solution.closed_form_available
        assert solution.mean_exit_after_jump(0.5) > 0.0

    def test_rejects_favorable_spec(self, favorable_spec):
        """Should raise RegimeError for upward jumps"""
        with pytest.raises(RegimeError):
            AdverseSolution(favorable_spec)

    def test_rejects_ruin_problem(self):
        """Should point to ruin_mean_time for b = ∞"""
        with pytest.raises(RegimeError) as exc_info:
            AdverseSolution(ruin_spec())
        assert exc_info.value.regime == "ruin"

    def test_rejects_zero_drift(self):
        """Should require v > 0"""
        spec = ProcessSpec(0.0, 1.0, ErlangWaiting(1.0, 2), ExponentialJumps(0.1, sign=-1))

        with pytest.raises(RegimeError):
            AdverseSolution(spec)

    def test_unknown_method(self, adverse_large_jumps_spec):
        """Should reject methods outside the adverse list"""
        with pytest.raises(DomainError):
            mean_exit_after_jump_adverse(adverse_large_jumps_spec, 0.5, "transform-inversion")

    def test_record_exit_split(self, adverse_small_jumps_spec):
        """Should keep exit-side fractions from a simulation"""
        solution = AdverseSolution(adverse_small_jumps_spec)
        solution.record_exit_split(upper=30, lower=70)

        assert solution.exit_probability_estimates == {"upper": 0.3, "lower": 0.7}
        with pytest.raises(DomainError):
            solution.record_exit_split(0, 0)


class TestRuinMeanTime:
    """Test the mean ruin time with no upper boundary"""

    def test_from_origin(self):
        """Should give 2/0.98 = 2.040816 at x = 0"""
        result = ruin_mean_time(ruin_spec(), 0.0)

        assert result.is_finite
        assert result.value == pytest.approx(2.040816, abs=1e-6)

    def test_from_ten(self):
        """Should give 2(1 + 1)/0.98 = 4.081633 at x = 10"""
        assert ruin_mean_time(ruin_spec(), 10.0).value == pytest.approx(4.081633, abs=1e-6)

    def test_drift_outpaces_jumps(self):
        """Should be infinite when λ < 2γv"""
        result = ruin_mean_time(ruin_spec(rate=0.1, gamma=1.0), 0.0)

        assert result == RuinMeanTime(INFINITE)
        assert not result.is_finite

    def test_balance_point(self):
        """Should flag λ = 2γv as the boundary case"""
        result = ruin_mean_time(ruin_spec(rate=0.2, gamma=1.0), 0.0)

        assert result.value is INFINITE
        assert result.boundary_case

    def test_requires_exponential_jumps(self):
        """Should raise RegimeError for other jump laws"""
        spec = ProcessSpec(0.1, math.inf, ErlangWaiting(1.0, 2), PointMassJumps(-1.0))

        with pytest.raises(RegimeError):
            ruin_mean_time(spec, 0.0)

    def test_rejects_negative_start(self):
        """Should raise DomainError for x < 0"""
        with pytest.raises(DomainError):
            ruin_mean_time(ruin_spec(), -1.0)
