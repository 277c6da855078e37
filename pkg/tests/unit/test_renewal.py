"""
Unit tests for the renewal function and the excess-life law
"""

import math

import numpy as np
import pytest

from ctrwexit.distributions import ErlangWaiting, ExponentialWaiting, TabulatedWaiting
from ctrwexit.exceptions import CoverageError, DomainError, RegimeError
from ctrwexit.renewal import (
    MixtureExcessLife,
    RenewalExcessLife,
    RenewalSolution,
    SteadyStateExcessLife,
    erlang_excess_weights,
    excess_life,
    excess_life_laplace,
    renewal_erlang2,
    renewal_laplace,
    solve_renewal,
    solve_renewal_numeric,
    steady_state_laplace,
    zero_drift_correction,
)
from ctrwexit.sentinels import STEADY_STATE


class TestRenewalFunction:
    """Test m(t), the expected number of jumps in [0, t]"""

    def test_erlang2_closed_form(self):
        """Should give m(1) = 0.283834 for Erlang(1, 2)"""
        assert float(renewal_erlang2(1.0, 1.0)) == pytest.approx(0.283834, abs=1e-6)

    def test_erlang2_rejects_negative_time(self):
        """Should refuse t < 0"""
        with pytest.raises(DomainError):
            renewal_erlang2(1.0, -0.1)

    def test_volterra_matches_erlang2(self):
        """Should reproduce the Erlang-2 closed form with a second-order scheme"""
        waiting = ErlangWaiting(1.0, 2)
        solution = solve_renewal_numeric(waiting, 3.0, 1e-3)
        t = np.linspace(0.0, 3.0, 31)

        np.testing.assert_allclose(solution(t), renewal_erlang2(1.0, t), atol=1e-6)
        assert solution.source == "volterra-numeric"

    @pytest.mark.parametrize("rate", [1.0, 2.5])
    def test_volterra_second_order(self, rate):
        """Should cut the Erlang-2 error by about four when the step halves"""
        errors = []
        for step in (0.02, 0.01):
            solution = solve_renewal_numeric(ErlangWaiting(rate, 2), 3.0, step)
            exact = renewal_erlang2(rate, solution.grid)
            errors.append(float(np.max(np.abs(solution.values - exact))))

        assert errors[1] > 0.0
        assert math.log2(errors[0] / errors[1]) >= 1.9

    def test_volterra_poisson_is_linear(self):
        """Should give m(t) = λt for exponential waiting times"""
        solution = solve_renewal_numeric(ExponentialWaiting(2.0), 2.0, 0.01)

        np.testing.assert_allclose(solution.values, 2.0 * solution.grid, atol=1e-8)

    def test_volterra_grows_like_t_over_mu(self, waiting_table_path):
        """Should approach t/μ + E[τ²]/(2μ²) - 1 for large t"""
        waiting = TabulatedWaiting.from_csv(str(waiting_table_path))
        solution = solve_renewal_numeric(waiting, 30.0, 0.005)
        expected = 30.0 + (7.0 / 6.0) / 2.0 - 1.0

        assert float(solution(30.0)) == pytest.approx(expected, abs=1e-3)

    def test_closed_forms_selected(self):
        """Should use the closed form for Poisson and Erlang-2 laws"""
        assert solve_renewal(ExponentialWaiting(1.0), 1.0).source == "closed-form-poisson"
        assert solve_renewal(ErlangWaiting(1.0, 2), 1.0).source == "closed-form-erlang2"
        assert solve_renewal(ErlangWaiting(1.0, 3), 1.0, 0.01).source == "volterra-numeric"

    def test_coverage_error(self):
        """Should refuse evaluation past the solved horizon"""
        solution = solve_renewal(ErlangWaiting(1.0, 2), 1.0)

        with pytest.raises(CoverageError) as exc_info:
            solution(2.0)
        assert exc_info.value.required == pytest.approx(2.0)
        assert exc_info.value.horizon == pytest.approx(1.0)

    def test_invalid_step(self):
        """Should reject non-positive steps and horizons shorter than one step"""
        with pytest.raises(DomainError):
            solve_renewal_numeric(ErlangWaiting(1.0, 2), 1.0, 0.0)
        with pytest.raises(DomainError):
            solve_renewal_numeric(ErlangWaiting(1.0, 2), 0.001, 0.01)

    def test_unknown_source_rejected(self):
        """Should validate the source label"""
        with pytest.raises(ValueError):
            RenewalSolution(np.zeros(2), np.zeros(2), 1.0, "guess")

    def test_stieltjes_weights_sum_to_increment(self):
        """Should give weights summing to m(upper) - m(lower)"""
        solution = solve_renewal(ErlangWaiting(1.0, 2), 2.0)
        _, weights = solution.stieltjes_nodes(0.3, 1.7)

        expected = float(renewal_erlang2(1.0, 1.7) - renewal_erlang2(1.0, 0.3))
        assert weights.sum() == pytest.approx(expected, rel=1e-10)

    def test_renewal_laplace(self):
        """Should give m̂(s) = 1/(s²μ) for Poisson jumps"""
        value = complex(renewal_laplace(ExponentialWaiting(2.0), 0.5))

        assert value.real == pytest.approx(2.0 / 0.25)


class TestExcessLife:
    """Test the law of the time from r to the next jump"""

    def test_steady_state_cdf(self, erlang_waiting):
        """Should give Φ(1|∞) = 0.448181 for Erlang(1, 2)"""
        law = excess_life(erlang_waiting, None, STEADY_STATE)

        assert float(law.cdf(1.0)) == pytest.approx(0.448181, abs=1e-6)

    def test_steady_state_laplace(self, erlang_waiting):
        """Should give φ̂(1|∞) = 0.375 for Erlang(1, 2)"""
        value = complex(excess_life_laplace(erlang_waiting, STEADY_STATE, 1.0))

        assert value.real == pytest.approx(0.375, abs=1e-12)

    def test_steady_state_laplace_needs_nonzero_s(self, erlang_waiting):
        """Should refuse s = 0 in the steady-state formula"""
        with pytest.raises(DomainError):
            steady_state_laplace(erlang_waiting, 0.0)

    def test_at_origin_is_sojourn_law(self, erlang_waiting):
        """Should reduce to ψ at r = 0"""
        law = excess_life(erlang_waiting, None, 0.0)
        value = complex(excess_life_laplace(erlang_waiting, 0.0, 0.7))

        assert float(law.cdf(1.3)) == pytest.approx(float(erlang_waiting.cdf(1.3)))
        assert value.real == pytest.approx(complex(erlang_waiting.laplace(0.7)).real)

    def test_erlang2_weights(self, erlang_waiting):
        """Should mix Erlang(1, 1) and Erlang(1, 2) with weights (1 ∓ e^{-2λr})/2"""
        weights = erlang_excess_weights(erlang_waiting, 0.4)
        stay = 0.5 * (1.0 + math.exp(-0.8))

        np.testing.assert_allclose(weights, [1.0 - stay, stay])
        np.testing.assert_allclose(erlang_excess_weights(erlang_waiting, STEADY_STATE), [0.5, 0.5])

    def test_erlang3_weights_sum_to_one(self):
        """Should produce a probability vector for higher Erlang shapes"""
        weights = erlang_excess_weights(ErlangWaiting(1.0, 3), 2.0)

        assert weights.sum() == pytest.approx(1.0, abs=1e-5)
        assert np.all(weights >= 0)

    def test_mixture_rational_form(self, erlang_waiting):
        """Should expose φ̂(s|r) as polynomial coefficients"""
        law = excess_life(erlang_waiting, None, 0.4)
        assert isinstance(law, MixtureExcessLife)
        numerator, denominator = law.rational()
        s = 0.9

        ratio = np.polyval(numerator, s) / np.polyval(denominator, s)
        assert ratio == pytest.approx(complex(law.laplace(s)).real)

    @pytest.mark.parametrize("shape", [1, 2, 4])
    def test_mixture_rational_coefficients(self, shape):
        """Should return float coefficient arrays with denominator (s + λ)ⁿ"""
        law = excess_life(ErlangWaiting(1.5, shape), None, 1.3)
        numerator, denominator = law.rational()
        s = np.array([0.2, 2.0 + 1.0j])

        assert isinstance(numerator, np.ndarray)
        assert numerator.dtype == float
        assert denominator.size == shape + 1
        np.testing.assert_allclose(np.polyval(denominator, 0.0), 1.5**shape)
        np.testing.assert_allclose(
            np.polyval(numerator, s) / np.polyval(denominator, s), law.laplace(s), rtol=1e-12
        )

    def test_quadrature_matches_mixture(self):
        """Should agree with the Erlang mixture when forced to Stieltjes quadrature"""
        waiting = ErlangWaiting(1.0, 3)
        mixture = excess_life(waiting, None, 1.3)
        quadrature = excess_life(waiting, None, 1.3, method="quadrature")
        t = np.linspace(0.0, 6.0, 13)

        assert isinstance(quadrature, RenewalExcessLife)
        np.testing.assert_allclose(quadrature.cdf(t), mixture.cdf(t), atol=1e-4)
        assert quadrature.mean == pytest.approx(mixture.mean, abs=1e-4)

    def test_forward_and_history_forms_agree(self, waiting_table_path):
        """Should give the same Φ(t|r) from both sides of r"""
        waiting = TabulatedWaiting.from_csv(str(waiting_table_path))
        renewal = solve_renewal_numeric(waiting, 8.0, 0.002)
        law = RenewalExcessLife(waiting, renewal, 2.5)
        t = np.array([0.2, 0.9, 1.6])

        np.testing.assert_allclose(law.forward_cdf(t), law.cdf(t), atol=1e-4)

    def test_mean_by_quadrature(self, waiting_table_path):
        """Should integrate the survival to the same mean"""
        waiting = TabulatedWaiting.from_csv(str(waiting_table_path))
        law = excess_life(waiting, None, 1.2)

        assert law.mean_by_quadrature() == pytest.approx(law.mean, abs=1e-4)

    def test_general_steady_state(self, waiting_table_path):
        """Should have mean E[τ²]/(2μ) and second moment E[τ³]/(3μ) for a tabulated law"""
        waiting = TabulatedWaiting.from_csv(str(waiting_table_path))
        law = excess_life(waiting, None, STEADY_STATE)

        assert isinstance(law, SteadyStateExcessLife)
        assert law.mean == pytest.approx(7.0 / 12.0, rel=1e-10)
        assert float(law.cdf(2.0)) == pytest.approx(1.0, abs=1e-10)
        assert law.second_moment == pytest.approx(0.5, abs=1e-4)

    def test_general_laplace_forms_agree(self, waiting_table_path):
        """Should match the transform of the excess-life density for non-Erlang laws"""
        waiting = TabulatedWaiting.from_csv(str(waiting_table_path))
        renewal = solve_renewal_numeric(waiting, 50.0, 0.01)
        via_renewal_density = complex(excess_life_laplace(waiting, 5.0, 1.0, renewal))
        via_density = complex(RenewalExcessLife(waiting, renewal, 5.0).laplace(1.0))

        assert via_renewal_density.real == pytest.approx(via_density.real, abs=2e-3)

    def test_large_r_approaches_steady_state(self, waiting_table_path):
        """Should converge to φ̂(s|∞) as r grows"""
        waiting = TabulatedWaiting.from_csv(str(waiting_table_path))
        renewal = solve_renewal_numeric(waiting, 80.0, 0.01)
        late = complex(excess_life_laplace(waiting, 30.0, 1.0, renewal))

        steady = complex(steady_state_laplace(waiting, 1.0))

        assert late.real == pytest.approx(steady.real, abs=2e-3)

    def test_short_renewal_rejected(self, waiting_table_path):
        """Should raise CoverageError when dm does not reach r + 40μ"""
        waiting = TabulatedWaiting.from_csv(str(waiting_table_path))
        renewal = solve_renewal_numeric(waiting, 10.0, 0.01)

        with pytest.raises(CoverageError):
            excess_life_laplace(waiting, 5.0, 1.0, renewal)

    def test_invalid_observation_time(self, erlang_waiting):
        """Should reject negative r and r = inf as a float"""
        with pytest.raises(DomainError):
            excess_life(erlang_waiting, None, -1.0)
        with pytest.raises(DomainError):
            excess_life(erlang_waiting, None, math.inf)

    def test_unknown_method(self, erlang_waiting):
        """Should reject unknown excess-life methods"""
        with pytest.raises(DomainError):
            excess_life(erlang_waiting, None, 1.0, method="guess")


class TestZeroDriftCorrection:
    """Test T_b(x, r) = T̃_b(x) - μ + μ_r without drift"""

    def test_correction_at_r_04(self, erlang_waiting):
        """Should shift by μ_r - μ = -0.275336 at r = 0.4"""
        shift = zero_drift_correction(erlang_waiting, 0.4, tjump=5.0) - 5.0

        assert shift == pytest.approx(-0.275336, abs=1e-6)

    def test_identity_at_origin(self, erlang_waiting):
        """Should leave T̃ unchanged at r = 0"""
        assert zero_drift_correction(erlang_waiting, 0.0, tjump=3.0) == 3.0

    def test_steady_state(self, erlang_waiting):
        """Should use μ_∞ = E[τ²]/(2μ) = 3/2"""
        assert zero_drift_correction(erlang_waiting, STEADY_STATE, 3.0) == pytest.approx(2.5)

    def test_requires_zero_drift(self, erlang_waiting):
        """Should raise RegimeError with nonzero drift"""
        with pytest.raises(RegimeError) as exc_info:
            zero_drift_correction(erlang_waiting, 0.4, 3.0, drift=0.1)
        assert exc_info.value.required == "v=0"
