import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meanspec.errors import GridError, ValidationError
from meanspec.kernels import (SQRT_E, GridFunction, StepFunction, convolve,
                              dickman_rho, dickman_rho_grid, rho_minus,
                              rho_minus_correction, rho_minus_grid, step_eval)

CHI_MINUS_CUT = StepFunction((1.0, 2.0), (1.0, -1.0), 0.0)


class TestStepFunction:
    def test_initial_segment(self):
        assert step_eval(CHI_MINUS_CUT, 0.5) == 1

    def test_interval_lookup(self):
        assert step_eval(CHI_MINUS_CUT, 1.5) == -1

    def test_tail(self):
        assert step_eval(CHI_MINUS_CUT, 3.0) == 0

    def test_right_continuity_at_breaks(self):
        assert step_eval(CHI_MINUS_CUT, 1.0) == -1
        assert step_eval(CHI_MINUS_CUT, 2.0) == 0

    def test_negative_argument_rejected(self):
        with pytest.raises(ValidationError):
            step_eval(CHI_MINUS_CUT, -0.1)

    def test_constant_one_kernel(self):
        chi = StepFunction()
        assert chi(0.0) == 1 and chi(17.3) == 1

    @pytest.mark.parametrize("breaks,values,tail", [
        ((0.5,), (1.0,), 0.0),        # first break below 1
        ((1.0,), (0.9,), 0.0),        # initial value not 1
        ((1.0, 1.0), (1.0, 0.0), 0.0),  # breaks not increasing
        ((1.0,), (1.0,), 1.5),        # tail outside disc
        ((1.0,), (1.0, 0.0), 0.0),    # length mismatch
    ])
    def test_invalid_kernels_rejected(self, breaks, values, tail):
        with pytest.raises(ValidationError):
            StepFunction(breaks, values, tail)

    def test_unaligned_breakpoint_rejected(self):
        chi = StepFunction((1.0005,), (1.0,), 0.0)
        with pytest.raises(GridError):
            chi.panel_values(3000, 1e-3)

    def test_panel_values_match_pointwise(self):
        chi = StepFunction((1.0, 1.5, 2.25), (1.0, -0.5, 0.25), -1.0)
        h = 0.25
        panels = chi.panel_values(12, h)
        for j in range(12):
            assert panels[j] == chi(j * h)

    def test_json_round_trip(self):
        chi = StepFunction((1.0, 2.5), (1.0, 0.5 + 0.25j), -0.125j)
        again = StepFunction.from_json(chi.to_json())
        assert again == chi

    def test_malformed_json_rejected(self):
        with pytest.raises(ValidationError):
            StepFunction.from_json('{"breaks": [1.0]}')

    def test_initial_segment_is_one_for_random_kernels(self, rng):
        from conftest import make_complex_kernel
        for _ in range(10):
            k = make_complex_kernel(rng, 1e-3, 4.0, int(rng.integers(2, 6)))
            for t in rng.uniform(0.0, 1.0, 20):
                if t < 1.0:
                    assert step_eval(k, t) == 1

    @given(st.floats(min_value=0.0, max_value=9.99))
    @settings(max_examples=80, deadline=None)
    def test_eval_matches_linear_scan(self, t):
        chi = StepFunction((1.0, 2.0, 4.5), (1.0, 0.5, -0.5), 0.25)
        segs = [(0.0, 1.0 + 0j), (1.0, 0.5 + 0j), (2.0, -0.5 + 0j), (4.5, 0.25 + 0j)]
        expected = next(v for lo, v in reversed(segs) if t >= lo)
        assert chi(t) == expected


class TestGridFunction:
    def test_u_max_matches_length(self):
        g = GridFunction(0.25, np.arange(5.0))
        assert g.u_max == 1.0 and len(g) == 5

    def test_rejects_nan(self):
        with pytest.raises(ValidationError):
            GridFunction(0.1, np.array([1.0, np.nan]))

    def test_value_at_interpolates(self):
        g = GridFunction(0.5, np.array([0.0, 1.0, 4.0]))
        assert g.value_at(0.25) == pytest.approx(0.5)
        assert g.value_at(1.0) == pytest.approx(4.0)

    def test_csv_round_trip(self):
        g = GridFunction(0.125, np.array([1.0, 0.5 + 0.25j, -1.0j]))
        again = GridFunction.from_csv(g.to_csv())
        assert again.h == pytest.approx(g.h)
        assert np.allclose(again.samples, g.samples)

    def test_csv_header_required(self):
        with pytest.raises(ValidationError):
            GridFunction.from_csv("a,b,c\n0,1,0\n")


class TestConvolve:
    def test_ones_give_identity(self):
        one = GridFunction(0.01, np.ones(201))
        c = convolve(one, one)
        assert np.max(np.abs(c.samples - c.u)) <= 1e-10

    def test_iterated_identity(self):
        one = GridFunction(0.01, np.ones(201))
        c = convolve(convolve(one, one), one)
        assert np.max(np.abs(c.samples - c.u ** 2 / 2)) <= 1e-6

    def test_linear_times_exponential(self):
        # Composite trapezoid carries an exact h^2/12 error term here, so the
        # achievable ceiling at h=1e-3 is ~2.3e-7; h=5e-4 lands below 1e-7.
        for h, tol in ((1e-3, 2.5e-7), (5e-4, 1e-7)):
            n = round(1.0 / h) + 1
            t = GridFunction(h, h * np.arange(n))
            e = GridFunction(h, np.exp(h * np.arange(n)))
            c = convolve(t, e)
            exact = np.exp(c.u) - c.u - 1.0
            assert np.max(np.abs(c.samples - exact)) <= tol

    def test_symmetric(self, rng):
        h = 1e-3
        n = 1001
        f = GridFunction(h, np.cos(3.0 * h * np.arange(n)))
        g = GridFunction(h, np.exp(-h * np.arange(n)) * (1 + 0.5j))
        d = np.abs(convolve(f, g).samples - convolve(g, f).samples)
        assert np.max(d) <= 1e-10

    def test_mismatched_step_rejected(self):
        with pytest.raises(GridError):
            convolve(GridFunction(0.1, np.ones(5)), GridFunction(0.2, np.ones(5)))

    def test_common_prefix_length(self):
        f = GridFunction(0.1, np.ones(11))
        g = GridFunction(0.1, np.ones(5))
        assert len(convolve(f, g)) == 5


class TestDickmanRho:
    def test_flat_below_one(self):
        assert dickman_rho(0.7) == 1.0

    def test_log_segment(self):
        assert abs(dickman_rho(2.0, 1e-4) - (1.0 - math.log(2.0))) <= 1e-8

    def test_integral_matches_exp_gamma(self):
        g = dickman_rho_grid(20.0, 1e-4)
        integral = np.trapezoid(g.samples, dx=g.h)
        assert abs(integral - math.exp(np.euler_gamma)) <= 1e-5

    def test_nonincreasing_positive(self):
        # Past u ~ 10 the true values sink below the O(h^2) error floor of
        # the march (~1e-8 at h=1e-3), so strict positivity is asserted
        # where it is meaningful and the tail only up to that floor.
        g = dickman_rho_grid(20.0, 1e-4)
        m1 = round(1.0 / g.h)
        assert np.all(g.samples[m1:round(8.5 / g.h)] > 0.0)
        tail = g.samples[m1:]
        assert np.min(tail) >= -1e-9
        assert np.max(np.diff(tail)) <= 1e-11

    def test_richardson_order(self):
        vals = [dickman_rho(3.0, h) for h in (4e-3, 2e-3, 1e-3)]
        ratio = (vals[0] - vals[1]) / (vals[1] - vals[2])
        assert 3.5 <= ratio <= 4.5

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            dickman_rho(-1.0)


class TestRhoMinus:
    def test_log_segment(self):
        assert abs(rho_minus(1.5, 1e-4) - (1.0 - 2.0 * math.log(1.5))) <= 1e-8

    def test_zero_at_sqrt_e(self):
        assert abs(rho_minus(SQRT_E, 1e-4)) <= 1e-6

    def test_minimum_value(self):
        from meanspec.extremal_search import delta_constants
        assert abs(rho_minus(1.0 + SQRT_E, 1e-4) - delta_constants()[0]) <= 1e-6

    def test_monotone_segments(self):
        g = rho_minus_grid(2.0 + SQRT_E, 1e-3)
        i_min = round((1.0 + SQRT_E) / g.h)
        i_one = round(1.0 / g.h)
        assert np.max(np.diff(g.samples[i_one:i_min + 1])) <= 0.0
        assert np.min(np.diff(g.samples[i_min + 1:])) >= 0.0

    def test_richardson_order(self):
        vals = [rho_minus(3.3, h) for h in (4e-3, 2e-3, 1e-3)]
        ratio = (vals[0] - vals[1]) / (vals[1] - vals[2])
        assert 3.5 <= ratio <= 4.5


class TestRhoMinusCorrection:
    def test_zero_below_two(self):
        assert rho_minus_correction(1.9) == 0.0
        assert rho_minus_correction(0.0) == 0.0

    def test_against_high_precision_quadrature(self):
        import mpmath
        mpmath.mp.dps = 30
        ref = 4.0 * mpmath.quad(lambda v: mpmath.log(v - 1) / v, [2, 3])
        assert abs(rho_minus_correction(3.0) - float(ref)) <= 1e-9

    def test_closed_form_match_on_2_3(self):
        for t in (2.2, 2.8):
            ref = 1.0 - 2.0 * math.log(t) + rho_minus_correction(t)
            assert abs(rho_minus(t, 1e-4) - ref) <= 1e-7
