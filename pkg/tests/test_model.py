"""PDE operator, degenerate family, and residual-sweep behavior."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsfb import closed_form as cf
from bsfb.errors import DegenerateDenominator, DomainError, LinearModeError
from bsfb.fd import richardson_d1, richardson_d2, scaled_step
from bsfb.model import (
    ResidualReport,
    denominator,
    pde_residual,
    residual_sweep,
    u0_family,
    u0_uss,
)
from bsfb.params import ModelParams, PointState


def state(S, t=0.0, u=0.0, uS=0.0, ut=0.0, uSS=0.0):
    return PointState(S=S, t=t, u=u, uS=uS, ut=ut, uSS=uSS)


class TestPdeResidual:
    def test_constant_solution(self, model_q4):
        assert pde_residual(state(S=3.0, u=7.0), model_q4) == 0.0

    def test_rejects_nonpositive_price(self, model_q4):
        with pytest.raises(DomainError):
            pde_residual(state(S=0.0), model_q4)

    def test_degenerate_on_u0_manifold(self, model_q4):
        # k = 1, b = 1: u0 has u_SS = 1/S^2, zeroing the denominator
        S = 1.7
        with pytest.raises(DegenerateDenominator):
            pde_residual(state(S=S, uSS=1.0 / S ** 2), model_q4)

    def test_closed_form_sample_double_precision(self, model_q4):
        # euler_plus map, c=1, d=0 at (S, t) = (2, 0.5); plain double FD
        S, t = 2.0, 0.5

        def u(Ss, tt):
            return cf.u_families(Ss, tt, "euler_plus", 1.0, 0.0, model_q4)

        hS = scaled_step(S)
        ht = scaled_step(t)
        st_pt = state(S=S, t=t,
                      ut=richardson_d1(lambda tt: u(S, tt), t, ht),
                      uSS=richardson_d2(lambda ss: u(ss, t), S, hS))
        assert abs(pde_residual(st_pt, model_q4)) < 1e-6

    def test_linear_mode_routes_to_heat_operator(self):
        m = ModelParams(sigma=2.0, rho=0.0, omega=1.0, k=1.0)
        got = pde_residual(state(S=3.0, ut=0.5, uSS=0.25), m)
        assert got == pytest.approx(0.5 + 2.0 ** 2 * 9.0 / 2.0 * 0.25)

    @settings(max_examples=50, deadline=None)
    @given(alpha=st.floats(-5, 5), beta=st.floats(-5, 5))
    def test_invariant_under_additive_directions(self, alpha, beta):
        # u -> u + alpha S + beta only shifts u and u_S, never u_t or u_SS
        m = ModelParams(sigma=1.0, rho=0.5, omega=2.0, k=1.0)
        base = state(S=2.0, t=0.3, u=1.0, uS=0.2, ut=0.4, uSS=0.1)
        shifted = state(S=2.0, t=0.3, u=1.0 + alpha * 2.0 + beta,
                        uS=0.2 + alpha, ut=0.4, uSS=0.1)
        assert pde_residual(base, m) == pde_residual(shifted, m)


class TestU0Family:
    def test_k1_log_value(self):
        m = ModelParams(sigma=1.0, rho=0.5, omega=2.0, k=1.0)  # b = 1
        got = u0_family(math.e, 0.0, lambda t: 0.0, lambda t: 0.0, m)
        assert got == pytest.approx(-1.0, abs=1e-15)

    def test_k0_s_log_s(self):
        m = ModelParams(sigma=1.0, rho=0.5, omega=4.0, k=0.0)  # b = 2
        got = u0_family(1.0, 0.7, lambda t: 0.0, lambda t: 0.0, m)
        assert got == 0.0

    def test_k2_power(self):
        m = ModelParams(sigma=1.0, rho=0.5, omega=2.0, k=2.0)  # b = 1
        got = u0_family(2.0, 0.0, lambda t: 0.0, lambda t: 0.0, m)
        assert got == pytest.approx(0.25)

    def test_linear_mode_rejected(self):
        m = ModelParams(sigma=1.0, rho=0.0, omega=2.0, k=1.0)
        with pytest.raises(LinearModeError):
            u0_family(1.0, 0.0, lambda t: 0.0, lambda t: 0.0, m)

    @pytest.mark.parametrize("k", [0.0, 1.0, 2.0])
    def test_denominator_vanishes_analytically(self, k, rng):
        m = ModelParams(sigma=1.0, rho=0.5, omega=1.6, k=k)
        for S in rng.uniform(0.05, 20.0, 50):
            den = denominator(S, u0_uss(S, m), m)
            assert abs(den) < 1e-12

    def test_fd_confirms_denominator_zero(self, rng):
        # independent cross-check: differentiate u0 numerically
        m = ModelParams(sigma=1.0, rho=0.5, omega=2.0, k=2.0)
        c1 = np.polynomial.Polynomial(rng.normal(size=3))
        c2 = np.polynomial.Polynomial(rng.normal(size=3))
        for S in (0.5, 1.0, 3.0):
            uSS = richardson_d2(
                lambda s: u0_family(s, 0.4, c1, c2, m), S, scaled_step(S))
            assert abs(denominator(S, uSS, m)) < 1e-7


class TestResidualSweep:
    def test_counts_skipped_points(self, model_q4):
        def u(S, t):
            return cf.u_families(S, t, "trig1", -1.0, 0.0, model_q4)

        rep = residual_sweep(
            u, [0.5, 1.0], [0.0, 0.5], model_q4,
            valid=lambda S, t: S < 0.9)
        assert rep.skipped == 2
        assert rep.n_samples == 2
        assert rep.max_abs < 1e-10

    def test_mp_scalars_accepted(self, model_q4):
        def u(S, t):
            return cf.u_families(S, t, "euler_plus", 1.0, 0.0, model_q4)

        assert isinstance(u(mp.mpf(2), mp.mpf(1)), mp.mpf)

    def test_report_validates(self):
        with pytest.raises(ValueError):
            ResidualReport(max_abs=0.0, l2=0.0, n_samples=0)
