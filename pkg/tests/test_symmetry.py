"""Generators, bracket table, finite actions, invariants, transport."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from bsfb import closed_form as cf
from bsfb.errors import ParamError
from bsfb.params import GroupElement, ModelParams
from bsfb.symmetry import (
    expected_bracket,
    generators,
    group_action,
    invariants,
    lie_bracket,
    surface_residual,
    transport_surface,
)


class TestGenerators:
    def test_general_impact_gives_three_fields(self):
        assert len(generators(special=False)) == 3

    def test_v2_coefficients(self):
        V2 = generators(special=False)[1]
        assert V2.coeffs(3.0, 0.5, -1.0) == (0.0, 0.0, 3.0)

    def test_v4_at_k1_is_pure_scaling(self):
        V4 = generators(k=1.0)[3]
        assert V4.coeffs(2.5, 0.1, 7.0) == (2.5, 0.0, 0.0)

    def test_v4_at_k0(self):
        V4 = generators(k=0.0)[3]
        assert V4.coeffs(2.5, 0.1, 7.0) == (2.5, 0.0, 7.0)


class TestBrackets:
    @pytest.mark.parametrize("k", [0.0, 1.0, 2.0, -0.5])
    def test_table_matches_structure_constants(self, k, rng):
        gens = generators(k=k)
        pts = np.column_stack([rng.uniform(0.2, 5.0, 20),
                               rng.uniform(-2.0, 2.0, 20),
                               rng.uniform(-3.0, 3.0, 20)])
        for i in range(4):
            for j in range(4):
                if i == j:
                    continue
                br = lie_bracket(gens[i], gens[j])
                want = expected_bracket(i + 1, j + 1, k)
                for S, t, u in pts:
                    got = np.array(br.coeffs(S, t, u))
                    if want is None:
                        ref = np.zeros(3)
                    else:
                        scale, idx = want
                        ref = scale * np.array(gens[idx - 1].coeffs(S, t, u))
                    assert np.max(np.abs(got - ref)) < 1e-7

    def test_specific_bracket_values(self):
        gens = generators(k=2.0)
        v2v4 = lie_bracket(gens[1], gens[3])
        S, t, u = 1.3, 0.4, -0.9
        # [V2, V4] = -k V2 = -2 V2
        assert np.allclose(v2v4.coeffs(S, t, u), (0.0, 0.0, -2.0 * S),
                           atol=1e-8)
        v3v4 = lie_bracket(gens[2], gens[3])
        # [V3, V4] = (1-k) V3 = -V3
        assert np.allclose(v3v4.coeffs(S, t, u), (0.0, 0.0, -1.0), atol=1e-8)

    def test_v1_commutes_with_everything(self):
        gens = generators(k=0.7)
        for other in gens[1:]:
            br = lie_bracket(gens[0], other)
            assert np.allclose(br.coeffs(2.0, 1.0, 3.0), 0.0, atol=1e-9)


class TestGroupAction:
    def test_identity_at_zero_orbit_parameter(self):
        g = GroupElement(epsilon=0.0, a1=0.7, a2=-1.0, a3=2.0, a4=3.0)
        assert group_action(2.0, 0.5, -1.0, g, k=0.3) == (2.0, 0.5, -1.0)

    def test_scaling_action_k1(self):
        g = GroupElement(epsilon=math.log(2.0), a1=1.0, a2=0.4)
        S2, t2, u2 = group_action(1.5, 0.2, 0.9, g, k=1.0)
        assert S2 == pytest.approx(3.0)
        assert t2 == pytest.approx(0.2 + 0.4 * math.log(2.0))
        assert u2 == pytest.approx(0.9)

    def test_general_impact_action(self):
        g = GroupElement(epsilon=1.0, a2=1.0, a3=2.0, a4=3.0)
        S2, t2, u2 = group_action(1.5, 0.0, 0.5, g, special=False)
        assert (S2, t2) == (1.5, 1.0)
        assert u2 == pytest.approx(0.5 + 2.0 * 1.5 + 3.0)

    def test_scaling_with_a1_zero_rejected(self):
        g = GroupElement(epsilon=1.0, a1=0.0, a2=1.0)
        with pytest.raises(ParamError):
            group_action(1.0, 0.0, 0.0, g, k=1.0, special=True)

    @pytest.mark.parametrize("k", [0.0, 1.0, 2.0, -0.5, 0.37])
    def test_closed_form_matches_flow_integration(self, k):
        # the closed form must integrate dS/de = a1 S, dt/de = a2,
        # du/de = (1-k) a1 u + a3 S + a4
        a1, a2, a3, a4 = 0.8, -1.1, 0.6, 1.3
        S, t, u = 1.7, 0.4, -2.2
        eps = 1.9

        def flow(e, y):
            return [a1 * y[0], a2, a3 * y[0] + a4 + (1.0 - k) * a1 * y[2]]

        ref = solve_ivp(flow, (0.0, eps), [S, t, u], rtol=1e-12,
                        atol=1e-14).y[:, -1]
        g = GroupElement(epsilon=eps, a1=a1, a2=a2, a3=a3, a4=a4)
        got = group_action(S, t, u, g, k=k)
        assert np.max(np.abs(np.array(got) - ref)) < 1e-9

    @settings(max_examples=40, deadline=None)
    @given(e1=st.floats(-1.5, 1.5), e2=st.floats(-1.5, 1.5),
           k=st.sampled_from([0.0, 1.0, 2.0, -0.5]))
    def test_orbit_parameter_is_additive(self, e1, e2, k):
        base = dict(a1=0.5, a2=-0.3, a3=0.2, a4=0.7)
        p1 = group_action(2.0, 0.1, 1.0, GroupElement(epsilon=e1, **base), k=k)
        p12 = group_action(*p1, GroupElement(epsilon=e2, **base), k=k)
        direct = group_action(2.0, 0.1, 1.0,
                              GroupElement(epsilon=e1 + e2, **base), k=k)
        assert np.allclose(p12, direct, rtol=1e-10, atol=1e-10)


class TestInvariants:
    def test_at_unit_price(self):
        assert invariants(1.0, 0.0, 5.0, k=1.0, a=2.0) == (0.0, 5.0)

    def test_direct_evaluation(self):
        z, v = invariants(math.e, 0.0, 1.0, k=2.0, a=1.0)
        assert z == pytest.approx(1.0)
        assert v == pytest.approx(math.e)

    def test_constant_along_scaling_orbits(self):
        # with a3 = a4 = 0 both invariants are orbit constants for
        # a = -a1/a2 (the sign that cancels the S-scaling against the
        # t-shift)
        a1, a2 = 0.8, 1.3
        a = -a1 / a2
        S, t, u = 2.0, 0.4, 1.7
        z0, v0 = invariants(S, t, u, k=1.0, a=a)
        for eps in np.linspace(-2.0, 2.0, 21):
            g = GroupElement(epsilon=eps, a1=a1, a2=a2)
            z1, v1 = invariants(*group_action(S, t, u, g, k=1.0), k=1.0, a=a)
            assert abs(z1 - z0) < 1e-12
            assert abs(v1 - v0) < 1e-12

    def test_v_invariant_any_k(self):
        a1, a2, k = 0.5, 0.9, 2.3
        S, t, u = 1.4, 0.2, -0.8
        _, v0 = invariants(S, t, u, k=k, a=-a1 / a2)
        g = GroupElement(epsilon=1.1, a1=a1, a2=a2)
        _, v1 = invariants(*group_action(S, t, u, g, k=k), k=k, a=-a1 / a2)
        assert abs(v1 - v0) < 1e-12


class TestTransport:
    def test_additive_transport_is_exactly_residual_free(self, model_q4):
        # the u -> u + a3 S eps + a4 eps direction adds an affine-in-S term
        S = np.geomspace(0.5, 4.0, 100)
        t = np.linspace(0.0, 1.0, 50)
        U = cf.u_families(S[:, None], t[None, :], "euler_plus", 0.5, 0.0,
                          model_q4)
        g = GroupElement(epsilon=0.9, a2=0.3, a3=1.2, a4=-0.4)
        S2, t2, U2 = transport_surface(S, t, U, g, special=False)
        rep0 = surface_residual(S, t, U, model_q4)
        rep1 = surface_residual(S2, t2, U2, model_q4)
        assert rep1.max_abs < 10 * max(rep0.max_abs, 1e-9)

    def test_scaling_transport_keeps_solution_property(self, model_q4):
        S = np.geomspace(0.5, 4.0, 120)
        t = np.linspace(0.0, 1.0, 60)
        U = cf.u_families(S[:, None], t[None, :], "euler_plus", 0.5, 0.0,
                          model_q4)
        g = GroupElement(epsilon=1.0, a1=0.3, a2=0.2, a3=0.1, a4=0.5)
        S2, t2, U2 = transport_surface(S, t, U, g, k=1.0)
        rep = surface_residual(S2, t2, U2, model_q4)
        assert rep.max_abs < 1e-5

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ParamError):
            transport_surface(np.ones(3), np.ones(4), np.ones((4, 3)),
                              GroupElement(epsilon=0.1, a2=1.0),
                              special=False)
