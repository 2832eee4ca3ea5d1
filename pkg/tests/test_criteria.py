import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adiabatic_probe import criteria
from adiabatic_probe.spin import FieldParams, eigensystem, f_min_closed

# 30-digit reference values (mpmath), K = 1 / K = 10 at R = 0.06
C1_K1 = 0.0298923874053408
TONG_B_K1 = 0.187482244477463
TONG_C_K1 = 0.00562446733432388
C3_K1 = 8.33333333333333
C3_K10 = 0.0333466720021342
COUPLING_ABS_1700 = 319.867206947889  # |<E+|dE-/dt>| at w0 = w' = 1700 Hz, R = 0.06
GAMMA_RATE_DIFF_1700 = -10662.2402315963  # d(gamma_- - gamma_+)/dt, same point


def rephased_basis(p, seed):
    """Canonical eigenvectors multiplied by smooth, random, branch-dependent phases."""
    rng = np.random.default_rng(seed)
    amps = rng.uniform(-1.0, 1.0, size=(2, 3))
    freqs = rng.uniform(0.1, 1.0, size=(2, 3)) * p.omega_prime
    offs = rng.uniform(0, 2 * math.pi, size=(2, 3))

    def phase(t, n):
        return float(np.sum(amps[n] * np.sin(2 * math.pi * freqs[n] * t + offs[n])))

    def basis(t):
        es = eigensystem(t, p)
        return es.v_plus * np.exp(1j * phase(t, 0)), es.v_minus * np.exp(1j * phase(t, 1))

    return basis


class TestClosedForms:
    def test_reference_values(self, fig1_k1, fig1_k10):
        assert criteria.c1_traditional(fig1_k1) == pytest.approx(C1_K1, rel=1e-13)
        tong = criteria.tong_conditions(fig1_k1)
        assert tong.b == pytest.approx(TONG_B_K1, rel=1e-12)
        assert tong.c == pytest.approx(TONG_C_K1, rel=1e-12)
        assert criteria.wu_condition(fig1_k1).c3 == pytest.approx(C3_K1, rel=1e-12)
        assert criteria.wu_condition(fig1_k10).c3 == pytest.approx(C3_K10, rel=1e-12)

    def test_tong_a_is_c1(self, fig1_k1):
        assert criteria.tong_conditions(fig1_k1).a == criteria.c1_traditional(fig1_k1)

    @pytest.mark.parametrize("K,R", [(0.5, 0.05), (1.0, 0.06), (3.0, 0.3), (10.0, 0.06)])
    def test_tong_compact_forms(self, K, R):
        p = FieldParams.from_ratios(K, R, omega1=100.0)
        th = math.atan(R)
        tong = criteria.tong_conditions(p)
        assert tong.b == pytest.approx(math.pi * K * math.sin(th) * math.cos(th) ** 2, rel=1e-12)
        assert tong.c == pytest.approx(0.5 * math.pi * K * math.sin(th) ** 2 * math.cos(th), rel=1e-12)

    def test_tong_scales_with_horizon(self, fig1_k1):
        one = criteria.tong_conditions(fig1_k1)
        three = criteria.tong_conditions(fig1_k1, T=3 / fig1_k1.omega_prime)
        assert three.b == pytest.approx(3 * one.b)
        assert three.c == pytest.approx(3 * one.c)
        assert three.a == one.a

    def test_bad_horizon(self, fig1_k1):
        with pytest.raises(ValueError):
            criteria.tong_conditions(fig1_k1, T=0.0)

    @pytest.mark.parametrize("R", [0.05, 0.3])
    def test_resonance_is_infinite(self, R):
        p = FieldParams.from_ratios(1 + R * R, R, omega1=100.0)
        wu = criteria.wu_condition(p)
        assert wu.resonant
        assert wu.c3 == math.inf
        assert f_min_closed(p) == pytest.approx(0.0, abs=1e-12)

    def test_denominator_sign(self):
        below = criteria.wu_condition(FieldParams.from_ratios(0.9, 0.1, omega1=100.0))
        above = criteria.wu_condition(FieldParams.from_ratios(1.1, 0.1, omega1=100.0))
        assert below.denominator > 0 > above.denominator
        assert not below.resonant and not above.resonant

    def test_static_field(self):
        p = FieldParams(1700.0, 100.0, 0.0)
        assert criteria.c1_traditional(p) == 0.0
        assert criteria.wu_condition(p).c3 == 0.0
        assert criteria.default_horizon(p) == pytest.approx(1 / 1700)

    def test_zero_rf(self):
        p = FieldParams(1700.0, 0.0, 1700.0)
        rep = criteria.full_report(p)
        assert rep.c1 == 0.0 and rep.tong_b == 0.0 and rep.tong_c == 0.0
        # resonant denominator but no coupling: nothing to drive a transition
        assert rep.resonant and rep.wu_c3 == 0.0

    @settings(max_examples=200, deadline=None)
    @given(
        K=st.floats(0.05, 40.0),
        R=st.floats(0.005, 2.0),
    )
    def test_fmin_c3_identity(self, K, R):
        p = FieldParams.from_ratios(K, R, omega1=100.0)
        wu = criteria.wu_condition(p)
        if wu.resonant:
            return
        assert f_min_closed(p) == pytest.approx(1 / math.sqrt(1 + 4 * wu.c3**2), abs=1e-12)

    def test_report_dict(self, fig1_k1):
        d = criteria.full_report(fig1_k1).as_dict()
        assert set(d) == {"K", "R", "c1", "tong_a", "tong_b", "tong_c", "wu_c3", "wu_denominator", "resonant", "horizon"}
        assert d["horizon"] == pytest.approx(1 / 1700)


class TestNumeric:
    def test_coupling_and_connections(self, fig1_k1):
        p = fig1_k1
        assert abs(criteria.coupling_term_numeric(0.3e-3, p)) == pytest.approx(COUPLING_ABS_1700, rel=1e-10)
        plus = criteria.connection_numeric(0.3e-3, p, 0)
        minus = criteria.connection_numeric(0.3e-3, p, 1)
        assert (1j * minus - 1j * plus).real == pytest.approx(GAMMA_RATE_DIFF_1700, rel=1e-10)
        np.testing.assert_allclose([plus, minus], criteria.berry_connections(p), rtol=1e-10)

    @pytest.mark.parametrize("K,R", [(0.5, 0.05), (1.0, 0.06), (1.37, 0.22), (10.0, 0.06)])
    def test_agrees_with_closed_form(self, K, R):
        p = FieldParams.from_ratios(K, R, omega1=100.0)
        num = criteria.full_report(p, numeric=True)
        ref = criteria.full_report(p)
        for name in ("c1", "tong_a", "tong_b", "tong_c", "wu_c3", "wu_denominator"):
            assert getattr(num, name) == pytest.approx(getattr(ref, name), rel=1e-6), name

    def test_arg_rate_vanishes(self, fig1_k1):
        assert criteria.arg_rate_numeric(1e-4, fig1_k1) == pytest.approx(0.0, abs=1e-6)

    def test_resonance_detected_numerically(self):
        p = FieldParams.from_ratios(1 + 0.06**2, 0.06, omega1=100.0)
        wu = criteria.wu_condition_numeric(p)
        # finite differences leave a residue far below the gap, but above 1e-9 of it
        assert abs(wu.denominator) < 1e-6 * 2 * math.pi * p.omega_total


class TestGaugeInvariance:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_invariant_under_rephasing(self, fig1_k1, seed):
        p = FieldParams.from_ratios(0.8, 0.15, omega1=100.0)
        basis = rephased_basis(p, seed)
        t = 0.37 / p.omega_prime
        assert criteria.c1_numeric(p, t, basis) == pytest.approx(criteria.c1_numeric(p, t), rel=1e-8)
        wu = criteria.wu_condition_numeric(p, t, basis)
        assert wu.c3 == pytest.approx(criteria.wu_condition_numeric(p, t).c3, rel=1e-8)
        tong = criteria.tong_conditions_numeric(p, basis=basis)
        ref = criteria.tong_conditions_numeric(p)
        assert tong.b == pytest.approx(ref.b, rel=1e-8)
        assert tong.c == pytest.approx(ref.c, rel=1e-8)

    def test_connection_is_gauge_dependent(self, fig1_k1):
        basis = rephased_basis(fig1_k1, 0)
        t = 1e-4
        assert abs(criteria.connection_numeric(t, fig1_k1, 0, basis) - criteria.connection_numeric(t, fig1_k1, 0)) > 1.0


class TestParallelTransport:
    def test_residual_and_phase(self, fig1_k1):
        p = fig1_k1
        traj = criteria.parallel_transport(np.linspace(0, 1 / 1700, 2001), p)
        assert traj.residual < 1e-9
        # constant rates, so the accumulated phase is linear in t
        assert traj.gamma_minus[-1] - traj.gamma_plus[-1] == pytest.approx(GAMMA_RATE_DIFF_1700 / 1700, rel=1e-10)

    def test_grid_route_matches_quadrature(self, fig1_k1):
        traj = criteria.parallel_transport(np.linspace(0, 1 / 1700, 4001), fig1_k1)
        assert criteria.tong_b_on_grid(traj, fig1_k1) == pytest.approx(TONG_B_K1, rel=1e-5)

    def test_rephased_input_gives_same_gauge(self, fig1_k1):
        times = np.linspace(0, 1 / 1700, 4001)
        a = criteria.parallel_transport(times, fig1_k1)
        b = criteria.parallel_transport(times, fig1_k1, rephased_basis(fig1_k1, 1))
        # both are parallel transported from different initial phases: equal up to a constant
        rel = np.einsum("ik,ik->i", a.v_plus.conj(), b.v_plus)
        np.testing.assert_allclose(np.abs(rel), 1.0, atol=1e-12)
        # trapezoidal phase accumulation is second order in the grid step
        np.testing.assert_allclose(rel / rel[0], 1.0, atol=1e-6)

    def test_no_rf(self):
        p = FieldParams(1700.0, 0.0, 1700.0)
        traj = criteria.parallel_transport(np.linspace(0, 1 / 1700, 101), p)
        assert criteria.tong_b_on_grid(traj, p) == 0.0
        assert traj.residual < 1e-9

    def test_coarse_grid_rejected(self, fig1_k1):
        p = FieldParams.from_ratios(1.0, 0.5, omega1=100.0)
        with pytest.raises(ValueError, match="coarse"):
            criteria.parallel_transport(np.linspace(0, 1 / p.omega_prime, 5), p)

    def test_bad_grid(self, fig1_k1):
        with pytest.raises(ValueError):
            criteria.parallel_transport([0.0], fig1_k1)
        with pytest.raises(ValueError):
            criteria.parallel_transport([0.0, 1e-4, 1e-4], fig1_k1)
