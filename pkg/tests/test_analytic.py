import numpy as np
import pytest
from hypothesis import given, strategies as st

from cribsim.analytic import (
    LongitudinalParams,
    M_longitudinal,
    M_transverse,
    TransverseParams,
    echo_envelope_transverse,
    echo_time,
    efficiency_longitudinal,
    efficiency_transverse,
    epsilon_o,
    freq_shifts,
    gain_longitudinal,
    gain_transverse,
    gain_transverse_infinite_depth,
    gamma_factor,
    phase_Phi,
    phase_diff_01,
    symmetric_crib_transform,
)
from cribsim.errors import DomainError, SingularityError
from cribsim.qubit import make_qubit, sample_input_envelope


def tparams(**kw):
    base = dict(eta=1.0, alpha_o_L=2.0, t1=20.0, tau_o=8.0)
    base.update(kw)
    return TransverseParams(**base)


def lparams(**kw):
    base = dict(eta=3.0, zeta_over_chi=1.0, delta_inh=10.0, t1=20.0, tau_o=8.0)
    base.update(kw)
    return LongitudinalParams(**base)


class TestEpsilonO:
    def test_peak_at_unity(self):
        assert epsilon_o(1.0) == 1.0

    def test_half_value_points(self):
        for eta in (3.0 + 2.0 * np.sqrt(2.0), 3.0 - 2.0 * np.sqrt(2.0)):
            assert abs(epsilon_o(eta) - 0.5) < 1e-12

    @pytest.mark.parametrize("eta", [0.1, 0.25, 0.5, 2.0, 4.0, 10.0])
    def test_reciprocal_symmetry(self, eta):
        a, b = epsilon_o(eta), epsilon_o(1.0 / eta)
        assert abs(a - b) <= 1e-14 * max(a, b)

    def test_nonpositive_rejected(self):
        with pytest.raises(DomainError):
            epsilon_o(0.0)

    @given(eta=st.floats(1e-3, 1e3))
    def test_bounded_by_unity(self, eta):
        assert 0.0 < epsilon_o(eta) <= 1.0


class TestGammaFactor:
    def test_no_decay_for_zero_width(self):
        assert gamma_factor(tparams(gamma_eg=0.0)) == 1.0

    def test_reference_value(self):
        # eta=1, gamma=0.01, t1=20, tau_o=8: exponent 2*0.01*(12 - dt_R/2)
        p = tparams(gamma_eg=0.01)
        assert gamma_factor(p) == pytest.approx(np.exp(-0.24), rel=2e-4)

    def test_decreases_with_storage_time(self):
        vals = [gamma_factor(tparams(gamma_eg=0.01, t1=t1)) for t1 in (15.0, 20.0, 30.0)]
        assert vals[0] > vals[1] > vals[2]

    def test_gradient_kind_uses_shifted_exit(self):
        # tau_z > 0 extends the decay interval relative to a plain t1 clock
        p = lparams(gamma_eg=0.01, eta=2.0, zeta_over_chi=3.0)
        assert p.timing_shift > 0
        bare = np.exp(
            -(1.0 + 1.0 / p.eta) * p.gamma_eg * (p.t1 - p.tau_o - 0.5 * p.eta * 0.5 * p.gamma_eg * (1 + p.eta) / p.eta**2)
        )
        assert gamma_factor(p) < bare


class TestRecallAmplitudes:
    def test_transverse_matched_depth_two(self):
        m = M_transverse(0.0, 0.0, 2.0, 1.0)
        assert m == pytest.approx(1.0 - np.exp(-2.0))
        assert m.imag == 0.0

    def test_transverse_saturates(self):
        assert abs(M_transverse(0.0, 0.0, 200.0, 1.0) - 1.0) < 1e-12

    def test_mismatch_reduces_modulus(self):
        matched = abs(M_transverse(0.0, 0.0, 2.0, 1.0))
        mismatched = abs(M_transverse(4.0, 2.0, 2.0, 1.0))
        assert mismatched < matched

    def test_longitudinal_log4_depth(self):
        assert M_longitudinal(np.log(4.0) / (2.0 * np.pi), 1.0) == pytest.approx(0.75)

    def test_longitudinal_saturates(self):
        assert M_longitudinal(100.0, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_longitudinal_strong_stretch_limit(self):
        # eta -> 0 pushes the recall factor to 1, leaving the capture factor
        zeta = 0.5
        kappa = 2.0 * np.pi * zeta
        assert M_longitudinal(zeta, 1e-4) ** 2 == pytest.approx(1.0 - np.exp(-kappa), rel=1e-9)


class TestEfficiency:
    def test_transverse_reference_value(self):
        eff = efficiency_transverse(tparams())
        assert eff == pytest.approx((1.0 - np.exp(-2.0)) ** 2)
        assert eff == pytest.approx(0.7476, abs=5e-4)

    def test_transverse_deep_matched_limit(self):
        assert efficiency_transverse(tparams(alpha_o_L=80.0)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("eta", [0.5, 1.0, 2.0, 4.0])
    def test_transverse_monotone_in_depth_below_cap(self, eta):
        effs = [
            efficiency_transverse(tparams(eta=eta, alpha_o_L=d))
            for d in (0.5, 1.0, 2.0, 4.0, 8.0, 40.0)
        ]
        assert all(b > a for a, b in zip(effs, effs[1:]))
        assert effs[-1] <= epsilon_o(eta) + 1e-12
        assert effs[-1] == pytest.approx(epsilon_o(eta), rel=1e-6)

    def test_transverse_early_bin_pays_more_decay(self):
        p = tparams(gamma_eg=0.02)
        assert efficiency_transverse(p, 1.0, 0.0) < efficiency_transverse(p, 0.0, 1.0)

    def test_longitudinal_no_bandwidth_penalty(self):
        # at gamma=0 the gradient-kind efficiency is M^2 alone, any eta
        for eta in (0.5, 2.0, 5.0):
            p = lparams(eta=eta)
            assert efficiency_longitudinal(p) == pytest.approx(
                M_longitudinal(p.zeta_over_chi, eta) ** 2, rel=1e-12
            )

    def test_longitudinal_mismatch_independent_at_zero_width(self):
        assert efficiency_longitudinal(lparams(delta_k_L=0.0)) == efficiency_longitudinal(
            lparams(delta_k_L=40.0)
        )

    def test_longitudinal_deep_matched_near_unity(self):
        p = lparams(eta=1.0, zeta_over_chi=3.0)  # effective depth 6*pi
        assert efficiency_longitudinal(p) == pytest.approx(1.0, abs=2e-8)


class TestGain:
    def test_composition_identity(self):
        pt = tparams(eta=2.5, gamma_eg=0.01)
        assert gain_transverse(pt) == pytest.approx(2.5 * efficiency_transverse(pt), rel=1e-12)
        pl = lparams(eta=2.5, gamma_eg=0.01)
        assert gain_longitudinal(pl) == pytest.approx(
            2.5 * efficiency_longitudinal(pl), rel=1e-12
        )

    def test_transverse_gain_ceiling(self):
        assert gain_transverse_infinite_depth(1e6) == pytest.approx(4.0, rel=1e-5)
        assert gain_transverse_infinite_depth(1.0) == pytest.approx(1.0)

    def test_longitudinal_gain_tracks_eta_when_deep(self):
        p = lparams(eta=3.0, zeta_over_chi=3.0)
        assert gain_longitudinal(p) == pytest.approx(3.0, rel=1e-2)


class TestEchoTime:
    def test_symmetric_recall(self):
        assert echo_time(tparams(t1=20.0)) == pytest.approx(40.0)

    def test_compressed_recall(self):
        assert echo_time(tparams(eta=2.0, t1=20.0)) == pytest.approx(30.0)

    def test_gradient_symmetric_recall_unshifted(self):
        p = lparams(eta=1.0, delta_k_L=0.0)
        assert p.timing_shift == pytest.approx(0.0, abs=1e-15)
        assert echo_time(p) == pytest.approx(2.0 * p.t1)

    def test_gradient_shift_components(self):
        p = lparams(eta=2.0, zeta_over_chi=3.0, delta_k_L=5.0)
        expected = (
            p.delta_k_L / p.delta_inh / p.eta
            + p.tau_m / p.eta
            - p.tau_m / p.eta**2
        )
        assert p.timing_shift == pytest.approx(expected, rel=1e-12)
        assert echo_time(p) == pytest.approx(1.5 * p.t1 + expected, rel=1e-12)


class TestPhasePhi:
    def test_vanishes_for_symmetric_recall(self):
        p = lparams(eta=1.0, delta_k_L=0.0)
        for tau in (p.t1 + 1.0, 2.0 * p.t1, 3.0 * p.t1):
            assert phase_Phi(tau, p) == pytest.approx(0.0, abs=1e-12)

    def test_matched_retrieval_log_form(self):
        # with delta_k = 0 the phase collapses to (zeta/chi)(1 - 1/eta) ln(x)
        p = lparams(eta=3.0, delta_k_L=0.0)
        for tau in (p.t1 + 2.0, 2.0 * p.t1):
            x = 0.5 * p.eta * p.delta_inh * (tau - p.t1 + p.tau_m_prime)
            assert phase_Phi(tau, p) == pytest.approx(
                p.zeta_over_chi * (1.0 - 1.0 / p.eta) * np.log(x), rel=1e-12
            )

    def test_before_recall_rejected(self):
        p = lparams()
        with pytest.raises(DomainError):
            phase_Phi(p.t1 - 1.0, p)

    def test_branch_point_rejected(self):
        p = lparams(delta_k_L=5.0)
        tau_branch = p.t1 - p.tau_m_prime + p.delta_k_over_chi / p.eta
        with pytest.raises(DomainError):
            phase_Phi(tau_branch, p)

    def test_smooth_on_echo_support(self):
        p = lparams(eta=2.0, delta_k_L=3.0)
        taus = np.linspace(echo_time(p) - p.tau_o / p.eta - 1.0, echo_time(p) + 1.0, 101)
        vals = np.array([phase_Phi(t, p) for t in taus])
        assert np.all(np.isfinite(vals))
        assert np.max(np.abs(np.diff(vals, 2))) < 1e-3


class TestFreqShifts:
    def test_symmetric_recall_unshifted(self):
        d0, d1 = freq_shifts(lparams(eta=1.0, delta_k_L=0.0))
        assert d0 == 0.0 and d1 == 0.0

    def test_early_switch_rejected(self):
        with pytest.raises(SingularityError):
            freq_shifts(lparams(t1=1.0))

    def test_shifts_small_against_bin_bandwidth(self):
        p = lparams()
        d0, d1 = freq_shifts(p)
        assert abs(d0) < 0.1 * 2.0 * np.pi
        assert abs(d1) < 0.1 * 2.0 * np.pi
        assert abs(d1) < abs(d0)  # the later bin sits deeper into the recall

    @pytest.mark.parametrize("delta_k_L", [0.0, 5.0])
    def test_phase_slope_reproduces_shifts(self, delta_k_L):
        # centered difference of the exit phase at each recalled bin center
        # equals minus the predicted center-frequency shift of that bin
        p = lparams(eta=3.0, delta_k_L=delta_k_L)
        d0, d1 = freq_shifts(p)
        t_late = echo_time(p)  # bin-0 descendant exits last
        h = 1e-5
        for center, shift in ((t_late, d1), (t_late - p.tau_o / p.eta, d0)):
            slope = (phase_Phi(center + h, p) - phase_Phi(center - h, p)) / (2.0 * h)
            assert slope == pytest.approx(-shift, rel=1e-3)


class TestPhaseDiff:
    def test_vanishes_for_symmetric_recall(self):
        assert phase_diff_01(lparams(eta=1.0, delta_k_L=0.0)) == pytest.approx(0.0, abs=1e-12)

    def test_continuous_at_symmetric_point(self):
        assert abs(phase_diff_01(lparams(eta=1.0 + 1e-4))) < 1e-3

    def test_grows_with_compression(self):
        vals = [abs(phase_diff_01(lparams(eta=eta))) for eta in (1.5, 2.0, 3.0)]
        assert vals[0] < vals[1] < vals[2]


class TestEchoEnvelope:
    def grid(self):
        return np.linspace(-6.0, 14.0, 4001)

    def test_energy_ratio_is_efficiency(self):
        q = make_qubit(0.6, 0.8, 0.3, 8.0)
        rec = sample_input_envelope(q, self.grid())
        p = tparams(eta=2.0, alpha_o_L=3.0, t1=16.0, gamma_eg=0.02)
        env = echo_envelope_transverse(rec, p)
        ratio = env.energy() / rec.energy()
        assert ratio == pytest.approx(
            efficiency_transverse(p, q.alpha, q.beta), rel=1e-9
        )

    def test_symmetric_recall_is_time_reversal(self):
        q = make_qubit(0.6, 0.8, 0.3, 8.0)
        rec = sample_input_envelope(q, self.grid())
        p = tparams(eta=1.0, alpha_o_L=80.0, t1=16.0)
        env = echo_envelope_transverse(rec, p, t_grid=2.0 * p.t1 - rec.t[::-1])
        mirrored = rec.a[::-1]
        assert np.max(np.abs(env.a - mirrored)) < 1e-9 * np.max(np.abs(mirrored))

    def test_compression_halves_support(self):
        q = make_qubit(0.6, 0.8, 0.0, 8.0)
        rec = sample_input_envelope(q, self.grid())
        p = tparams(eta=2.0, alpha_o_L=3.0, t1=16.0)
        env = echo_envelope_transverse(rec, p)

        def rms_width(record):
            w = np.abs(record.a) ** 2
            mu = np.sum(record.t * w) / np.sum(w)
            return np.sqrt(np.sum((record.t - mu) ** 2 * w) / np.sum(w))

        assert rms_width(env) == pytest.approx(rms_width(rec) / 2.0, rel=1e-9)


class TestSymmetricTransform:
    def test_basis_flip(self):
        out = symmetric_crib_transform(make_qubit(1.0, 0.0, 0.0, 8.0))
        assert out.alpha == 0.0 and out.beta == 1.0

    def test_double_application_is_identity(self):
        q = make_qubit(0.6, 0.8, 1.1, 8.0, omega_eg_tau_o=0.7)
        back = symmetric_crib_transform(symmetric_crib_transform(q))
        assert back.alpha == pytest.approx(q.alpha)
        assert back.beta == pytest.approx(q.beta)
        assert back.phi == pytest.approx(q.phi)

    def test_equator_picks_up_carrier_phase(self):
        inv = 1.0 / np.sqrt(2.0)
        out = symmetric_crib_transform(make_qubit(inv, inv, 0.0, 8.0), np.pi / 2)
        assert out.phi == pytest.approx(-np.pi)

    @given(
        theta=st.floats(0.0, np.pi / 2),
        phi=st.floats(-3.0, 3.0),
        w=st.floats(-3.0, 3.0),
    )
    def test_involution_property(self, theta, phi, w):
        q = make_qubit(np.cos(theta), np.sin(theta), phi, 8.0, omega_eg_tau_o=w)
        back = symmetric_crib_transform(symmetric_crib_transform(q))
        assert back.alpha == pytest.approx(q.alpha, abs=1e-12)
        assert back.beta == pytest.approx(q.beta, abs=1e-12)
        assert back.phi == pytest.approx(q.phi, abs=1e-12)
