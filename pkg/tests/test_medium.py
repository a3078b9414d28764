import numpy as np
import pytest

from cribsim.errors import DomainError, KindError, RangeError, ResolutionError
from cribsim.medium import (
    LONGITUDINAL,
    TRANSVERSE,
    MediumConfig,
    NarrowBroadeningWarning,
    absorption_coefficient_transverse,
    detuning_grid,
    effective_depth,
    longitudinal_detuning,
    lorentzian_profile,
)


def transverse(depth=2.0, delta_inh=10.0, **kw):
    return MediumConfig(kind=TRANSVERSE, delta_inh=delta_inh, alpha_o_L=depth, **kw)


def longitudinal(zeta_over_chi=1.0, delta_inh=10.0, **kw):
    return MediumConfig(
        kind=LONGITUDINAL, delta_inh=delta_inh, zeta_over_chi=zeta_over_chi, **kw
    )


class TestLorentzian:
    def test_peak_value(self):
        assert lorentzian_profile(0.0, 10.0) == pytest.approx(1.0 / (10.0 * np.pi))

    def test_half_width_at_half_maximum(self):
        assert lorentzian_profile(10.0, 10.0) == pytest.approx(0.5 / (10.0 * np.pi))

    def test_total_mass_over_span(self):
        d = np.linspace(-500.0, 500.0, 2_000_001)
        mass = np.trapezoid(lorentzian_profile(d, 10.0), d)
        assert mass == pytest.approx(2.0 * np.arctan(50.0) / np.pi, abs=1e-6)

    def test_nonpositive_width_rejected(self):
        with pytest.raises(DomainError):
            lorentzian_profile(0.0, 0.0)


class TestDetuningGrid:
    def test_default_grid_weight_sum(self):
        g = detuning_grid(10.0, 201, 50.0)
        assert g.weight_sum >= 0.97
        assert g.weight_sum == pytest.approx(2.0 * np.arctan(50.0) / np.pi, abs=1e-12)
        assert g.truncation_deficit == pytest.approx(1.0 - g.weight_sum)

    def test_nodes_antisymmetric(self):
        g = detuning_grid(10.0, 201, 50.0)
        assert np.allclose(g.nodes, -g.nodes[::-1], atol=1e-9)
        assert np.all(np.diff(g.nodes) > 0)
        assert np.max(np.abs(g.nodes)) <= 50.0 * 10.0

    def test_quadrature_against_closed_form(self):
        # integral of L(d) * 1/(1 + (d/D)^2) over the real line is exactly 1/2
        g = detuning_grid(10.0, 201, 50.0)
        value = np.sum(g.weights / (1.0 + (g.nodes / 10.0) ** 2))
        assert value == pytest.approx(0.5, abs=1e-3)

    def test_equal_mass_strata(self):
        g = detuning_grid(10.0, 201, 50.0)
        assert np.ptp(g.weights) == 0.0

    def test_coarse_grid_rejected(self):
        with pytest.raises(ResolutionError):
            detuning_grid(10.0, 51, 50.0)

    def test_narrow_span_rejected(self):
        with pytest.raises(DomainError):
            detuning_grid(10.0, 201, 10.0)


class TestLongitudinalDetuning:
    def test_sign_convention(self):
        chi = 10.0
        assert longitudinal_detuning(-0.5, chi) == pytest.approx(+5.0)
        assert longitudinal_detuning(+0.5, chi) == pytest.approx(-5.0)
        assert longitudinal_detuning(0.0, chi) == 0.0

    def test_outside_medium_rejected(self):
        with pytest.raises(RangeError):
            longitudinal_detuning(0.6, 10.0)

    def test_flat_top_distribution(self):
        # uniform positions map to a uniform (flat-top) detuning histogram
        z = (np.arange(1000) + 0.5) / 1000.0 - 0.5
        d = longitudinal_detuning(z, 10.0)
        counts, _ = np.histogram(d, bins=10, range=(-5.0, 5.0))
        assert np.all(counts == 100)


class TestAbsorptionProfile:
    def test_resonant_value_is_depth(self):
        a = absorption_coefficient_transverse(0.0, transverse(depth=2.0))
        assert a == pytest.approx(2.0)

    def test_half_width_point(self):
        a = absorption_coefficient_transverse(10.0, transverse(depth=2.0))
        assert abs(a) == pytest.approx(2.0 / np.sqrt(2.0))

    def test_far_detuned_transparency(self):
        a = absorption_coefficient_transverse(1e6, transverse(depth=2.0))
        assert abs(a) < 1e-4

    def test_conjugate_symmetry(self):
        m = transverse(depth=2.0, gamma_eg=0.3)
        plus = absorption_coefficient_transverse(3.7, m)
        minus = absorption_coefficient_transverse(-3.7, m)
        assert minus == pytest.approx(np.conj(plus))
        assert plus.imag != 0.0

    def test_wrong_kind_rejected(self):
        with pytest.raises(KindError):
            absorption_coefficient_transverse(0.0, longitudinal())


class TestEffectiveDepth:
    def test_transverse_is_resonant_depth(self):
        assert effective_depth(transverse(depth=2.0)) == pytest.approx(2.0)

    def test_gradient_depth(self):
        assert effective_depth(longitudinal(zeta_over_chi=1.0)) == pytest.approx(2.0 * np.pi)
        assert effective_depth(longitudinal(zeta_over_chi=3.0)) == pytest.approx(6.0 * np.pi)


class TestMediumConfig:
    def test_unknown_kind_rejected(self):
        with pytest.raises(KindError):
            MediumConfig(kind="sideways", delta_inh=10.0, alpha_o_L=2.0)

    def test_too_narrow_line_rejected(self):
        with pytest.raises(DomainError):
            transverse(delta_inh=3.0)

    def test_marginal_line_warns(self):
        with pytest.warns(NarrowBroadeningWarning):
            transverse(delta_inh=7.0)

    def test_negative_homogeneous_width_rejected(self):
        with pytest.raises(DomainError):
            transverse(gamma_eg=-0.1)

    def test_missing_depth_rejected(self):
        with pytest.raises(DomainError):
            MediumConfig(kind=TRANSVERSE, delta_inh=10.0)
        with pytest.raises(DomainError):
            MediumConfig(kind=LONGITUDINAL, delta_inh=10.0)

    def test_kind_specific_ratios(self):
        m = longitudinal(zeta_over_chi=1.0, delta_inh=10.0, delta_k_L=4.0)
        assert m.chi == pytest.approx(10.0)
        assert m.delta_k_over_chi == pytest.approx(0.4)
        with pytest.raises(KindError):
            _ = transverse().chi
        with pytest.raises(KindError):
            _ = transverse().delta_k_over_chi
        with pytest.raises(KindError):
            _ = longitudinal().delta_k_over_alpha_o
