"""Closed-form recall solutions for both broadening kinds.

These are the independent reference route against which the numerical
propagation in :mod:`cribsim.dynamics` is validated: recall efficiencies,
gains, echo times, the recalled transverse envelope, and the gradient
kind's nonlinear phase with its per-bin frequency shifts.

Conventions: time in input-bin widths, bin 0 centered at t=0, switch at
``t1``, compression parameter ``eta`` (recalled detunings are the stored
ones scaled by -eta, so eta>1 compresses, eta<1 stretches).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError
from .qubit import FieldRecord, TimeBinQubit, make_qubit


@dataclass(frozen=True)
class TransverseParams:
    """Recall parameters for the uniformly broadened (transverse) kind.

    ``delta_inh`` (the line width) does not enter any of the closed forms,
    which hold in the broad-line limit; it is carried so a parameter set
    fully describes the matching numerical medium.
    """

    eta: float
    alpha_o_L: float
    t1: float
    tau_o: float = 0.0
    gamma_eg: float = 0.0
    delta_k_L: float = 0.0
    bin_width: float = 1.0
    carrier_detuning: float = 0.0
    delta_inh: float = 0.0

    def __post_init__(self):
        if self.eta <= 0:
            raise DomainError("compression parameter must be positive")
        if self.alpha_o_L <= 0:
            raise DomainError("optical depth must be positive")
        if self.gamma_eg < 0:
            raise DomainError("homogeneous width cannot be negative")

    @property
    def delta_k_over_alpha_o(self) -> float:
        return self.delta_k_L / self.alpha_o_L


@dataclass(frozen=True)
class LongitudinalParams:
    """Recall parameters for the gradient (longitudinal) kind.

    ``delta_inh`` is the total gradient spread chi*L; the effective depth
    is 2*pi*zeta_over_chi.
    """

    eta: float
    zeta_over_chi: float
    delta_inh: float
    t1: float
    tau_o: float = 0.0
    gamma_eg: float = 0.0
    delta_k_L: float = 0.0
    bin_width: float = 1.0

    def __post_init__(self):
        if self.eta <= 0:
            raise DomainError("compression parameter must be positive")
        if self.zeta_over_chi <= 0:
            raise DomainError("coupling-to-gradient ratio must be positive")
        if self.delta_inh <= 0:
            raise DomainError("gradient spread must be positive")

    @property
    def kappa_eff(self) -> float:
        return 2.0 * np.pi * self.zeta_over_chi

    @property
    def delta_k_over_chi(self) -> float:
        """delta_k / chi in time units (= delta_k_L / delta_inh for L=1)."""
        return self.delta_k_L / self.delta_inh

    @property
    def tau_m(self) -> float:
        """Dwell-time offset of the stored polarization, 2(zeta/chi)/Delta_inh."""
        return 2.0 * self.zeta_over_chi / self.delta_inh

    @property
    def tau_m_prime(self) -> float:
        """Recall-side dwell offset: tau_m with the scaled gradient, tau_m/eta^2."""
        return self.tau_m / self.eta**2

    @property
    def timing_shift(self) -> float:
        """Recall-time offset tau_z = delta_k/chi' + tau_m/eta - tau_m'."""
        return (
            self.delta_k_over_chi / self.eta
            + self.tau_m / self.eta
            - self.tau_m_prime
        )


def epsilon_o(eta: float) -> float:
    """Bandwidth-matching prefactor 4*eta/(1+eta)^2 (peaks at 1 for eta=1)."""
    if eta <= 0:
        raise DomainError("compression parameter must be positive")
    return 4.0 * eta / (1.0 + eta) ** 2


def _dt_r(eta: float, gamma_eg: float, bin_width: float) -> float:
    # Gaussian-duration correction to the dephasing interval; exactly the
    # completed-square term of the decay integrated across a recalled bin.
    return 0.5 * gamma_eg * (1.0 + eta) * (bin_width / eta) ** 2


def gamma_factor(p: TransverseParams | LongitudinalParams) -> float:
    """Homogeneous-decay amplitude factor of one full recall cycle.

    exp{-(1+1/eta) gamma_eg (t_x - tau_o - eta dt_R/2)}, where t_x is the
    switch time, shifted by the gradient kind's exit delay tau_z when that
    kind is in play.
    """
    t_x = p.t1
    if isinstance(p, LongitudinalParams):
        t_x = p.t1 + p.timing_shift
    dtr = _dt_r(p.eta, p.gamma_eg, p.bin_width)
    return float(
        np.exp(-(1.0 + 1.0 / p.eta) * p.gamma_eg * (t_x - p.tau_o - 0.5 * p.eta * dtr))
    )


def _bin_decay_bracket(
    alpha: float, beta: float, eta: float, gamma_eg: float, tau_o: float
) -> float:
    # {alpha^2 e^{-2(1+1/eta) gamma tau_o} + beta^2}; the leading input bin
    # (weight alpha) waits tau_o longer absorbed and tau_o/eta longer on
    # recall.
    early_loss = np.exp(-2.0 * (1.0 + 1.0 / eta) * gamma_eg * tau_o)
    return float(alpha * alpha * early_loss + beta * beta)


def M_transverse(
    delta_k_L: float, delta_k_over_alpha_o: float, alpha_o_L: float, eta: float
) -> complex:
    """Complex recall amplitude of the uniformly broadened kind.

    Numerator: finite-depth absorption/re-absorption factor
    1 - exp{-(1+1/eta) alpha_o L / 2 + i delta_k L}; denominator: the
    phase-mismatch dispersion 1 - 2i (delta_k/alpha_o) eta/(eta+1).
    """
    depth = 0.5 * (1.0 + 1.0 / eta) * alpha_o_L
    num = 1.0 - np.exp(-depth + 1j * delta_k_L)
    den = 1.0 - 2.0j * delta_k_over_alpha_o * eta / (eta + 1.0)
    return complex(num / den)


def _m_transverse(p: TransverseParams) -> complex:
    return M_transverse(p.delta_k_L, p.delta_k_over_alpha_o, p.alpha_o_L, p.eta)


def efficiency_transverse(
    p: TransverseParams, alpha: float = 1.0, beta: float = 0.0
) -> float:
    """Recall efficiency Gamma^2 |M|^2 epsilon_o(eta) {alpha^2 e^... + beta^2}.

    ``alpha``/``beta`` are the stored qubit's bin amplitudes (alpha^2 +
    beta^2 = 1); they only matter when gamma_eg > 0.
    """
    g = gamma_factor(p)
    return float(
        g * g
        * abs(_m_transverse(p)) ** 2
        * epsilon_o(p.eta)
        * _bin_decay_bracket(alpha, beta, p.eta, p.gamma_eg, p.tau_o)
    )


def gain_transverse(
    p: TransverseParams, alpha: float = 1.0, beta: float = 0.0
) -> float:
    """Bandwidth-compression gain G = eta * efficiency."""
    return p.eta * efficiency_transverse(p, alpha, beta)


def gain_transverse_infinite_depth(eta: float) -> float:
    """Saturated-depth gain 4 eta^2/(1+eta)^2 (approaches 4 for eta >> 1)."""
    return 4.0 * eta * eta / (1.0 + eta) ** 2


def M_longitudinal(zeta_over_chi: float, eta: float) -> float:
    """Recall amplitude sqrt{(1 - e^{-kappa/eta})(1 - e^{-kappa})}, kappa = 2 pi zeta/chi."""
    kappa = 2.0 * np.pi * zeta_over_chi
    return float(np.sqrt((1.0 - np.exp(-kappa / eta)) * (1.0 - np.exp(-kappa))))


def efficiency_longitudinal(
    p: LongitudinalParams, alpha: float = 1.0, beta: float = 0.0
) -> float:
    """Recall efficiency of the gradient kind (decay runs to the shifted exit)."""
    g = gamma_factor(p)
    return float(
        g * g
        * M_longitudinal(p.zeta_over_chi, p.eta) ** 2
        * _bin_decay_bracket(alpha, beta, p.eta, p.gamma_eg, p.tau_o)
    )


def gain_longitudinal(
    p: LongitudinalParams, alpha: float = 1.0, beta: float = 0.0
) -> float:
    """G = eta * efficiency; for gamma=0 this is eta(1-e^{-kappa/eta})(1-e^{-kappa})."""
    return p.eta * efficiency_longitudinal(p, alpha, beta)


def echo_time(p: TransverseParams | LongitudinalParams) -> float:
    """Exit time of the recalled bin-0 descendant (the trailing recalled bin).

    Transverse: (1 + 1/eta) t1 - dt_R.  Longitudinal: (1 + 1/eta) t1 + tau_z
    with the dwell/mismatch shift tau_z = delta_k/chi' + tau_m/eta - tau_m'.
    """
    base = (1.0 + 1.0 / p.eta) * p.t1
    if isinstance(p, TransverseParams):
        return base - _dt_r(p.eta, p.gamma_eg, p.bin_width)
    return base + p.timing_shift


def phase_Phi(tau: float, p: LongitudinalParams) -> float:
    """Nonlinear recall phase of the gradient kind at exit time ``tau``.

    Phi = (zeta/chi) * ln{ (eta Dinh/2)|tau - t1 + tau_m' - dk/chi'| /
    ((eta Dinh/2)(tau - t1 + tau_m'))^{1/eta} }.  The numerator's absolute
    value has a branch point where its argument vanishes; evaluation at
    either log singularity raises instead of guessing a branch.
    """
    x = tau - p.t1 + p.tau_m_prime
    half_line = 0.5 * p.eta * p.delta_inh
    num_arg = half_line * abs(x - p.delta_k_over_chi / p.eta)
    den_arg = half_line * x
    if den_arg <= 0.0:
        raise DomainError("exit time precedes the recall stage")
    if num_arg < 1e-12 * max(1.0, half_line):
        raise DomainError("exit time sits on the branch point of the phase")
    return float(p.zeta_over_chi * (np.log(num_arg) - np.log(den_arg) / p.eta))


def freq_shifts(p: LongitudinalParams) -> tuple[float, float]:
    """Center-frequency shifts (bin 0, bin 1) of the recalled bins.

    domega_0 = (zeta/chi)[1/(t1 - tau_o + tau_m + dk/chi) - eta/(t1 - tau_o + tau_m)]
    domega_1 = (zeta/chi)[1/(t1 + tau_m + dk/chi) - eta/(t1 + tau_m)]
    """
    s = p.zeta_over_chi
    dk = p.delta_k_over_chi
    base0 = p.t1 - p.tau_o + p.tau_m
    base1 = p.t1 + p.tau_m
    if base0 <= 0 or base0 + dk <= 0 or base1 + dk <= 0:
        raise SingularityError("switch time too early for the configured bins")
    d0 = s * (1.0 / (base0 + dk) - p.eta / base0)
    d1 = s * (1.0 / (base1 + dk) - p.eta / base1)
    return float(d0), float(d1)


def phase_diff_01(p: LongitudinalParams) -> float:
    """Accumulated inter-bin phase error Phi(exit of bin 0) - Phi(exit of bin 1).

    Bin 0 exits last (at echo_time), bin 1 a compressed separation tau_o/eta
    earlier; the difference vanishes identically at eta = 1, delta_k = 0.
    """
    t_late = echo_time(p)
    return phase_Phi(t_late, p) - phase_Phi(t_late - p.tau_o / p.eta, p)


def echo_envelope_transverse(
    input_record: FieldRecord,
    p: TransverseParams,
    t_grid: np.ndarray | None = None,
) -> FieldRecord:
    """Closed-form recalled envelope of the transverse kind.

    A_out(tau) = sqrt(epsilon_o) * M * e^{i phi_c - (1+eta) gamma (tau - t1)}
                 * sqrt(eta) * A_in(-eta (tau - t1) + t1),
    with phi_c = -(1+eta) * carrier_detuning * t1.  When no grid is given
    the output grid is the exact preimage of the input grid under the time
    reversal, so no interpolation enters and the energy ratio reproduces
    the closed-form efficiency to near machine precision.
    """
    eta = p.eta
    pref = (
        np.sqrt(epsilon_o(eta))
        * _m_transverse(p)
        * np.exp(-1j * (1.0 + eta) * p.carrier_detuning * p.t1)
        * np.sqrt(eta)
    )
    if t_grid is None:
        s = input_record.t[::-1]
        tau = p.t1 + (p.t1 - s) / eta
        amp = input_record.a[::-1].copy()
    else:
        tau = np.asarray(t_grid, dtype=float)
        s = -eta * (tau - p.t1) + p.t1
        amp = np.interp(s, input_record.t, input_record.a.real, left=0.0, right=0.0) + (
            1j * np.interp(s, input_record.t, input_record.a.imag, left=0.0, right=0.0)
        )
    decay = np.exp(-(1.0 + eta) * p.gamma_eg * (tau - p.t1))
    return FieldRecord(t=tau, a=pref * decay * amp, label="recall reference")


def symmetric_crib_transform(
    qubit: TimeBinQubit, omega_eg_tau_o: float | None = None
) -> TimeBinQubit:
    """Qubit map of one full storage/recall cycle at eta = 1.

    Bit flip with the inter-bin carrier phase folded in:
    (alpha, beta, phi) -> (beta, alpha, -(phi + 2 omega_eg tau_o)), global
    phase dropped.  Applying it twice restores the original state, the
    carrier phases of the two passes cancelling exactly.  The carrier
    phase argument defaults to the one stored on the qubit.
    """
    w = qubit.omega_eg_tau_o if omega_eg_tau_o is None else omega_eg_tau_o
    return make_qubit(
        alpha=qubit.beta,
        beta=qubit.alpha,
        phi=-(qubit.phi + 2.0 * w),
        tau_o=qubit.tau_o,
        omega_eg_tau_o=w,
        bin_width=qubit.bin_width,
    )
