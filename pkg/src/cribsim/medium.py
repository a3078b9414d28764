"""Broadened absorber models.

Two ways of inhomogeneously broadening the ensemble are supported:

* ``transverse``  -- every position carries the full Lorentzian line of
  half-width ``delta_inh``; the optical response is set by the resonant
  depth ``alpha_o_L``.
* ``longitudinal`` -- a linear detuning gradient along the propagation
  axis, Delta(z) = -chi z for z in [-L/2, +L/2], so the total spread is
  chi*L = delta_inh; the response is set by the coupling-to-gradient
  ratio ``zeta_over_chi`` (effective depth 2*pi*zeta/chi).

Internal units: time in input-bin widths (dt_bin = 1), length in medium
lengths (L = 1), so ``delta_inh`` is the dimensionless product
Delta_inh * dt_bin.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, KindError, RangeError, ResolutionError

TRANSVERSE = "transverse"
LONGITUDINAL = "longitudinal"

# Narrowest line the closed forms stay meaningful for: features of the
# stored spectrum must fit inside the broadened line.
_BROADENING_ERROR = 5.0
_BROADENING_WARN = 10.0


class NarrowBroadeningWarning(UserWarning):
    """Broadened line is marginal for the default input bandwidth."""


@dataclass(frozen=True)
class MediumConfig:
    """Static description of the storage medium.

    ``delta_k_L`` is the residual phase-mismatch of the backward recall,
    expressed as the unitless product (mismatch wavenumber) x (length).
    """

    kind: str
    delta_inh: float
    alpha_o_L: float = 0.0
    zeta_over_chi: float = 0.0
    gamma_eg: float = 0.0
    delta_k_L: float = 0.0
    length: float = 1.0

    def __post_init__(self):
        if self.kind not in (TRANSVERSE, LONGITUDINAL):
            raise KindError(f"unknown broadening kind {self.kind!r}")
        if self.delta_inh < _BROADENING_ERROR:
            raise DomainError(
                f"broadening {self.delta_inh} below {_BROADENING_ERROR} per bin width"
            )
        if self.delta_inh < _BROADENING_WARN:
            warnings.warn(
                f"broadening {self.delta_inh} per bin width is marginal "
                f"(< {_BROADENING_WARN}); stored spectra will clip",
                NarrowBroadeningWarning,
                stacklevel=2,
            )
        if self.gamma_eg < 0:
            raise DomainError("homogeneous width cannot be negative")
        if self.length <= 0:
            raise DomainError("medium length must be positive")
        if self.kind == TRANSVERSE and self.alpha_o_L <= 0:
            raise DomainError("transverse medium needs alpha_o_L > 0")
        if self.kind == LONGITUDINAL and self.zeta_over_chi <= 0:
            raise DomainError("longitudinal medium needs zeta_over_chi > 0")

    @property
    def chi(self) -> float:
        """Detuning gradient of the longitudinal kind."""
        if self.kind != LONGITUDINAL:
            raise KindError("chi is defined for the longitudinal kind only")
        return self.delta_inh / self.length

    @property
    def delta_k_over_alpha_o(self) -> float:
        if self.kind != TRANSVERSE:
            raise KindError("delta_k/alpha_o is a transverse-kind ratio")
        return self.delta_k_L / self.alpha_o_L

    @property
    def delta_k_over_chi(self) -> float:
        if self.kind != LONGITUDINAL:
            raise KindError("delta_k/chi is a longitudinal-kind ratio")
        return self.delta_k_L / self.delta_inh * self.length


@dataclass(frozen=True)
class DetuningGrid:
    """Quadrature nodes/weights sampling a Lorentzian line."""

    nodes: np.ndarray
    weights: np.ndarray
    delta_inh: float
    span_factor: float

    @property
    def weight_sum(self) -> float:
        return float(self.weights.sum())

    @property
    def truncation_deficit(self) -> float:
        """Line mass lost to the truncated tails (reported, never renormalized)."""
        return 1.0 - self.weight_sum

    @property
    def spacing_near_zero(self) -> float:
        mid = len(self.nodes) // 2
        return float(abs(self.nodes[mid] - self.nodes[mid - 1]))


def lorentzian_profile(delta: np.ndarray | float, delta_inh: float):
    """Normalized line shape delta_inh / ((delta_inh^2 + delta^2) * pi)."""
    if delta_inh <= 0:
        raise DomainError("line width must be positive")
    d = np.asarray(delta, dtype=float)
    out = delta_inh / ((delta_inh * delta_inh + d * d) * np.pi)
    return float(out) if np.isscalar(delta) else out


def detuning_grid(
    delta_inh: float, n_nodes: int = 201, span_factor: float = 50.0
) -> DetuningGrid:
    """Tangent-mapped midpoint quadrature over the Lorentzian line.

    The substitution Delta = delta_inh * tan(pi u / 2) is the inverse CDF of
    the line, so midpoint nodes in u give equal-mass strata: dense sampling
    near resonance, sparse far tails, and exactly equal weights.  The grid is
    truncated at |Delta| = span_factor * delta_inh; the missing tail mass is
    exposed as ``truncation_deficit`` and deliberately not renormalized.
    """
    if span_factor < 20:
        raise DomainError("span_factor below 20 clips too much of the line")
    if n_nodes < 3:
        raise ResolutionError("need at least 3 detuning nodes")
    u_max = (2.0 / np.pi) * np.arctan(span_factor)
    j = np.arange(n_nodes)
    u = -u_max + (j + 0.5) * (2.0 * u_max / n_nodes)
    nodes = delta_inh * np.tan(np.pi * u / 2.0)
    weights = np.full(n_nodes, u_max / n_nodes)
    grid = DetuningGrid(
        nodes=nodes, weights=weights, delta_inh=delta_inh, span_factor=span_factor
    )
    if grid.spacing_near_zero >= 0.2:
        raise ResolutionError(
            f"central node spacing {grid.spacing_near_zero:.3f} per bin width "
            "cannot resolve the stored spectrum (need < 0.2); increase n_nodes"
        )
    return grid


def longitudinal_detuning(z: np.ndarray | float, chi: float, length: float = 1.0):
    """Gradient detuning Delta(z) = -chi*z on z in [-L/2, +L/2]."""
    zz = np.asarray(z, dtype=float)
    if np.any(zz < -length / 2 - 1e-12) or np.any(zz > length / 2 + 1e-12):
        raise RangeError("position outside the medium")
    out = -chi * zz
    return float(out) if np.isscalar(z) else out


def absorption_coefficient_transverse(nu: float, medium: MediumConfig) -> complex:
    """Complex absorption-depth profile alpha(nu)*L of the transverse kind.

    For the Lorentzian line with a resonant carrier this collapses to
    alpha_o_L * (gamma + Delta_inh) / (gamma + Delta_inh - i nu); the real
    part damps, the imaginary part is the accompanying dispersion.
    """
    if medium.kind != TRANSVERSE:
        raise KindError("absorption profile defined for the transverse kind")
    width = medium.gamma_eg + medium.delta_inh
    return medium.alpha_o_L * width / (width - 1j * nu)


def effective_depth(medium: MediumConfig) -> float:
    """Resonant optical depth: alpha_o_L, or 2*pi*zeta/chi for the gradient kind."""
    if medium.kind == TRANSVERSE:
        return medium.alpha_o_L
    return 2.0 * np.pi * medium.zeta_over_chi
