"""Time-bin qubits and sampled field envelopes.

A qubit is encoded in two Gaussian wavepackets ("bins") separated by
``tau_o``:   A(t) = alpha * g(t) + e^{i phi} * beta * g(t - tau_o),
with g a unit-norm Gaussian of duration ``bin_width`` (the package time
unit).  Optical carrier factors are never sampled; deterministic carrier
phases are carried separately as the scalar ``omega_eg_tau_o``.

All envelopes live on uniform time grids as :class:`FieldRecord` values;
energies and overlaps use the plain Riemann sum  sum(conj(a)*b)*dt.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GridError,
    GridMismatchError,
    NormalizationError,
    SeparationError,
)

# Bins are truncated (for grid-coverage purposes) at +-4 bin widths,
# where the amplitude has fallen to e^{-16} ~ 1.1e-7.
TRUNCATION_WIDTHS = 4.0


@dataclass(frozen=True)
class TimeBinQubit:
    """Normalized two-bin state alpha|0> + e^{i phi} beta|1>.

    ``omega_eg_tau_o`` is the carrier phase accumulated between the bins;
    it never enters sampled envelopes, only the phase bookkeeping of the
    recall transforms.
    """

    alpha: float
    beta: float
    phi: float
    tau_o: float
    omega_eg_tau_o: float = 0.0
    bin_width: float = 1.0


@dataclass(frozen=True)
class FieldRecord:
    """Complex envelope samples on a uniform time grid."""

    t: np.ndarray
    a: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        a = np.asarray(self.a, dtype=complex)
        if t.ndim != 1 or a.shape != t.shape:
            raise GridError("time grid and samples must be matching 1-d arrays")
        if t.size < 2:
            raise GridError("a field record needs at least two samples")
        steps = np.diff(t)
        if steps.min() <= 0 or np.ptp(steps) > 1e-9 * steps.mean():
            raise GridError("time grid must be uniform and increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "a", a)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def energy(self) -> float:
        """Envelope norm sum(|A|^2) dt (photon-number units)."""
        return float(np.sum(np.abs(self.a) ** 2) * self.dt)

    def centroid(self) -> float:
        """Energy-weighted mean arrival time."""
        w = np.abs(self.a) ** 2
        total = w.sum()
        if total == 0.0:
            raise ZeroDivisionError("empty record has no centroid")
        return float(np.sum(w * self.t) / total)


def make_qubit(
    alpha: float,
    beta: float,
    phi: float,
    tau_o: float,
    omega_eg_tau_o: float = 0.0,
    bin_width: float = 1.0,
) -> TimeBinQubit:
    """Validate and build a :class:`TimeBinQubit`.

    Raises ``NormalizationError`` when alpha^2+beta^2 strays from 1 by more
    than 1e-9; inputs inside that tolerance are renormalized exactly, so a
    constructed qubit always satisfies the tight (1e-12) state invariant.
    Raises ``SeparationError`` for bins closer than 4 bin widths, where the
    inter-bin amplitude overlap (< 1e-7) would stop being negligible.
    """
    if alpha < 0 or beta < 0:
        raise NormalizationError("bin amplitudes must be non-negative reals")
    norm2 = alpha * alpha + beta * beta
    if abs(norm2 - 1.0) > 1e-9:
        raise NormalizationError(
            f"alpha^2 + beta^2 = {norm2!r} is not 1 within 1e-9"
        )
    scale = 1.0 / np.sqrt(norm2)
    if tau_o < TRUNCATION_WIDTHS * bin_width:
        raise SeparationError(
            f"bin separation {tau_o} below {TRUNCATION_WIDTHS} bin widths"
        )
    if bin_width <= 0:
        raise SeparationError("bin width must be positive")
    return TimeBinQubit(
        alpha=alpha * scale,
        beta=beta * scale,
        phi=float(phi),
        tau_o=float(tau_o),
        omega_eg_tau_o=float(omega_eg_tau_o),
        bin_width=float(bin_width),
    )


def gaussian_bin(t: np.ndarray, center: float, width: float) -> np.ndarray:
    """Unit-norm Gaussian envelope (2/(pi w^2))^(1/4) exp(-((t-c)/w)^2)."""
    x = (np.asarray(t, dtype=float) - center) / width
    return (2.0 / (np.pi * width * width)) ** 0.25 * np.exp(-(x * x))


def sample_input_envelope(qubit: TimeBinQubit, t_grid: np.ndarray) -> FieldRecord:
    """Sample the two-bin input envelope on ``t_grid``.

    The grid must cover [-4 dt_bin, tau_o + 4 dt_bin] (bin 0 is centered at
    t=0) so that the clipped tails carry < 1e-13 of the energy; otherwise a
    ``GridError`` is raised.
    """
    t = np.asarray(t_grid, dtype=float)
    lo = -TRUNCATION_WIDTHS * qubit.bin_width
    hi = qubit.tau_o + TRUNCATION_WIDTHS * qubit.bin_width
    if t[0] > lo or t[-1] < hi:
        raise GridError(
            f"grid [{t[0]}, {t[-1]}] does not cover the input support [{lo}, {hi}]"
        )
    a = qubit.alpha * gaussian_bin(t, 0.0, qubit.bin_width) + (
        np.exp(1j * qubit.phi)
        * qubit.beta
        * gaussian_bin(t, qubit.tau_o, qubit.bin_width)
    )
    return FieldRecord(t=t, a=a.astype(complex), label="input")


def overlap(first: FieldRecord, second: FieldRecord) -> complex:
    """Inner product sum(conj(a) * b) dt of two records on the same grid."""
    if first.t.shape != second.t.shape or not np.allclose(
        first.t, second.t, rtol=0.0, atol=1e-9 * first.dt
    ):
        raise GridMismatchError("records live on different time grids")
    return complex(np.sum(np.conj(first.a) * second.a) * first.dt)


def compressed_template(
    qubit: TimeBinQubit,
    eta: float,
    t_echo: float,
    phase_prime: float = 0.0,
    gamma_factor: float = 1.0,
    t_grid: np.ndarray | None = None,
) -> FieldRecord:
    """Expected recalled envelope: bins compressed by eta, order reversed.

    The bin that entered last (weight beta) exits first at
    t_echo - tau_o/eta carrying the relative phase ``phase_prime``; the bin
    that entered first (weight alpha) exits last at ``t_echo`` attenuated by
    ``gamma_factor``.  Each bin is a unit-norm Gaussian of duration
    bin_width/eta, i.e. the sqrt(eta) amplitude boost exactly compensates
    the 1/eta duration, so at gamma_factor=1 the template has unit norm.
    """
    if eta <= 0:
        raise SeparationError("compression parameter must be positive")
    width = qubit.bin_width / eta
    t_early = t_echo - qubit.tau_o / eta
    if t_grid is None:
        pad = TRUNCATION_WIDTHS * width
        n = max(int(np.ceil((qubit.tau_o / eta + 2 * pad) / (width / 16.0))), 64)
        t_grid = np.linspace(t_early - pad, t_echo + pad, n)
    t = np.asarray(t_grid, dtype=float)
    a = (
        np.exp(1j * phase_prime) * qubit.beta * gaussian_bin(t, t_early, width)
        + gamma_factor * qubit.alpha * gaussian_bin(t, t_echo, width)
    )
    return FieldRecord(t=t, a=a.astype(complex), label="template")
