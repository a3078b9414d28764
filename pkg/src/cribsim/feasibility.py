"""Back-of-envelope compression headroom for a candidate material.

Given a homogeneous linewidth and the broadening a lab can actually switch
on (either quoted directly or as Stark coefficient x applied field), this
estimates how far the recalled wavepacket can be compressed and what
qubit-rate gain that buys at a demonstrated storage efficiency.

The narrowest usable wavepacket bandwidth is a small multiple of the
homogeneous linewidth; the multiple is an input (default 3) because there
is no sharp physical threshold, so the report carries a sensitivity table
over nearby choices instead of pretending the number is exact.
"""

from __future__ import annotations

import math

from .errors import DomainError

__all__ = ["feasibility_report"]

_SENSITIVITY_MULTIPLES = (2.0, 3.0, 5.0)


def feasibility_report(
    linewidth_Hz: float,
    max_broadening_Hz: float | None = None,
    stark_coeff_Hz_per_Vcm: float | None = None,
    field_V_per_cm: float | None = None,
    demonstrated_efficiency: float | None = None,
    bandwidth_multiple: float = 3.0,
) -> dict:
    """Compression/gain headroom report as a JSON-ready dict.

    ``max_broadening_Hz`` may be omitted when both ``stark_coeff_Hz_per_Vcm``
    and ``field_V_per_cm`` are given; when both routes are supplied the
    smaller (hence achievable) broadening wins.
    """
    if linewidth_Hz is None or linewidth_Hz <= 0:
        raise DomainError("linewidth_Hz must be positive")
    if bandwidth_multiple <= 0:
        raise DomainError("bandwidth_multiple must be positive")

    stark_broadening = None
    if stark_coeff_Hz_per_Vcm is not None or field_V_per_cm is not None:
        if stark_coeff_Hz_per_Vcm is None or field_V_per_cm is None:
            raise DomainError(
                "stark_coeff_Hz_per_Vcm and field_V_per_cm must be given together"
            )
        if stark_coeff_Hz_per_Vcm <= 0 or field_V_per_cm <= 0:
            raise DomainError("Stark coefficient and field must be positive")
        stark_broadening = stark_coeff_Hz_per_Vcm * field_V_per_cm

    candidates = [
        b for b in (max_broadening_Hz, stark_broadening) if b is not None
    ]
    if not candidates:
        raise DomainError(
            "need max_broadening_Hz or a Stark coefficient + field pair"
        )
    if any(b <= 0 for b in candidates):
        raise DomainError("broadening must be positive")
    broadening = min(candidates)

    min_bandwidth = bandwidth_multiple * linewidth_Hz
    eta_max = broadening / min_bandwidth

    report: dict = {
        "linewidth_Hz": float(linewidth_Hz),
        "broadening_Hz": float(broadening),
        "bandwidth_multiple": float(bandwidth_multiple),
        "min_bandwidth_Hz": float(min_bandwidth),
        "max_bandwidth_Hz": float(broadening),
        "eta_max": float(eta_max),
        "eta_max_sensitivity": {
            str(m): float(broadening / (m * linewidth_Hz))
            for m in _SENSITIVITY_MULTIPLES
        },
    }
    if stark_broadening is not None:
        report["stark_broadening_Hz"] = float(stark_broadening)

    if demonstrated_efficiency is not None:
        if not 0.0 < demonstrated_efficiency <= 1.0:
            raise DomainError("demonstrated_efficiency must be in (0, 1]")
        eff = float(demonstrated_efficiency)
        report["demonstrated_efficiency"] = eff
        report["gain_estimate"] = float(eta_max * eff)
        report["eta_for_gain_10"] = float(math.ceil(10.0 / eff))
    return report
