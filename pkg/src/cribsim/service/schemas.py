"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class MetricsModel(BaseModel):
    efficiency: float
    gain: float
    fidelity: float
    optimal_phase_theta: float
    bit_flip_applied: bool
    early_bin_energy: float
    late_bin_energy: float
    early_bin_phase: float
    late_bin_phase: float
    transmitted_fraction: float
    residual_fraction: float
    forward_leak_fraction: float
    energy_closure: float
    echo_peak_time: float
    predicted_echo_time: float


class SimulateRequest(BaseModel):
    config: str = Field(description="run configuration text (sectioned key-value)")


class SimulateResponse(BaseModel):
    metrics: MetricsModel
    files: dict[str, str] = Field(description="artifact file name -> content")


class SweepRequest(BaseModel):
    config: str
    mode: Literal["fast", "verify"] = "fast"
    threads: int | None = Field(default=None, ge=1)


class SweepResponse(BaseModel):
    files: dict[str, str]
    rows: int
    max_rel_residual: float | None


class FeasibilityRequest(BaseModel):
    linewidth_Hz: float
    max_broadening_Hz: float | None = None
    stark_coeff_Hz_per_Vcm: float | None = None
    field_V_per_cm: float | None = None
    demonstrated_efficiency: float | None = None
    bandwidth_multiple: float = 3.0


class FeasibilityResponse(BaseModel):
    report: dict


class SelftestRequest(BaseModel):
    criteria: list[int] | None = None


class CriterionModel(BaseModel):
    number: int
    label: str
    passed: bool
    detail: str
    line: str


class SelftestResponse(BaseModel):
    passed: bool
    results: list[CriterionModel]
