"""Pydantic request/response models for the HTTP service; the CLI reuses
them as its wire format."""

from __future__ import annotations

import math
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ..pso import BoundPolicy, PsoParams
from ..strategy import Method, SheOptions
from ..waveform import InverterConfig


class PlantSpec(BaseModel):
    cells: int = Field(default=3, ge=1)
    vdc: float = Field(default=100.0, gt=0)
    dc_sources: Optional[int] = Field(default=None, ge=1)
    base_voltage: Optional[float] = Field(default=None, gt=0)

    def to_config(self) -> InverterConfig:
        return InverterConfig(
            cells=self.cells,
            vdc=self.vdc,
            dc_sources=self.dc_sources,
            base_voltage=self.base_voltage,
        )


class PsoSettings(BaseModel):
    swarm_size: int = Field(default=50, ge=2)
    max_iterations: int = Field(default=500, ge=1)
    inertia: float = Field(default=0.72, ge=0.0, le=1.0)
    cognitive: float = Field(default=1.49, ge=0.0)
    social: float = Field(default=1.49, ge=0.0)
    seed: int = Field(default=42, ge=0, lt=2**64)
    velocity_clamp: float = Field(default=math.pi / 4, gt=0)
    bound_policy: BoundPolicy = BoundPolicy.REPAIR_SORT_CLAMP
    convergence_tol: float = Field(default=1e-6, ge=0.0)
    stall_iterations: int = Field(default=75, ge=1)
    restarts: int = Field(default=16, ge=1)
    zoom_rounds: int = Field(default=6, ge=1)
    zoom_shrink: float = Field(default=0.2, gt=0.0, lt=1.0)
    inertia_final: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    def to_params(self) -> PsoParams:
        return PsoParams(**self.model_dump())


class SheSettings(BaseModel):
    eliminate_orders: list[int] = Field(default=[3, 5])
    weight_fundamental: float = Field(default=100.0, ge=0.0)
    weight_harmonics: float = Field(default=1.0, ge=0.0)
    thd_max_order: int = Field(default=49, ge=3)

    def to_options(self) -> SheOptions:
        return SheOptions(
            eliminate_orders=tuple(self.eliminate_orders),
            weight_fundamental=self.weight_fundamental,
            weight_harmonics=self.weight_harmonics,
            thd_max_order=self.thd_max_order,
        )


class SolveRequest(BaseModel):
    plant: PlantSpec = PlantSpec()
    v_out_pu: float = Field(gt=0.0, le=1.0)
    method: Method = Method.CLASSIC
    threshold: float = Field(default=0.5, gt=0.0, le=1.0)
    pso: PsoSettings = PsoSettings()
    she: SheSettings = SheSettings()


class HarmonicResidual(BaseModel):
    order: int
    amplitude_V: float


class SolveResponse(BaseModel):
    angles_deg: list[float]
    angles_rad: list[float]
    achieved_v1_V: float
    fundamental_error_V: float
    harmonics: list[HarmonicResidual]
    thd_spectral_pct: float
    thd_total_pct: float
    feasible: bool
    best_cost: float
    iterations_used: int
    seed: int
    effective_vdc_V: float
    effective_target_pu: float


class SweepRequest(BaseModel):
    plant: PlantSpec = PlantSpec()
    pu_grid: list[float] = Field(default=[0.1, 0.2, 0.3, 0.4, 0.5], min_length=1)
    methods: list[Method] = Field(default=[Method.CLASSIC, Method.PROPOSED], min_length=1)
    threshold: float = Field(default=0.5, gt=0.0, le=1.0)
    pso: PsoSettings = PsoSettings()
    she: SheSettings = SheSettings()


class RunConfig(SweepRequest):
    """Sweep request plus output preferences; the on-disk config file format.
    Round-trips losslessly through model_dump/model_validate."""

    output_dir: str = "."
    formats: list[Literal["csv", "json"]] = ["csv", "json"]


class SweepRowOut(BaseModel):
    v_out_pu: float
    method: Method
    angles_deg: list[float]
    achieved_v1_V: float
    thd_spectral_pct: float
    thd_total_pct: float
    feasible: bool
    seed: int


class SweepResponse(BaseModel):
    rows: list[SweepRowOut]


class CompareRequest(BaseModel):
    rows: list[SweepRowOut] = Field(min_length=2)


class ComparisonRowOut(BaseModel):
    v_out_pu: float
    thd_classic_pct: float
    thd_proposed_pct: float
    improvement_pct: float


class CompareResponse(BaseModel):
    rows: list[ComparisonRowOut]


class SynthRequest(BaseModel):
    plant: PlantSpec = PlantSpec()
    angles_deg: Optional[list[float]] = None
    angles_rad: Optional[list[float]] = None
    samples: int = Field(default=4096, ge=4)
    frequency_hz: float = Field(default=50.0, gt=0)
    max_order: int = Field(default=49, ge=3)

    @model_validator(mode="after")
    def _one_angle_set(self):
        if (self.angles_deg is None) == (self.angles_rad is None):
            raise ValueError("provide exactly one of angles_deg or angles_rad")
        return self


class SpectrumLine(BaseModel):
    harmonic_order: int
    amplitude_V: float
    amplitude_pct_of_fundamental: float


class SynthResponse(BaseModel):
    time_s: list[float]
    voltage_V: list[float]
    spectrum: list[SpectrumLine]
    thd_spectral_pct: float
    thd_total_pct: float


class HealthResponse(BaseModel):
    status: str
    version: str
