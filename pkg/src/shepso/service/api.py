"""Handlers behind the HTTP endpoints. They are plain functions over the
request/response models so the CLI can call them in-process."""

from __future__ import annotations

import numpy as np

from ..pso import solve
from ..she import SheProblem, thd_spectral, thd_total
from ..strategy import (
    OperatingPoint,
    SweepRow,
    SweepTable,
    compare_methods,
    resolve_plant,
    sweep,
)
from ..waveform import (
    InverterConfig,
    SwitchingAngles,
    fundamental,
    harmonic_spectrum,
    synthesize,
)
from .schemas import (
    CompareRequest,
    CompareResponse,
    ComparisonRowOut,
    HarmonicResidual,
    SolveRequest,
    SolveResponse,
    SpectrumLine,
    SweepRequest,
    SweepResponse,
    SweepRowOut,
    SynthRequest,
    SynthResponse,
)

__all__ = ["run_solve", "run_sweep", "run_compare", "run_synth",
           "row_to_model", "model_to_row"]


def run_solve(req: SolveRequest) -> SolveResponse:
    cfg = req.plant.to_config()
    point = OperatingPoint(req.v_out_pu, req.method)
    plant = resolve_plant(cfg, point, req.threshold)
    eff_cfg = InverterConfig(cells=cfg.cells, vdc=plant.effective_vdc,
                             dc_sources=cfg.dc_sources,
                             base_voltage=cfg.cells * plant.effective_vdc)
    she = req.she.to_options()
    problem = SheProblem(
        cfg=eff_cfg,
        target_pu=plant.effective_target_pu,
        eliminate_orders=she.eliminate_orders,
        weight_fundamental=she.weight_fundamental,
        weight_harmonics=she.weight_harmonics,
    )
    result = solve(problem, req.pso.to_params())
    return SolveResponse(
        angles_deg=list(result.angles.degrees),
        angles_rad=list(result.angles.radians),
        achieved_v1_V=fundamental(eff_cfg, result.angles),
        fundamental_error_V=result.residuals.fundamental_error,
        harmonics=[
            HarmonicResidual(order=h, amplitude_V=v)
            for h, v in zip(she.eliminate_orders, result.residuals.harmonic_values)
        ],
        thd_spectral_pct=100.0 * thd_spectral(eff_cfg, result.angles, she.thd_max_order),
        thd_total_pct=100.0 * thd_total(eff_cfg, result.angles),
        feasible=result.feasible,
        best_cost=result.best_cost,
        iterations_used=result.iterations_used,
        seed=result.seed,
        effective_vdc_V=plant.effective_vdc,
        effective_target_pu=plant.effective_target_pu,
    )


def row_to_model(row: SweepRow) -> SweepRowOut:
    return SweepRowOut(
        v_out_pu=row.v_out_pu,
        method=row.method,
        angles_deg=list(row.angles.degrees),
        achieved_v1_V=row.achieved_v1,
        thd_spectral_pct=row.thd_spectral_pct,
        thd_total_pct=row.thd_total_pct,
        feasible=row.feasible,
        seed=row.seed,
    )


def model_to_row(model: SweepRowOut) -> SweepRow:
    return SweepRow(
        v_out_pu=model.v_out_pu,
        method=model.method,
        angles=SwitchingAngles.from_degrees(model.angles_deg),
        achieved_v1=model.achieved_v1_V,
        thd_spectral_pct=model.thd_spectral_pct,
        thd_total_pct=model.thd_total_pct,
        feasible=model.feasible,
        seed=model.seed,
    )


def run_sweep(req: SweepRequest) -> SweepResponse:
    table = sweep(
        cfg=req.plant.to_config(),
        pu_grid=req.pu_grid,
        methods=req.methods,
        pso_params=req.pso.to_params(),
        she_options=req.she.to_options(),
        threshold=req.threshold,
    )
    return SweepResponse(rows=[row_to_model(r) for r in table])


def run_compare(req: CompareRequest) -> CompareResponse:
    rows = sorted((model_to_row(m) for m in req.rows),
                  key=lambda r: (r.v_out_pu, r.method.value))
    result = compare_methods(SweepTable(tuple(rows)))
    return CompareResponse(rows=[
        ComparisonRowOut(
            v_out_pu=c.v_out_pu,
            thd_classic_pct=c.thd_classic_pct,
            thd_proposed_pct=c.thd_proposed_pct,
            improvement_pct=c.improvement_pct,
        )
        for c in result
    ])


def run_synth(req: SynthRequest) -> SynthResponse:
    cfg = req.plant.to_config()
    if req.angles_deg is not None:
        angles = SwitchingAngles.from_degrees(req.angles_deg)
    else:
        angles = SwitchingAngles(tuple(req.angles_rad))
    wave = synthesize(cfg, angles, req.samples)
    times = np.arange(req.samples) / (req.samples * req.frequency_hz)
    spec = harmonic_spectrum(cfg, angles, req.max_order)
    fund = abs(spec.amplitudes[0])
    lines = [
        SpectrumLine(
            harmonic_order=o,
            amplitude_V=a,
            amplitude_pct_of_fundamental=abs(a) / fund * 100.0,
        )
        for o, a in zip(spec.orders, spec.amplitudes)
    ]
    return SynthResponse(
        time_s=[float(t) for t in times],
        voltage_V=[float(v) for v in wave],
        spectrum=lines,
        thd_spectral_pct=100.0 * thd_spectral(cfg, angles, req.max_order),
        thd_total_pct=100.0 * thd_total(cfg, angles),
    )
