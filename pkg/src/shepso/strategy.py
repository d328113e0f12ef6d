"""Operating strategies: classic fixed-DC operation versus the DC-halving
mode that doubles the effective modulation depth below a per-unit threshold,
plus sweep generation over the output-voltage range."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .pso import PsoParams, solve
from .she import SheProblem, thd_spectral, thd_total
from .waveform import InverterConfig, SwitchingAngles, fundamental

__all__ = [
    "Method",
    "OperatingPoint",
    "ResolvedPlant",
    "SheOptions",
    "SweepRow",
    "SweepTable",
    "ComparisonRow",
    "DEFAULT_THRESHOLD",
    "resolve_plant",
    "solve_operating_point",
    "sweep",
    "compare_methods",
    "row_seed",
]

DEFAULT_THRESHOLD = 0.5

_MASK64 = 0xFFFFFFFFFFFFFFFF


class Method(str, Enum):
    CLASSIC = "classic"
    PROPOSED = "proposed"


@dataclass(frozen=True)
class OperatingPoint:
    """A per-unit output-voltage demand and the operating method."""

    v_out_pu: float
    method: Method

    def __post_init__(self):
        if not (0.0 < self.v_out_pu <= 1.0):
            raise ValueError(f"v_out_pu must be in (0, 1], got {self.v_out_pu}")
        object.__setattr__(self, "v_out_pu", float(self.v_out_pu))
        object.__setattr__(self, "method", Method(self.method))


@dataclass(frozen=True)
class ResolvedPlant:
    """Effective per-cell DC voltage and per-unit target handed to the
    angle solver after the halving decision."""

    effective_vdc: float
    effective_target_pu: float


@dataclass(frozen=True)
class SheOptions:
    """Problem-side settings shared across a sweep."""

    eliminate_orders: tuple[int, ...] = (3, 5)
    weight_fundamental: float = 100.0
    weight_harmonics: float = 1.0
    thd_max_order: int = 49


@dataclass(frozen=True)
class SweepRow:
    v_out_pu: float
    method: Method
    angles: SwitchingAngles
    achieved_v1: float
    thd_spectral_pct: float
    thd_total_pct: float
    feasible: bool
    seed: int


@dataclass(frozen=True)
class SweepTable:
    """Rows sorted by (v_out_pu, method)."""

    rows: tuple[SweepRow, ...]

    def __post_init__(self):
        keys = [(r.v_out_pu, r.method.value) for r in self.rows]
        if keys != sorted(keys):
            raise ValueError("sweep rows must be sorted by (v_out_pu, method)")
        object.__setattr__(self, "rows", tuple(self.rows))

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


@dataclass(frozen=True)
class ComparisonRow:
    v_out_pu: float
    thd_classic_pct: float
    thd_proposed_pct: float
    improvement_pct: float


def resolve_plant(cfg: InverterConfig, point: OperatingPoint,
                  threshold: float = DEFAULT_THRESHOLD) -> ResolvedPlant:
    """Apply the halving decision.

    The proposed method at or below the threshold halves the cell voltage and
    doubles the per-unit target, leaving cells * vdc * target unchanged, so
    the output fundamental is preserved while the step size shrinks. Above
    the threshold (and always for the classic method) the plant is untouched.
    """
    if not (0.0 < threshold <= 1.0):
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    if point.method is Method.PROPOSED and point.v_out_pu <= threshold:
        effective = ResolvedPlant(cfg.vdc / 2.0, 2.0 * point.v_out_pu)
    else:
        effective = ResolvedPlant(cfg.vdc, point.v_out_pu)
    if effective.effective_target_pu > 1.0 + 1e-9:
        raise ValueError(
            f"effective per-unit target {effective.effective_target_pu} exceeds 1; "
            f"threshold {threshold} is too high for demand {point.v_out_pu}"
        )
    return effective


def _effective_config(cfg: InverterConfig, plant: ResolvedPlant) -> InverterConfig:
    # base voltage follows the halved plant so the solver target stays per-unit
    return InverterConfig(
        cells=cfg.cells,
        vdc=plant.effective_vdc,
        dc_sources=cfg.dc_sources,
        base_voltage=cfg.cells * plant.effective_vdc,
    )


def solve_operating_point(cfg: InverterConfig, point: OperatingPoint,
                          pso_params: PsoParams, she_options: SheOptions,
                          threshold: float = DEFAULT_THRESHOLD) -> SweepRow:
    """Resolve the plant, solve the angle problem at the effective settings,
    and evaluate the achieved fundamental and both THD figures on the
    physical (effective) waveform."""
    plant = resolve_plant(cfg, point, threshold)
    eff_cfg = _effective_config(cfg, plant)
    problem = SheProblem(
        cfg=eff_cfg,
        target_pu=plant.effective_target_pu,
        eliminate_orders=she_options.eliminate_orders,
        weight_fundamental=she_options.weight_fundamental,
        weight_harmonics=she_options.weight_harmonics,
    )
    result = solve(problem, pso_params)
    achieved = fundamental(eff_cfg, result.angles)
    return SweepRow(
        v_out_pu=point.v_out_pu,
        method=point.method,
        angles=result.angles,
        achieved_v1=achieved,
        thd_spectral_pct=100.0 * thd_spectral(eff_cfg, result.angles, she_options.thd_max_order),
        thd_total_pct=100.0 * thd_total(eff_cfg, result.angles),
        feasible=result.feasible,
        seed=pso_params.seed,
    )


def _splitmix64(value: int) -> int:
    value = (value + 0x9E3779B97F4A7C15) & _MASK64
    value = ((value ^ (value >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    value = ((value ^ (value >> 27)) * 0x94D049BB133111EB) & _MASK64
    return value ^ (value >> 31)


def row_seed(base_seed: int, pu_index: int, regime_index: int) -> int:
    """Deterministic per-row seed. Mixing uses the resolved regime (fixed-DC
    vs halved-DC) rather than the nominal method, so the proposed method above
    the threshold reproduces the classic row exactly."""
    mixed = _splitmix64(base_seed & _MASK64)
    mixed = _splitmix64((mixed ^ pu_index) & _MASK64)
    return _splitmix64((mixed ^ regime_index) & _MASK64)


def sweep(cfg: InverterConfig, pu_grid, methods, pso_params: PsoParams,
          she_options: SheOptions, threshold: float = DEFAULT_THRESHOLD) -> SweepTable:
    """One solved row per (per-unit point, method), with per-row seeds derived
    from the base seed. Rows are assembled in (pu, method) order regardless of
    execution order."""
    grid = [float(p) for p in pu_grid]
    if len(grid) == 0:
        raise ValueError("pu grid must not be empty")
    if any(not (0.0 < p <= 1.0) for p in grid):
        raise ValueError(f"pu grid values must be in (0, 1], got {grid}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError(f"pu grid must be strictly increasing, got {grid}")
    method_list = sorted({Method(m) for m in methods}, key=lambda m: m.value)
    if not method_list:
        raise ValueError("at least one method is required")
    rows = []
    for i, pu in enumerate(grid):
        for method in method_list:
            regime = 1 if (method is Method.PROPOSED and pu <= threshold) else 0
            seed = row_seed(pso_params.seed, i, regime)
            row_params = replace(pso_params, seed=seed)
            rows.append(solve_operating_point(
                cfg, OperatingPoint(pu, method), row_params, she_options, threshold))
    return SweepTable(tuple(rows))


def compare_methods(table: SweepTable) -> tuple[ComparisonRow, ...]:
    """Pair classic and proposed rows per pu and compute the THD improvement
    (classic - proposed) / classic * 100, using the all-harmonics figure."""
    by_pu: dict[float, dict[Method, SweepRow]] = {}
    for row in table:
        by_pu.setdefault(row.v_out_pu, {})[row.method] = row
    out = []
    for pu in sorted(by_pu):
        pair = by_pu[pu]
        if Method.CLASSIC not in pair or Method.PROPOSED not in pair:
            raise ValueError(f"missing method pair at pu={pu}")
        classic = pair[Method.CLASSIC].thd_total_pct
        proposed = pair[Method.PROPOSED].thd_total_pct
        out.append(ComparisonRow(
            v_out_pu=pu,
            thd_classic_pct=classic,
            thd_proposed_pct=proposed,
            improvement_pct=(classic - proposed) / classic * 100.0,
        ))
    return tuple(out)
