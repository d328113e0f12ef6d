"""Selective-harmonic-elimination problem definition: residual system,
weighted optimizer cost, and THD metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .waveform import (
    InverterConfig,
    SwitchingAngles,
    fundamental,
    harmonic_amplitude,
    rms_voltage,
)

__all__ = [
    "SheProblem",
    "Residuals",
    "residuals",
    "cost",
    "cost_batch",
    "is_feasible",
    "thd_spectral",
    "thd_total",
    "FEASIBLE_RESIDUAL_PU",
]

# A solution counts as an exact elimination when every residual falls below
# this per-unit magnitude (relative to the config base voltage).
FEASIBLE_RESIDUAL_PU = 1e-3

# THD is undefined when the fundamental is below this fraction of vdc.
_V1_FLOOR = 1e-9


@dataclass(frozen=True)
class SheProblem:
    """Target fundamental (per unit of base voltage) plus the harmonic orders
    to suppress, with the cost weights for fundamental tracking (A) and
    harmonic content (B)."""

    cfg: InverterConfig
    target_pu: float
    eliminate_orders: tuple[int, ...] = (3, 5)
    weight_fundamental: float = 100.0
    weight_harmonics: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.target_pu <= 1.0):
            raise ValueError(f"target_pu must be in (0, 1], got {self.target_pu}")
        orders = tuple(int(h) for h in self.eliminate_orders)
        if len(orders) == 0:
            raise ValueError("eliminate_orders must not be empty")
        if any(h < 3 or h % 2 == 0 for h in orders):
            raise ValueError(f"eliminate_orders must be odd integers >= 3, got {orders}")
        if len(set(orders)) != len(orders):
            raise ValueError(f"eliminate_orders must be distinct, got {orders}")
        if self.weight_fundamental < 0 or self.weight_harmonics < 0:
            raise ValueError("cost weights must be >= 0")
        object.__setattr__(self, "eliminate_orders", orders)
        object.__setattr__(self, "target_pu", float(self.target_pu))
        object.__setattr__(self, "weight_fundamental", float(self.weight_fundamental))
        object.__setattr__(self, "weight_harmonics", float(self.weight_harmonics))

    @property
    def target_v1(self) -> float:
        """Target fundamental in volts."""
        return self.target_pu * self.cfg.base_voltage


@dataclass(frozen=True)
class Residuals:
    """Achieved-minus-target fundamental (volts) and the signed amplitude of
    each harmonic selected for elimination."""

    fundamental_error: float
    harmonic_values: tuple[float, ...]


def residuals(problem: SheProblem, angles: SwitchingAngles) -> Residuals:
    err = fundamental(problem.cfg, angles) - problem.target_v1
    harm = tuple(
        harmonic_amplitude(problem.cfg, angles, h) for h in problem.eliminate_orders
    )
    return Residuals(fundamental_error=float(err), harmonic_values=harm)


def cost_batch(problem: SheProblem, angle_matrix: np.ndarray) -> np.ndarray:
    """Vectorized cost over a (..., cells) array of angle vectors.

    cost = A * |target_pu - |v1|/(D*vdc)|
         + B * sum_h (1/h) * |v_h| / (D*vdc)

    The reciprocal-order weights put more pressure on low-order harmonics.
    Angle vectors need not be ordered; the cosine sums are order-invariant.
    """
    x = np.asarray(angle_matrix, dtype=float)
    if x.shape[-1] != problem.cfg.cells:
        raise ValueError(
            f"angle dimension {x.shape[-1]} does not match cell count {problem.cfg.cells}"
        )
    cfg = problem.cfg
    d_vdc = cfg.dc_sources * cfg.vdc
    v1 = 4.0 * cfg.vdc / math.pi * np.sum(np.cos(x), axis=-1)
    total = problem.weight_fundamental * np.abs(problem.target_pu - np.abs(v1) / d_vdc)
    for h in problem.eliminate_orders:
        vh = 4.0 * cfg.vdc / (h * math.pi) * np.sum(np.cos(h * x), axis=-1)
        total = total + problem.weight_harmonics * np.abs(vh) / (h * d_vdc)
    return total


def cost(problem: SheProblem, angles: SwitchingAngles) -> float:
    """Scalar cost of one switching-angle vector (see cost_batch)."""
    return float(cost_batch(problem, angles.as_array()[None, :])[0])


def is_feasible(problem: SheProblem, res: Residuals) -> bool:
    """True when every residual magnitude is below the per-unit floor."""
    base = problem.cfg.base_voltage
    if abs(res.fundamental_error) / base >= FEASIBLE_RESIDUAL_PU:
        return False
    return all(abs(v) / base < FEASIBLE_RESIDUAL_PU for v in res.harmonic_values)


def _checked_v1(cfg: InverterConfig, angles: SwitchingAngles) -> float:
    v1 = fundamental(cfg, angles)
    if abs(v1) < _V1_FLOOR * cfg.vdc:
        raise ValueError(
            f"THD undefined: fundamental {v1!r} V is below {_V1_FLOOR} * vdc"
        )
    return v1


def thd_spectral(cfg: InverterConfig, angles: SwitchingAngles, max_order: int) -> float:
    """Distortion from the odd harmonics 3..max_order as a fraction of the
    fundamental: sqrt(sum v_n^2) / |v1|."""
    if max_order < 3:
        raise ValueError(f"max_order must be >= 3, got {max_order}")
    if max_order % 2 == 0:
        raise ValueError(f"max_order must be odd, got {max_order}")
    v1 = _checked_v1(cfg, angles)
    orders = np.arange(3, max_order + 1, 2)
    a = angles.as_array()
    sums = np.sum(np.cos(np.outer(orders, a)), axis=1)
    amps = 4.0 * cfg.vdc / (orders * math.pi) * sums
    return float(np.sqrt(np.sum(amps**2)) / abs(v1))


def thd_total(cfg: InverterConfig, angles: SwitchingAngles) -> float:
    """All-harmonics distortion via the exact waveform RMS:
    sqrt(2*rms^2 - v1^2) / |v1|.

    Upper-bounds thd_spectral for every finite harmonic window.
    """
    v1 = _checked_v1(cfg, angles)
    rms = rms_voltage(cfg, angles)
    return float(math.sqrt(max(0.0, 2.0 * rms * rms - v1 * v1)) / abs(v1))
