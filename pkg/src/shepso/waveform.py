"""Analytic model of the quarter-wave-symmetric staircase voltage of a
cascaded H-bridge inverter.

All operations are pure functions over immutable inputs. Angles are radians
internally; peak harmonic amplitudes are volts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "InverterConfig",
    "SwitchingAngles",
    "HarmonicSpectrum",
    "harmonic_amplitude",
    "fundamental",
    "max_fundamental",
    "modulation_index",
    "target_fundamental",
    "per_unit_voltage",
    "synthesize",
    "rms_voltage",
    "harmonic_spectrum",
]

HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class InverterConfig:
    """Plant definition: series cell count, per-cell DC voltage, DC source
    count (defaults to the cell count) and the per-unit base voltage
    (defaults to cells * vdc)."""

    cells: int
    vdc: float
    dc_sources: int | None = None
    base_voltage: float | None = None

    def __post_init__(self):
        if not isinstance(self.cells, int) or self.cells < 1:
            raise ValueError(f"cells must be a positive integer, got {self.cells!r}")
        if not (self.vdc > 0):
            raise ValueError(f"vdc must be > 0, got {self.vdc!r}")
        if self.dc_sources is None:
            object.__setattr__(self, "dc_sources", self.cells)
        if not isinstance(self.dc_sources, int) or self.dc_sources < 1:
            raise ValueError(f"dc_sources must be a positive integer, got {self.dc_sources!r}")
        if self.base_voltage is None:
            object.__setattr__(self, "base_voltage", self.cells * float(self.vdc))
        if not (self.base_voltage > 0):
            raise ValueError(f"base_voltage must be > 0, got {self.base_voltage!r}")
        object.__setattr__(self, "vdc", float(self.vdc))
        object.__setattr__(self, "base_voltage", float(self.base_voltage))

    @property
    def level_count(self) -> int:
        """Number of distinct output levels of the staircase (2*cells + 1)."""
        return 2 * self.cells + 1


@dataclass(frozen=True)
class SwitchingAngles:
    """Strictly increasing switching angles in the open interval (0, pi/2).

    Construction rejects unordered or out-of-range vectors; only the solver's
    repair path may coalesce and re-order candidates.
    """

    radians: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(a) for a in self.radians)
        if len(vals) == 0:
            raise ValueError("at least one switching angle is required")
        if not all(math.isfinite(a) for a in vals):
            raise ValueError(f"angles must be finite, got {vals}")
        if vals[0] <= 0.0 or vals[-1] >= HALF_PI:
            raise ValueError(f"angles must lie strictly inside (0, pi/2), got {vals}")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError(f"angles must be strictly increasing, got {vals}")
        object.__setattr__(self, "radians", vals)

    @classmethod
    def from_degrees(cls, degrees) -> "SwitchingAngles":
        return cls(tuple(math.radians(float(d)) for d in degrees))

    @property
    def degrees(self) -> tuple[float, ...]:
        return tuple(math.degrees(a) for a in self.radians)

    def __len__(self) -> int:
        return len(self.radians)

    def __iter__(self):
        return iter(self.radians)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.radians, dtype=float)


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Signed peak amplitudes of the odd harmonics; even orders are
    identically zero and never stored."""

    orders: tuple[int, ...]
    amplitudes: tuple[float, ...]

    def __post_init__(self):
        if len(self.orders) != len(self.amplitudes):
            raise ValueError("orders and amplitudes must have equal length")
        if any(n < 1 or n % 2 == 0 for n in self.orders):
            raise ValueError(f"orders must be odd positive integers, got {self.orders}")
        object.__setattr__(self, "orders", tuple(int(n) for n in self.orders))
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))

    def magnitudes(self) -> tuple[float, ...]:
        return tuple(abs(a) for a in self.amplitudes)


def _check_dim(cfg: InverterConfig, angles: SwitchingAngles) -> None:
    if len(angles) != cfg.cells:
        raise ValueError(
            f"angle count {len(angles)} does not match cell count {cfg.cells}"
        )


def harmonic_amplitude(cfg: InverterConfig, angles: SwitchingAngles, n: int) -> float:
    """Signed peak amplitude of harmonic order n.

    For odd n this is (4*vdc)/(n*pi) * sum_k cos(n*alpha_k); even orders are
    exactly zero by the quarter-wave symmetry of the staircase.
    """
    if n < 1:
        raise ValueError(f"harmonic order must be >= 1, got {n}")
    _check_dim(cfg, angles)
    if n % 2 == 0:
        return 0.0
    a = angles.as_array()
    return float(4.0 * cfg.vdc / (n * math.pi) * np.sum(np.cos(n * a)))


def fundamental(cfg: InverterConfig, angles: SwitchingAngles) -> float:
    """Peak amplitude of the fundamental (signed)."""
    return harmonic_amplitude(cfg, angles, 1)


def max_fundamental(cfg: InverterConfig) -> float:
    """Largest attainable fundamental, reached in the all-angles-at-zero
    limit: 4 * cells * vdc / pi."""
    return 4.0 * cfg.cells * cfg.vdc / math.pi


def modulation_index(cfg: InverterConfig, v1: float, tol: float = 1e-6) -> float:
    """Fundamental normalized by its theoretical maximum: pi*v1/(4*S*vdc).

    Raises when the demand exceeds the attainable range by more than tol.
    """
    if v1 < 0:
        raise ValueError(f"v1 must be >= 0, got {v1}")
    mi = math.pi * v1 / (4.0 * cfg.cells * cfg.vdc)
    if mi > 1.0 + tol:
        raise ValueError(
            f"modulation index {mi:.6f} exceeds 1: fundamental {v1} V is not "
            f"attainable with {cfg.cells} cells at {cfg.vdc} V"
        )
    return mi


def target_fundamental(cfg: InverterConfig, mi: float) -> float:
    """Inverse of modulation_index: volts of fundamental for 0 < mi <= 1."""
    if not (0.0 < mi <= 1.0):
        raise ValueError(f"modulation index must be in (0, 1], got {mi}")
    return mi * max_fundamental(cfg)


def per_unit_voltage(cfg: InverterConfig, v1: float) -> float:
    """Fundamental normalized by the configured base voltage.

    Distinct from modulation_index by the factor pi/4; this is the
    user-facing operating-point variable.
    """
    if v1 < 0:
        raise ValueError(f"v1 must be >= 0, got {v1}")
    return v1 / cfg.base_voltage


def _segment_breaks(cfg: InverterConfig, angles: SwitchingAngles):
    """Breakpoints and level values of the staircase over [0, pi).

    Levels rise one vdc per angle in the first quarter (left-closed steps)
    and mirror back down in the second quarter.
    """
    a = angles.as_array()
    brk = np.concatenate(([0.0], a, np.pi - a[::-1], [np.pi]))
    k = np.arange(0, cfg.cells + 1)
    lv = np.concatenate((k, k[-2::-1])).astype(float) * cfg.vdc
    return brk, lv


def synthesize(cfg: InverterConfig, angles: SwitchingAngles, samples_per_period: int) -> np.ndarray:
    """Sample one fundamental period of the staircase.

    Each sample is the exact mean of the analytic waveform over its sample
    interval (area-accurate sampling), so the DFT of the result reproduces the
    analytic harmonic amplitudes without aliasing bias from step edges. For an
    even sample count the second half is the negated first half by
    construction, making half-wave antisymmetry exact.
    """
    _check_dim(cfg, angles)
    n = int(samples_per_period)
    if n < 4 * cfg.cells:
        raise ValueError(
            f"samples_per_period must be >= {4 * cfg.cells} (4 per step), got {n}"
        )
    brk, lv = _segment_breaks(cfg, angles)
    if n % 2:
        # odd counts cannot split the period in half; sample the full period
        brk = np.concatenate((brk, np.pi + brk[1:]))
        lv = np.concatenate((lv, -lv))
        edges = 2.0 * np.pi * np.arange(n + 1) / n
        half = None
    else:
        edges = np.pi * np.arange(n // 2 + 1) / (n // 2)
        half = n // 2
    widths = np.diff(brk)
    cum = np.concatenate(([0.0], np.cumsum(lv * widths)))
    idx = np.clip(np.searchsorted(brk, edges, side="right") - 1, 0, len(lv) - 1)
    integral = cum[idx] + lv[idx] * (edges - brk[idx])
    vals = np.diff(integral) / (edges[1] - edges[0])
    if half is not None:
        vals = np.concatenate((vals, -vals))
    peak = cfg.cells * cfg.vdc
    return np.clip(vals, -peak, peak)


def rms_voltage(cfg: InverterConfig, angles: SwitchingAngles) -> float:
    """Exact RMS of the staircase from the step widths:
    sqrt((2/pi) * sum_k (k*vdc)^2 * (alpha_{k+1} - alpha_k)), alpha_{S+1} = pi/2.
    """
    _check_dim(cfg, angles)
    a = np.concatenate((angles.as_array(), [HALF_PI]))
    k = np.arange(1, cfg.cells + 1) * cfg.vdc
    return float(math.sqrt(2.0 / math.pi * np.sum(k**2 * np.diff(a))))


def harmonic_spectrum(cfg: InverterConfig, angles: SwitchingAngles, max_order: int) -> HarmonicSpectrum:
    """Signed amplitudes of all odd harmonics up to max_order."""
    if max_order < 1:
        raise ValueError(f"max_order must be >= 1, got {max_order}")
    _check_dim(cfg, angles)
    orders = np.arange(1, max_order + 1, 2)
    a = angles.as_array()
    sums = np.sum(np.cos(np.outer(orders, a)), axis=1)
    amps = 4.0 * cfg.vdc / (orders * math.pi) * sums
    return HarmonicSpectrum(tuple(int(o) for o in orders), tuple(float(v) for v in amps))
