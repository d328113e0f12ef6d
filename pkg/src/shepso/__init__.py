"""shepso: staircase selective-harmonic-elimination toolkit for cascaded
H-bridge multilevel inverters.

Computes optimal switching angles with a seeded particle swarm optimizer,
evaluates harmonic spectra and THD analytically, and implements the
DC-halving operating strategy that restores waveform quality at low
per-unit output voltage.
"""

__version__ = "0.1.0"

from .pso import BoundPolicy, PsoParams, SolveResult, grid_oracle, solve
from .she import Residuals, SheProblem, cost, residuals, thd_spectral, thd_total
from .strategy import (
    ComparisonRow,
    Method,
    OperatingPoint,
    ResolvedPlant,
    SheOptions,
    SweepRow,
    SweepTable,
    compare_methods,
    resolve_plant,
    solve_operating_point,
    sweep,
)
from .waveform import (
    HarmonicSpectrum,
    InverterConfig,
    SwitchingAngles,
    fundamental,
    harmonic_amplitude,
    harmonic_spectrum,
    max_fundamental,
    modulation_index,
    per_unit_voltage,
    rms_voltage,
    synthesize,
    target_fundamental,
)

__all__ = [
    "__version__",
    "BoundPolicy", "PsoParams", "SolveResult", "grid_oracle", "solve",
    "Residuals", "SheProblem", "cost", "residuals", "thd_spectral", "thd_total",
    "ComparisonRow", "Method", "OperatingPoint", "ResolvedPlant", "SheOptions",
    "SweepRow", "SweepTable", "compare_methods", "resolve_plant",
    "solve_operating_point", "sweep",
    "HarmonicSpectrum", "InverterConfig", "SwitchingAngles", "fundamental",
    "harmonic_amplitude", "harmonic_spectrum", "max_fundamental",
    "modulation_index", "per_unit_voltage", "rms_voltage", "synthesize",
    "target_fundamental",
]
