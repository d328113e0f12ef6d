"""Serialization of solve records and sweep tables: CSV datasets for the
angle trajectories, THD comparison, voltage tracking, synthesized waveform
and spectrum, plus the JSON solve record.

CSV format is fixed for golden-file stability: comma separated, '.' decimal,
LF line endings, header on the first line. Floats are serialized with repr
(shortest round-trip form) and every numeric field is checked finite before
it is written. Files are written to a temp name and renamed into place.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .strategy import ComparisonRow, Method, SweepRow, SweepTable
from .waveform import HarmonicSpectrum, InverterConfig, SwitchingAngles

__all__ = [
    "fmt_number",
    "write_text_atomic",
    "sweep_csv",
    "comparison_csv",
    "angles_csv",
    "tracking_csv",
    "waveform_csv",
    "spectrum_csv",
    "write_json",
    "load_solve_record",
    "parse_sweep_csv",
]


def fmt_number(value) -> str:
    """Serialize one numeric field; rejects NaN and infinities."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"refusing to serialize non-finite value {value!r}")
    return repr(value)


def write_text_atomic(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _angle_headers(cells: int) -> list[str]:
    return [f"alpha{k}_deg" for k in range(1, cells + 1)]


def _lines(header: list[str], rows: list[list[str]]) -> str:
    return "\n".join([",".join(header)] + [",".join(r) for r in rows]) + "\n"


def sweep_csv(table: SweepTable, cells: int) -> str:
    header = (["v_out_pu", "method"] + _angle_headers(cells)
              + ["achieved_v1_V", "thd_spectral_pct", "thd_total_pct", "feasible", "seed"])
    rows = []
    for r in table:
        rows.append(
            [fmt_number(r.v_out_pu), r.method.value]
            + [fmt_number(d) for d in r.angles.degrees]
            + [fmt_number(r.achieved_v1), fmt_number(r.thd_spectral_pct),
               fmt_number(r.thd_total_pct), fmt_number(r.feasible), fmt_number(r.seed)]
        )
    return _lines(header, rows)


def comparison_csv(rows: tuple[ComparisonRow, ...]) -> str:
    header = ["v_out_pu", "thd_classic_pct", "thd_proposed_pct", "improvement_pct"]
    body = [[fmt_number(r.v_out_pu), fmt_number(r.thd_classic_pct),
             fmt_number(r.thd_proposed_pct), fmt_number(r.improvement_pct)] for r in rows]
    return _lines(header, body)


def angles_csv(table: SweepTable, method: Method, cells: int) -> str:
    """Angle-versus-pu trajectory for one method (for the halved mode these
    are the re-based angles solved on the halved plant)."""
    header = ["v_out_pu"] + _angle_headers(cells)
    body = [[fmt_number(r.v_out_pu)] + [fmt_number(d) for d in r.angles.degrees]
            for r in table if r.method is method]
    return _lines(header, body)


def tracking_csv(table: SweepTable, cfg: InverterConfig) -> str:
    """Demanded versus achieved fundamental, both in volts against the
    original base."""
    header = ["v_out_pu", "method", "target_v1_V", "achieved_v1_V"]
    body = [[fmt_number(r.v_out_pu), r.method.value,
             fmt_number(r.v_out_pu * cfg.base_voltage), fmt_number(r.achieved_v1)]
            for r in table]
    return _lines(header, body)


def waveform_csv(times_s: np.ndarray, volts: np.ndarray) -> str:
    header = ["time_s", "voltage_V"]
    body = [[fmt_number(t), fmt_number(v)] for t, v in zip(times_s, volts)]
    return _lines(header, body)


def spectrum_csv(spectrum: HarmonicSpectrum) -> str:
    header = ["harmonic_order", "amplitude_V", "amplitude_pct_of_fundamental"]
    fund = abs(spectrum.amplitudes[0])
    body = []
    for order, amp in zip(spectrum.orders, spectrum.amplitudes):
        pct = abs(amp) / fund * 100.0 if fund > 0 else float("nan")
        body.append([fmt_number(order), fmt_number(amp), fmt_number(pct)])
    return _lines(header, body)


def _check_finite(node) -> None:
    if isinstance(node, dict):
        for v in node.values():
            _check_finite(v)
    elif isinstance(node, (list, tuple)):
        for v in node:
            _check_finite(v)
    elif isinstance(node, float) and not math.isfinite(node):
        raise ValueError("refusing to serialize non-finite value")


def write_json(path, record: dict) -> None:
    _check_finite(record)
    write_text_atomic(path, json.dumps(record, indent=2) + "\n")


def load_solve_record(path) -> dict:
    with open(path) as handle:
        return json.load(handle)


def parse_sweep_csv(path) -> list[SweepRow]:
    """Read rows back from a sweep CSV (angle columns are degrees)."""
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty sweep CSV")
        angle_cols = [c for c in reader.fieldnames if c.startswith("alpha")]
        rows = []
        for rec in reader:
            rows.append(SweepRow(
                v_out_pu=float(rec["v_out_pu"]),
                method=Method(rec["method"]),
                angles=SwitchingAngles.from_degrees([float(rec[c]) for c in angle_cols]),
                achieved_v1=float(rec["achieved_v1_V"]),
                thd_spectral_pct=float(rec["thd_spectral_pct"]),
                thd_total_pct=float(rec["thd_total_pct"]),
                feasible=rec["feasible"] == "true",
                seed=int(rec["seed"]),
            ))
    return rows
