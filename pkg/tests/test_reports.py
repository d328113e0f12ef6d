"""CSV/JSON serialization: pinned headers, atomic writes, finite guards."""

import json
import math

import numpy as np
import pytest

from shepso import (
    ComparisonRow,
    Method,
    SwitchingAngles,
    SweepRow,
    SweepTable,
    harmonic_spectrum,
)
from shepso import reports
from shepso.service.schemas import RunConfig


def _table():
    rows = (
        SweepRow(0.2, Method.CLASSIC, SwitchingAngles.from_degrees([10, 20, 30]),
                 60.0, 80.0, 85.5, False, 11),
        SweepRow(0.2, Method.PROPOSED, SwitchingAngles.from_degrees([15, 35, 55]),
                 60.0, 30.0, 33.0, True, 12),
        SweepRow(0.8, Method.CLASSIC, SwitchingAngles.from_degrees([13.2, 38.0, 82.9]),
                 240.0, 0.001, 19.0, True, 13),
        SweepRow(0.8, Method.PROPOSED, SwitchingAngles.from_degrees([13.2, 38.0, 82.9]),
                 240.0, 0.001, 19.0, True, 13),
    )
    return SweepTable(rows)


class TestFormatting:
    def test_floats_shortest_round_trip(self):
        assert reports.fmt_number(0.1) == "0.1"
        assert reports.fmt_number(np.float64(0.25)) == "0.25"
        assert reports.fmt_number(300.0) == "300.0"

    def test_ints_and_bools(self):
        assert reports.fmt_number(42) == "42"
        assert reports.fmt_number(True) == "true"
        assert reports.fmt_number(np.bool_(False)) == "false"

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), -float("inf")])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(ValueError):
            reports.fmt_number(bad)


class TestCsvSchemas:
    def test_sweep_header_pinned(self):
        text = reports.sweep_csv(_table(), cells=3)
        assert text.splitlines()[0] == (
            "v_out_pu,method,alpha1_deg,alpha2_deg,alpha3_deg,"
            "achieved_v1_V,thd_spectral_pct,thd_total_pct,feasible,seed")
        assert text.endswith("\n")
        assert "\r" not in text

    def test_comparison_header_pinned(self):
        rows = (ComparisonRow(0.2, 84.66, 33.23, 60.748), )
        text = reports.comparison_csv(rows)
        assert text.splitlines()[0] == \
            "v_out_pu,thd_classic_pct,thd_proposed_pct,improvement_pct"
        assert "84.66,33.23,60.748" in text

    def test_angles_header_pinned(self):
        text = reports.angles_csv(_table(), Method.CLASSIC, cells=3)
        lines = text.splitlines()
        assert lines[0] == "v_out_pu,alpha1_deg,alpha2_deg,alpha3_deg"
        assert len(lines) == 3  # two classic rows

    def test_tracking_header_pinned(self, ref_cfg):
        text = reports.tracking_csv(_table(), ref_cfg)
        lines = text.splitlines()
        assert lines[0] == "v_out_pu,method,target_v1_V,achieved_v1_V"
        assert lines[1].startswith("0.2,classic,60.0,")

    def test_waveform_and_spectrum_headers(self, ref_cfg):
        text = reports.waveform_csv(np.array([0.0, 1e-3]), np.array([0.0, 100.0]))
        assert text.splitlines()[0] == "time_s,voltage_V"
        spec = harmonic_spectrum(ref_cfg, SwitchingAngles.from_degrees([10, 20, 30]), 7)
        stext = reports.spectrum_csv(spec)
        assert stext.splitlines()[0] == \
            "harmonic_order,amplitude_V,amplitude_pct_of_fundamental"
        first = stext.splitlines()[1].split(",")
        assert first[0] == "1"
        assert float(first[2]) == pytest.approx(100.0)


class TestRoundTrips:
    def test_sweep_csv_parse_round_trip(self, tmp_path):
        table = _table()
        path = tmp_path / "sweep.csv"
        reports.write_text_atomic(path, reports.sweep_csv(table, cells=3))
        rows = reports.parse_sweep_csv(path)
        assert len(rows) == len(table.rows)
        for got, want in zip(rows, table.rows):
            assert got.v_out_pu == want.v_out_pu
            assert got.method is want.method
            assert got.feasible == want.feasible
            assert got.seed == want.seed
            assert got.thd_total_pct == want.thd_total_pct
            assert got.angles.radians == pytest.approx(want.angles.radians, rel=1e-12)

    def test_byte_stable_output(self):
        table = _table()
        assert reports.sweep_csv(table, 3) == reports.sweep_csv(table, 3)

    def test_run_config_round_trip(self):
        config = RunConfig(pu_grid=[0.1, 0.3], threshold=0.4, output_dir="/tmp/x",
                           formats=["csv"])
        again = RunConfig.model_validate(config.model_dump())
        assert again == config
        via_json = RunConfig.model_validate(json.loads(config.model_dump_json()))
        assert via_json == config

    def test_run_config_default_grid(self):
        # the default sweep covers the five reference points with both methods
        config = RunConfig()
        assert config.pu_grid == [0.1, 0.2, 0.3, 0.4, 0.5]
        assert [m.value for m in config.methods] == ["classic", "proposed"]
        assert config.threshold == 0.5


class TestAtomicWrites:
    def test_write_and_overwrite(self, tmp_path):
        path = tmp_path / "sub" / "file.csv"
        reports.write_text_atomic(path, "a,b\n1,2\n")
        assert path.read_text() == "a,b\n1,2\n"
        reports.write_text_atomic(path, "a,b\n3,4\n")
        assert path.read_text() == "a,b\n3,4\n"
        assert list(path.parent.iterdir()) == [path]  # no temp leftovers

    def test_json_rejects_non_finite(self, tmp_path):
        with pytest.raises(ValueError):
            reports.write_json(tmp_path / "r.json", {"x": {"y": [1.0, math.nan]}})
        assert not (tmp_path / "r.json").exists()

    def test_json_round_trip(self, tmp_path):
        record = {"a": 1, "b": [0.1, 0.2], "c": {"d": "text"}}
        reports.write_json(tmp_path / "r.json", record)
        assert reports.load_solve_record(tmp_path / "r.json") == record
