import dataclasses
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavemap.cli import main
from wavemap.config import (ConfigError, RunConfig, format_config,
                            parse_config)
from wavemap.diagnostics import DiagnosticsRecord
from wavemap.grid import Domain, build_grid
from wavemap.io import (SERIES_HEADER, read_series, read_snapshot_field,
                        write_series, write_snapshot)
from wavemap.model import InitialDataParams, initial_state


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig(amplitude=0.4, grid_n=161)
        assert cfg.method == "rattle" and cfg.domain == "full"
        assert cfg.cfl == 0.2 and cfg.t_end == 1.6
        assert cfg.tol == 1e-12 and cfg.max_iter == 100

    @pytest.mark.parametrize("kwargs", [
        {"domain": "half"}, {"method": "euler"}, {"initial": "bump"},
        {"grid_n": 160}, {"grid_n": 7}, {"r1": 0.9, "r2": 0.5},
        {"n": 0}, {"cfl": 0.0}, {"t_end": -1.0}, {"tol": 0.0},
        {"max_iter": 0}, {"sample_stride": 0},
    ])
    def test_invalid_values_rejected(self, kwargs):
        with pytest.raises(ConfigError):
            RunConfig(**{"amplitude": 0.4, "grid_n": 161, **kwargs})


class TestParseConfig:
    def test_minimal(self):
        cfg = parse_config("amplitude = 0.4\ngrid_n = 161\n")
        assert cfg == RunConfig(amplitude=0.4, grid_n=161)

    def test_comments_and_blank_lines(self):
        text = "# run setup\n\namplitude = 0.4  # ring height\ngrid_n=41\n"
        assert parse_config(text).grid_n == 41

    def test_all_value_kinds(self):
        text = ("amplitude = 0.8\ngrid_n = 41\ndomain = quarter\n"
                "method = rk4\nsnapshot_times = 0.1, 0.5\n"
                "energy_correction = false\nstop_on_flip = yes\nout = /tmp/x\n")
        cfg = parse_config(text)
        assert cfg.domain == "quarter"
        assert cfg.snapshot_times == (0.1, 0.5)
        assert cfg.energy_correction is False
        assert cfg.stop_on_flip is True
        assert cfg.out == "/tmp/x"

    @pytest.mark.parametrize("text,match", [
        ("grid_n = 41\n", "amplitude"),
        ("amplitude = 0.4\n", "grid_n"),
        ("amplitude = 0.4\ngrid_n = 41\nwibble = 3\n", "unknown key"),
        ("amplitude = 0.4\namplitude = 0.5\ngrid_n = 41\n", "duplicate"),
        ("amplitude = zero\ngrid_n = 41\n", "bad value"),
        ("amplitude 0.4\ngrid_n = 41\n", "key = value"),
        ("amplitude = 0.4\ngrid_n = 41\ntol = -1\n", "tol"),
    ])
    def test_errors(self, text, match):
        with pytest.raises(ConfigError, match=match):
            parse_config(text)

    def test_format_round_trip(self):
        cfg = RunConfig(amplitude=0.81871172, grid_n=641, domain="quarter",
                        snapshot_times=(0.8, 0.919375), tol=1e-12,
                        energy_correction=False, out="results/x")
        assert parse_config(format_config(cfg)) == cfg

    @given(a=st.floats(0.001, 10), cfl=st.floats(0.01, 0.5),
           t_end=st.floats(0.01, 5), stride=st.integers(1, 99))
    @settings(max_examples=50, deadline=None)
    def test_format_round_trip_random(self, a, cfl, t_end, stride):
        cfg = RunConfig(amplitude=a, grid_n=41, cfl=cfl, t_end=t_end,
                        sample_stride=stride)
        assert parse_config(format_config(cfg)) == cfg


def make_records():
    return [
        DiagnosticsRecord(t=0.0, phi_max=0.0, psi_max=0.0, origin_dev=0.0,
                          energy=3.25, energy_rel=0.0, delta_e=0.0,
                          s=None, min_w=1.0),
        DiagnosticsRecord(t=0.1, phi_max=1.5e-13, psi_max=2.5e-13,
                          origin_dev=1e-14, energy=3.2500001,
                          energy_rel=3.1e-8, delta_e=-2e-9,
                          s=0.123456789012345678, min_w=0.456),
    ]


class TestSeriesIo:
    def test_round_trip_including_none(self, tmp_path):
        path = tmp_path / "series.csv"
        records = make_records()
        write_series(records, path)
        assert read_series(path) == records

    def test_byte_identical_rewrite(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_series(make_records(), p1)
        write_series(read_series(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_header_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,wrong\n0,1\n")
        with pytest.raises(ValueError, match="header"):
            read_series(path)

    def test_header_names(self):
        assert SERIES_HEADER[0] == "t" and "s" in SERIES_HEADER


class TestSnapshotIo:
    def test_field_round_trip(self, tmp_path):
        g = build_grid(Domain.QUARTER, 11)
        state = initial_state(InitialDataParams(0.7), g)
        cfg = RunConfig(amplitude=0.7, grid_n=11, domain="quarter")
        prefix = tmp_path / "snap"
        write_snapshot(state, g, cfg, prefix)
        for name in ("u", "v", "w", "ut", "vt", "wt"):
            arr = read_snapshot_field(prefix, name)
            np.testing.assert_array_equal(arr, getattr(state, name).interior)
        meta = json.loads((tmp_path / "snap_meta.json").read_text())
        assert meta["grid"]["n"] == 11
        assert parse_config(meta["config"]) == cfg


class TestCli:
    def test_run_writes_series_and_final(self, tmp_path, capsys):
        out = tmp_path / "res"
        rc = main(["run", "--amplitude", "0.4", "--grid-n", "21",
                   "--t-end", "0.1", "--out", str(out)])
        assert rc == 0
        assert (out / "series.csv").exists()
        assert (out / "final_w.csv").exists()
        assert "status=completed" in capsys.readouterr().out

    def test_run_with_config_file_and_override(self, tmp_path, capsys):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("amplitude = 0.4\ngrid_n = 21\nt_end = 0.1\n"
                            f"out = {tmp_path / 'a'}\n")
        rc = main(["run", "--config", str(cfg_file),
                   "--out", str(tmp_path / "b"), "--method", "rk4"])
        assert rc == 0
        assert (tmp_path / "b" / "series.csv").exists()
        assert not (tmp_path / "a").exists()

    def test_compare_writes_three_series(self, tmp_path):
        out = tmp_path / "cmp"
        rc = main(["compare", "--amplitude", "0.4", "--grid-n", "21",
                   "--t-end", "0.1", "--out", str(out)])
        assert rc == 0
        for name in ("series_rk4.csv", "series_rattle.csv",
                     "series_compare.csv"):
            assert (out / name).exists()

    def test_missing_amplitude_is_a_usage_error(self, capsys):
        rc = main(["run", "--grid-n", "21"])
        assert rc == 2
        assert "amplitude" in capsys.readouterr().err

    def test_invalid_value_reported(self, capsys):
        rc = main(["run", "--amplitude", "0.4", "--grid-n", "20"])
        assert rc == 2
        assert "grid_n" in capsys.readouterr().err

    def test_critical_search_json(self, tmp_path, capsys):
        out = tmp_path / "cs"
        rc = main(["critical-search", "--grid-n", "41", "--domain", "quarter",
                   "--a-lo", "0.5", "--a-hi", "1.2", "--tol-a", "0.2",
                   "--out", str(out)])
        assert rc == 0
        payload = json.loads((out / "critical_search.json").read_text())
        assert payload["bracket"][0] < payload["a_star"] <= payload["bracket"][1]
        assert "a_star=" in capsys.readouterr().out

    def test_fit_scaling_round_trip(self, tmp_path, capsys):
        from wavemap.analysis import scaling_model
        t = np.linspace(0.836, 0.85, 20)
        s = scaling_model(t, 0.94151363, -2.02978334)
        records = [DiagnosticsRecord(t=ti, phi_max=0, psi_max=0, origin_dev=0,
                                     energy=1, energy_rel=0, delta_e=0,
                                     s=si, min_w=0) for ti, si in zip(t, s)]
        path = tmp_path / "series.csv"
        write_series(records, path)
        rc = main(["fit-scaling", "--series", str(path)])
        assert rc == 0
        assert "T=0.94151363" in capsys.readouterr().out

    def test_static_check_reports_deviation(self, capsys):
        rc = main(["static-check", "--grid-n", "21", "--t-end", "0.05"])
        assert rc == 0
        assert "max|w-w0|" in capsys.readouterr().out
