"""Command-line interface: outputs, manifests, reproducibility, exit codes."""

import json
import os

import pytest

from spinfaraday.cli import OUTPUT_ENV_VAR, main


def read(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def csv_rows(path):
    lines = read(path).splitlines()
    assert lines[0].startswith("# manifest: ")
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return header, rows


class TestValidate:
    def test_passes_and_prints_a_line_per_check(self, tmp_path, capsys):
        rc = main(["validate", "--out", str(tmp_path), "--samples", "50"])
        out = capsys.readouterr().out
        assert rc == 0
        lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
        assert len(lines) >= 5
        assert all(l.startswith("PASS") for l in lines)
        assert "all checks passed" in out
        assert os.path.exists(tmp_path / "validate.manifest.json")


class TestFig6:
    def test_outputs_and_determinism(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["fig6", "--out", str(a)]) == 0
        assert main(["fig6", "--out", str(b)]) == 0
        for name in ("fig6a.csv", "fig6b.csv", "fig6.manifest.json"):
            assert read(a / name) == read(b / name)

        header, rows = csv_rows(a / "fig6a.csv")
        assert header[0] == "length_um"
        assert len(rows) == 25
        header, rows = csv_rows(a / "fig6b.csv")
        assert header[0] == "reflectivity"
        assert len(rows) == 43

    def test_manifest_round_trip_is_byte_identical(self, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        assert main(["fig6", "--out", str(first)]) == 0
        assert (
            main(
                [
                    "fig6",
                    "--config",
                    str(first / "fig6.manifest.json"),
                    "--out",
                    str(second),
                ]
            )
            == 0
        )
        for name in ("fig6a.csv", "fig6b.csv", "fig6.manifest.json"):
            assert read(first / name) == read(second / name)

    def test_manifest_contents(self, tmp_path):
        main(["fig6", "--out", str(tmp_path)])
        manifest = json.loads(read(tmp_path / "fig6.manifest.json"))
        assert manifest["command"] == "fig6"
        assert manifest["kappa_mhz"] == pytest.approx(4.5)
        assert manifest["g0_mhz"] == pytest.approx(2.8)
        assert manifest["reflectivity"] == pytest.approx(0.999972)

    def test_config_overrides_physics(self, tmp_path):
        cfg = tmp_path / "custom.cfg"
        cfg.write_text("kappa_mhz = 9.0\n# comment line\n")
        assert main(["fig6", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        manifest = json.loads(read(tmp_path / "fig6.manifest.json"))
        assert manifest["kappa_mhz"] == pytest.approx(9.0)


class TestFig4:
    def test_threshold_ensemble_small_run(self, tmp_path):
        rc = main(
            [
                "fig4",
                "--out",
                str(tmp_path),
                "--samples",
                "50",
                "--grid=-2:2:9",
            ]
        )
        assert rc == 0
        header, rows = csv_rows(tmp_path / "fig4a.csv")
        assert header == ["delta_mhz", "averaged_transmittance", "pinned_transmittance"]
        assert len(rows) == 9
        header, rows = csv_rows(tmp_path / "fig4b.csv")
        assert header == ["delta_mhz", "averaged_angle_deg", "pinned_angle_deg"]
        assert len(rows) == 9
        # averaging washes the dispersive curve out relative to a pinned atom
        mid = rows[2]
        assert abs(float(mid[1])) <= abs(float(mid[2]))

    def test_coincidence_ensemble_small_run(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"ensemble": "coincidence"}))
        rc = main(
            [
                "fig4",
                "--config",
                str(cfg),
                "--out",
                str(tmp_path),
                "--samples",
                "40",
                "--grid=-2:2:5",
            ]
        )
        assert rc == 0
        manifest = json.loads(read(tmp_path / "fig4.manifest.json"))
        assert manifest["ensemble"] == "coincidence"

    def test_seed_changes_output(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main(["fig4", "--out", str(a), "--samples", "30", "--grid=-1:1:3", "--seed", "1"])
        main(["fig4", "--out", str(b), "--samples", "30", "--grid=-1:1:3", "--seed", "2"])
        assert read(a / "fig4a.csv") != read(b / "fig4a.csv")

    def test_unknown_ensemble_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"ensemble": "levitating"}))
        rc = main(["fig4", "--config", str(cfg), "--out", str(tmp_path)])
        assert rc == 2
        assert "ensemble" in capsys.readouterr().err

    def test_hopeless_coincidence_rate_is_runtime_error(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(
            json.dumps({"ensemble": "coincidence", "rate_max_per_s": 1.0})
        )
        rc = main(
            [
                "fig4",
                "--config",
                str(cfg),
                "--out",
                str(tmp_path),
                "--samples",
                "5",
                "--grid=-1:1:3",
            ]
        )
        assert rc == 1
        assert "error" in capsys.readouterr().err


class TestFig2:
    def test_three_power_curves(self, tmp_path):
        rc = main(
            [
                "fig2",
                "--out",
                str(tmp_path),
                "--samples",
                "4",
                "--grid=-8:8:5",
            ]
        )
        assert rc == 0
        header, rows = csv_rows(tmp_path / "fig2.csv")
        assert header == ["detuning_mhz", "normalized_fluorescence", "power_label"]
        assert len(rows) == 15
        assert {r[2] for r in rows} == {"1 nW", "100 nW", "300 nW"}
        values = [float(r[1]) for r in rows]
        assert max(values) == pytest.approx(1.0, abs=1e-9)


class TestFig5:
    def test_outputs(self, tmp_path):
        rc = main(
            [
                "fig5",
                "--out",
                str(tmp_path),
                "--samples",
                "60",
                "--grid=-2:2:5",
            ]
        )
        assert rc == 0

        header, rows = csv_rows(tmp_path / "fig5a.csv")
        assert header == ["phi_deg", "prior", "p_down"]
        assert len(rows) == 3 * 181
        crossing = [r for r in rows if float(r[0]) == 90.0]
        assert len(crossing) == 3
        for r in crossing:
            assert float(r[2]) == pytest.approx(1.0, abs=1e-9)

        header, rows = csv_rows(tmp_path / "fig5b.csv")
        assert header == ["phi_deg", "port", "p_down", "click_prob"]
        ports = {r[1] for r in rows}
        assert ports == {"transmitted", "reflected"}
        for r in rows:
            assert 0.0 <= float(r[2]) <= 1.0

        header, rows = csv_rows(tmp_path / "fig5_inset.csv")
        assert header == ["delta_mhz", "p_down"]
        assert len(rows) == 5


class TestErrorHandling:
    @pytest.mark.parametrize(
        "argv",
        [
            ["fig4", "--grid=1:2"],
            ["fig4", "--grid=2:1:5"],
            ["fig4", "--grid=a:b:c"],
            ["fig4", "--grid=-1:1:0"],
            ["fig4", "--seed", "-3"],
            ["fig4", "--samples", "0"],
        ],
    )
    def test_bad_run_arguments_exit_2(self, tmp_path, capsys, argv):
        rc = main(argv + ["--out", str(tmp_path)])
        assert rc == 2
        assert capsys.readouterr().err != ""

    def test_unknown_config_key_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("coupling_mhz = 2.8\n")
        rc = main(["fig6", "--config", str(cfg), "--out", str(tmp_path)])
        assert rc == 2
        assert "coupling_mhz" in capsys.readouterr().err

    def test_invalid_physics_value_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("kappa_mhz = -4.4\n")
        rc = main(["fig6", "--config", str(cfg), "--out", str(tmp_path)])
        assert rc == 2
        capsys.readouterr()

    def test_missing_config_file_exit_2(self, tmp_path, capsys):
        rc = main(["fig6", "--config", str(tmp_path / "absent.json"), "--out", str(tmp_path)])
        assert rc == 2
        assert "absent.json" in capsys.readouterr().err

    def test_bad_grid_writes_no_files(self, tmp_path):
        main(["fig4", "--grid=oops", "--out", str(tmp_path)])
        assert list(tmp_path.iterdir()) == []


class TestOutputDirectory:
    def test_environment_variable_fallback(self, tmp_path, monkeypatch):
        target = tmp_path / "from_env"
        monkeypatch.setenv(OUTPUT_ENV_VAR, str(target))
        assert main(["validate", "--samples", "20"]) == 0
        assert (target / "validate.manifest.json").exists()

    def test_flag_beats_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_ENV_VAR, str(tmp_path / "env"))
        explicit = tmp_path / "flag"
        assert main(["validate", "--samples", "20", "--out", str(explicit)]) == 0
        assert (explicit / "validate.manifest.json").exists()
        assert not (tmp_path / "env").exists()

    def test_grid_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"grid": "-1:1:3"}))
        rc = main(
            [
                "fig4",
                "--config",
                str(cfg),
                "--out",
                str(tmp_path),
                "--samples",
                "20",
                "--grid=-2:2:7",
            ]
        )
        assert rc == 0
        manifest = json.loads(read(tmp_path / "fig4.manifest.json"))
        assert manifest["grid"] == "-2:2:7"
        _, rows = csv_rows(tmp_path / "fig4a.csv")
        assert len(rows) == 7
