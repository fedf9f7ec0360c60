import json

import numpy as np
import pytest

from liouspace.cli import (
    EXIT_GUARD,
    EXIT_OK,
    EXIT_USAGE,
    parse_config,
    parse_potential_spec,
    run,
)
from liouspace.errors import ParseError, UnknownKey


def read_csv(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [[v for v in line.split(",")] for line in lines[1:]]
    return header, rows


class TestParseConfig:
    def test_minimal_config_gets_defaults(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"scenario": "jc", "d": 0.02}))
        cfg = parse_config(path)
        assert cfg.scenario == "jc"
        assert cfg.params["d"] == 0.02
        assert cfg.params["omega_e"] == 1.0  # default applied

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"scenario": "jc", "coupling": 0.1}))
        with pytest.raises(UnknownKey, match="coupling"):
            parse_config(path)

    def test_malformed_json_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            parse_config(path)

    def test_unknown_scenario_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"scenario": "warp"}))
        with pytest.raises(ParseError):
            parse_config(path)

    def test_resolved_config_round_trips(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"scenario": "evolve", "t": 0.25}))
        cfg = parse_config(path)
        emitted = tmp_path / "resolved.json"
        emitted.write_text(json.dumps(cfg.resolved()))
        again = parse_config(emitted)
        assert again.resolved() == cfg.resolved()


class TestPotentialSpec:
    def test_specs(self):
        assert parse_potential_spec("free").coefficients == (0.0,)
        assert parse_potential_spec("quartic:0.1").coefficients[-1] == 0.1
        assert parse_potential_spec("harmonic:2.0").coefficients == (0.0, 0.0, 1.0)
        assert parse_potential_spec("poly:1,2,3").coefficients == (1.0, 2.0, 3.0)

    def test_bad_spec_is_usage_error(self, tmp_path):
        code = run(["evolve", "--potential", "cubic", "--outdir", str(tmp_path)])
        assert code == EXIT_USAGE

    def test_config_object_form(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "scenario": "superop",
                    "potential": {"type": "polynomial", "coeffs": [0.0, 0.0, 0.5]},
                    "grid_n": 16,
                }
            )
        )
        code = run(["superop", "--config", str(cfg), "--outdir", str(tmp_path)])
        assert code == EXIT_OK
        manifest = json.loads(
            (tmp_path / "superop" / "superop_manifest.json").read_text()
        )
        assert manifest["checks"]["e_vanishes_identically"]
        # dense Liouvillian exported for small grids
        assert "superop_liouvillian.csv" in manifest["outputs"]

    def test_coulomb_object_rejected_for_grid_scenarios(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {"scenario": "superop", "potential": {"type": "coulomb", "e2": 1.0}}
            )
        )
        code = run(["superop", "--config", str(cfg), "--outdir", str(tmp_path)])
        assert code == EXIT_USAGE


class TestScenarios:
    def test_evolve_happy_path(self, tmp_path):
        code = run(
            [
                "evolve", "--potential", "quartic:0.1", "--kind", "cl",
                "--t", "0.5", "--grid-n", "64", "--steps", "50", "--n-out", "10",
                "--sigma-p", "0.6", "--outdir", str(tmp_path),
            ]
        )
        assert code == EXIT_OK
        header, rows = read_csv(tmp_path / "evolve" / "evolve_series.csv")
        assert header == ["t", "trace", "x_mean", "p_mean", "x2_mean", "purity"]
        assert len(rows) == 11
        manifest = json.loads((tmp_path / "evolve" / "evolve_manifest.json").read_text())
        assert manifest["checks"]["trace_conserved_1e-8"]
        assert "evolve_series.csv" in manifest["outputs"]
        for name in manifest["outputs"]:
            assert (tmp_path / "evolve" / name).exists()

    def test_evolve_deterministic(self, tmp_path):
        args = [
            "evolve", "--t", "0.2", "--grid-n", "32", "--steps", "20",
            "--n-out", "5", "--grid-span", "6.0", "--sigma-p", "0.8", "--x0", "0.3",
        ]
        run(args + ["--outdir", str(tmp_path / "a")])
        run(args + ["--outdir", str(tmp_path / "b")])
        a = (tmp_path / "a" / "evolve" / "evolve_series.csv").read_bytes()
        b = (tmp_path / "b" / "evolve" / "evolve_series.csv").read_bytes()
        assert a == b

    def test_jc_rabi(self, tmp_path):
        code = run(
            [
                "jc", "--omega-e", "1.0", "--omega", "1.0", "--d", "0.05",
                "--eps", "0,0", "--init", "e0", "--t", "10.0", "--steps", "40",
                "--outdir", str(tmp_path),
            ]
        )
        assert code == EXIT_OK
        header, rows = read_csv(tmp_path / "jc" / "jc_series.csv")
        assert header[:2] == ["t", "P_e"]
        for row in rows:
            t, p_e = float(row[0]), float(row[1])
            assert p_e == pytest.approx(np.cos(0.05 * t) ** 2, abs=1e-6)

    def test_jc_guard_abort(self, tmp_path):
        code = run(
            ["jc", "--init", "coherent:2.5", "--n-max", "3", "--outdir", str(tmp_path)]
        )
        assert code == EXIT_GUARD

    def test_superop_outputs(self, tmp_path):
        code = run(
            ["superop", "--potential", "harmonic:1.0", "--outdir", str(tmp_path)]
        )
        assert code == EXIT_OK
        manifest = json.loads(
            (tmp_path / "superop" / "superop_manifest.json").read_text()
        )
        assert manifest["checks"]["e_vanishes_identically"]
        data = np.loadtxt(tmp_path / "superop" / "superop_e.csv", delimiter=",")
        assert np.max(np.abs(data)) < 1e-12

    def test_propagator_outputs(self, tmp_path):
        code = run(
            ["propagator", "--n-points", "3", "--lam", "0.3", "--outdir", str(tmp_path)]
        )
        assert code == EXIT_OK
        header, rows = read_csv(tmp_path / "propagator" / "propagator_points.csv")
        assert "abs_err_cl" in header
        idx = header.index("abs_err_cl")
        g_scale = max(
            abs(complex(float(r[header.index("G_cl_re")]), float(r[header.index("G_cl_im")])))
            for r in rows
        )
        for row in rows:
            assert float(row[idx]) < 1e-3 * g_scale

    def test_bipartite_outputs(self, tmp_path):
        code = run(
            [
                "bipartite", "--n-levels", "3", "--lam", "0.0002", "--t", "1.0",
                "--steps", "5", "--outdir", str(tmp_path),
            ]
        )
        assert code == EXIT_OK
        header, rows = read_csv(tmp_path / "bipartite" / "bipartite_series.csv")
        assert header[0] == "t"
        assert float(rows[-1][1]) <= 1.0 + 1e-12

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"scenario": "jc", "d": 0.05, "t": 5.0, "steps": 10}))
        code = run(
            ["jc", "--config", str(cfg), "--t", "2.0", "--outdir", str(tmp_path)]
        )
        assert code == EXIT_OK
        manifest = json.loads((tmp_path / "jc" / "jc_manifest.json").read_text())
        assert manifest["config"]["t"] == 2.0  # flag wins
        assert manifest["config"]["d"] == 0.05  # config survives

    def test_unknown_flag_is_usage_error(self, tmp_path):
        assert run(["evolve", "--warp", "9"]) == EXIT_USAGE

    def test_bad_config_key_is_usage_error(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"scenario": "jc", "warp": 9}))
        assert run(["jc", "--config", str(cfg), "--outdir", str(tmp_path)]) == EXIT_USAGE

    def test_validate_passes_on_correct_build(self, tmp_path):
        code = run(["validate", "--outdir", str(tmp_path)])
        assert code == EXIT_OK
        report = (tmp_path / "validate" / "validate_report.csv").read_text()
        assert "FAIL" not in report

    def test_outdir_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LIOUSPACE_OUTDIR", str(tmp_path / "env_out"))
        code = run(["superop", "--potential", "harmonic:1.0"])
        assert code == EXIT_OK
        assert (tmp_path / "env_out" / "superop" / "superop_manifest.json").exists()
