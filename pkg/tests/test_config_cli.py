import json

import numpy as np
import pytest

from chiral_phonons.cli import main
from chiral_phonons.experiments.config import ConfigError, build_config, load_config


def _write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def test_defaults_per_scenario():
    fig2 = build_config({"scenario": "fig2"})
    assert fig2.n_pairs == 2 and fig2.mode_spacing > fig2.gammas[0] / fig2.sound_speed
    fig4 = build_config({"scenario": "fig4"})
    assert fig4.gammas == [2e-4, 5e-4, 1e-3]
    assert fig4.mode_spacing == 1e-4
    assert [g / (fig4.mode_spacing * fig4.sound_speed) for g in fig4.gammas] == pytest.approx([2, 5, 10])
    assert len(fig4.pump_x) >= 8 and 0.0 in fig4.pump_x
    assert fig4.pump_detuning == -fig4.omega_c


def test_overrides_take_precedence():
    cfg = build_config({"scenario": "fig4", "seed": 1}, {"seed": 7, "n_realizations": 32, "convention": "raw", "output_dir": None})
    assert cfg.seed == 7 and cfg.n_realizations == 32 and cfg.convention == "raw"


@pytest.mark.parametrize(
    "data",
    [
        {"scenario": "fig9"},
        {"scenario": "fig2", "unknown_key": 1},
        {"scenario": "fig2", "seed": -1},
        {"scenario": "fig4", "gammas": []},
        {"scenario": "fig4", "convention": "both"},
        {"scenario": "fig4", "schema_version": "0.1"},
        {},
    ],
)
def test_schema_rejections(data):
    with pytest.raises(ConfigError):
        build_config(data)


def test_regime_guards():
    with pytest.raises(ConfigError, match="resolved"):
        build_config({"scenario": "fig2", "mode_spacing": 1e-4})
    with pytest.raises(ConfigError, match="overlapping"):
        build_config({"scenario": "fig4", "mode_spacing": 1e-2})
    with pytest.raises(ConfigError, match="x = 0"):
        build_config({"scenario": "fig4", "pump_x": [1.0, 2.0]})
    with pytest.raises(ConfigError):
        build_config({"scenario": "fig4", "n_realizations": 4, "n_blocks": 8})


def test_load_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    arr = _write(tmp_path, [1, 2])
    with pytest.raises(ConfigError):
        load_config(arr)


def test_validate_command(tmp_path, capsys):
    good = _write(tmp_path, {"scenario": "fig2"})
    assert main(["validate", str(good)]) == 0
    assert "valid fig2" in capsys.readouterr().out
    bad = _write(tmp_path, {"scenario": "fig2", "typo": 3}, "bad.json")
    assert main(["validate", str(bad)]) == 2
    assert "config error" in capsys.readouterr().err


def test_run_needs_a_scenario(capsys):
    assert main(["run"]) == 2


def test_run_fig2_from_cli(tmp_path):
    out = tmp_path / "fig2"
    assert main(["run", "--scenario", "fig2", "--out", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    assert {"linewidths.csv", "fig2.svg", "manifest.json", "response_pump00.csv"} <= names
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["scenario"] == "fig2"
    assert manifest["seed"] == 20170101
    assert manifest["n_realizations"] == 1
    assert set(manifest["files"]) >= {"linewidths.csv", "fig2.svg"}
    rows = (out / "linewidths.csv").read_text().splitlines()
    assert rows[0].startswith("gamma_opt,branch,mode_q,omega_hat,gamma_hat")
    assert len(rows) == 1 + 2 * 5


def test_run_fig4_small_from_cli(tmp_path):
    cfg = {
        "scenario": "fig4",
        "gammas": [2e-4, 5e-4],
        "pump_x": [0.0, 0.01, 0.1, 1.0, 10.0],
        "n_realizations": 16,
        "n_blocks": 4,
        "dump_disorder": True,
    }
    out = tmp_path / "fig4"
    path = _write(tmp_path, {**cfg, "output_dir": str(out)})
    assert main(["run", str(path), "--seed", "3", "--phase-match", "lorentzian", "--convention", "raw"]) == 0
    svg = (out / "fig4.svg").read_text()
    assert 'id="series-rhogamma-2"' in svg and 'id="series-rhogamma-5"' in svg
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 3 and manifest["config"]["convention"] == "raw"
    assert manifest["n_blocks"] == 4 and manifest["block_size"] == 4
    assert [s["rho_gamma"] for s in manifest["results"]["series"]] == pytest.approx([2.0, 5.0])
    sweep = (out / "sweep.csv").read_text().splitlines()
    assert sweep[0] == "rho_gamma,x,normalized_diffusion,sigma,diffusion_ratio,born_ratio,fwhm_ratio,damping_hat"
    assert len(sweep) == 1 + 2 * 5
    dump = (out / "disorder_rg2_0.csv").read_text().splitlines()
    assert dump[0] == "row,column,real,imag"
    for sub in ("rhogamma_2", "rhogamma_5"):
        assert (out / sub / "response_x00.csv").exists()
    x0 = [r for r in sweep[1:] if r.split(",")[1] == "0.0"]
    assert all(float(r.split(",")[2]) == 1.0 for r in x0)
