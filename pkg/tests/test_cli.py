import numpy as np
import pytest

from cavity_anneal import cli
from cavity_anneal.output import fmt, read_csv, render_csv


def body(path):
    return [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]


def test_spectrum_csv_shape(tmp_path, capsys):
    assert cli.run(["spectrum", "--out", str(tmp_path), "--plots", "off"]) == 0
    prov, rows = read_csv(tmp_path / "spectrum.csv")
    assert len(rows) == 201
    assert [c for c in rows[0] if c.startswith("E")] == [f"E{k}_rel" for k in range(1, 11)]
    assert all(float(r["E1_rel"]) == 0.0 for r in rows)
    assert float(prov["minimal_gap"]) == pytest.approx(0.1275, abs=0.005)
    assert "minimal gap" in capsys.readouterr().out


def test_spectrum_plots_written(tmp_path):
    assert cli.run(["spectrum", "--out", str(tmp_path), "--n-grid", "11"]) == 0
    assert (tmp_path / "spectrum.svg").read_text().startswith("<svg")


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nU = 0.5\nV = 1.15\nn_grid = 11\nplots = off\n")
    assert cli.run(["spectrum", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    prov, _ = read_csv(tmp_path / "a" / "spectrum.csv")
    assert float(prov["U"]) == 0.5 and float(prov["V"]) == 1.15
    assert cli.run(["spectrum", "--config", str(cfg), "--U", "0.6", "--out", str(tmp_path / "b")]) == 0
    prov, rows = read_csv(tmp_path / "b" / "spectrum.csv")
    assert float(prov["U"]) == 0.6 and float(prov["V"]) == 1.15
    assert len(rows) == 11


def test_unknown_config_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("Uu = 0.5\n")
    assert cli.run(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "unknown config key" in capsys.readouterr().err
    assert not (tmp_path / "spectrum.csv").exists()


@pytest.mark.parametrize(
    "args",
    [
        ["anneal", "--t_f", "0"],
        ["anneal", "--V", "0.9"],
        ["anneal", "--model", "quantum"],
        ["spectrum", "--model", "semiclassical"],
        ["anneal", "--J", "abc"],
        ["cutoff-scan", "--nc-set", "1,5"],
        ["ramp-scan", "--tf-grid", "200,100"],
        ["bogus"],
    ],
)
def test_invalid_inputs_exit_2(args, tmp_path):
    assert cli.run(args + ["--out", str(tmp_path)]) == 2
    assert not any(tmp_path.iterdir())


def test_missing_config_file_exits_2(tmp_path):
    assert cli.run(["spectrum", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_provenance_header_reproduces_run(tmp_path):
    first = tmp_path / "first"
    assert cli.run(["anneal", "--t_f", "10", "--U", "0.45", "--cadence", "50",
                    "--out", str(first), "--plots", "off"]) == 0
    prov, _ = read_csv(first / "anneal_full.csv")
    cfg = tmp_path / "rerun.cfg"
    cfg.write_text("".join(f"{k} = {v}\n" for k, v in prov.items() if k in cli.CONFIG_KEYS))
    second = tmp_path / "second"
    assert cli.run(["anneal", "--config", str(cfg), "--out", str(second), "--plots", "off"]) == 0
    assert body(first / "anneal_full.csv") == body(second / "anneal_full.csv")


def test_anneal_outputs(tmp_path, capsys):
    assert cli.run(["anneal", "--t_f", "20", "--out", str(tmp_path)]) == 0
    _, rows = read_csv(tmp_path / "anneal_full.csv")
    assert float(rows[-1]["t"]) == pytest.approx(20.0)
    assert {"fidelity", "p_site3", "entropy_nats", "photons1", "photons2"} <= set(rows[0])
    for name in ("occupations", "fidelity", "photons", "entropy"):
        assert (tmp_path / f"anneal_full_{name}.svg").exists()
    assert "final fidelity" in capsys.readouterr().out


def test_anneal_integration_abort_exits_1(tmp_path, capsys):
    assert cli.run(["anneal", "--t_f", "20", "--dt", "0.5", "--cadence", "1", "--out", str(tmp_path)]) == 1
    assert "numerical abort" in capsys.readouterr().err


def test_ramp_scan_with_failed_cell_exits_1(tmp_path, capsys):
    code = cli.run(["ramp-scan", "--model", "adiabatic", "--dt", "0.02", "--tf-grid", "1,1.03",
                    "--out", str(tmp_path), "--plots", "off"])
    assert code == 1
    _, rows = read_csv(tmp_path / "ramp_scan.csv")
    assert len(rows) == 2 and rows[1]["final_fidelity"] == "nan" and rows[1]["error"]
    assert "failed" in capsys.readouterr().err


def test_phase_diagram_and_cutoff_scan_small(tmp_path):
    assert cli.run(["phase-diagram", "--grid-U", "0.2,0.8", "--grid-V", "1.1", "--t_f", "10",
                    "--out", str(tmp_path)]) == 0
    for m in ("semiclassical", "full"):
        _, rows = read_csv(tmp_path / f"phase_diagram_{m}.csv")
        assert len(rows) == 2
    assert (tmp_path / "max_entropy_full.svg").exists()
    assert cli.run(["cutoff-scan", "--nc-set", "1,2", "--tf-grid", "10", "--out", str(tmp_path)]) == 0
    _, rows = read_csv(tmp_path / "cutoff_scan.csv")
    assert [r["nc"] for r in rows] == ["1", "2"]


def test_gap_scan(tmp_path, capsys):
    assert cli.run(["gap-scan", "--grid-V", "1.0:1.2:0.1", "--n-grid", "51",
                    "--out", str(tmp_path), "--plots", "off"]) == 0
    _, rows = read_csv(tmp_path / "gap_scan.csv")
    assert [float(r["V"]) for r in rows] == pytest.approx([1.0, 1.1, 1.2])
    assert "monotone increasing" in capsys.readouterr().out


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv("CAVITY_ANNEAL_WORKERS", "3")
    assert cli.resolve("phase-diagram", {}, {}).workers == 3
    assert cli.resolve("phase-diagram", {}, {"workers": "2"}).workers == 2


def test_csv_twelve_significant_digits():
    assert fmt(np.pi) == "3.14159265359"
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(float("nan")) == "nan" and fmt(True) == "true" and fmt(7) == "7"
    text = render_csv([{"x": np.float64(2.0) / 3}], {"U": 0.1 + 0.2})
    assert "# U=0.30000000000000004" in text
    assert text.splitlines()[-1] == "0.666666666667"


def test_default_models():
    assert cli.resolve("ramp-scan", {}, {}).models == ("full", "adiabatic")
    assert cli.resolve("phase-diagram", {}, {}).models == ("semiclassical", "full")
    assert cli.resolve("anneal", {}, {}).models == ("full",)
