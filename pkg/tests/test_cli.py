"""Tests for the command-line interface."""

import json

from typer.testing import CliRunner

from gsnrprobe import __version__
from gsnrprobe.cli import app
from gsnrprobe.config import ProbeSettings
from gsnrprobe.experiment import build_default_scenario, run_experiment
from gsnrprobe.file_parsers import parse_scenario, write_samples
from gsnrprobe.recommender import compute_margins, recommend
from gsnrprobe.report import scenario_to_json
from gsnrprobe.transponder import default_catalog, default_probes, find_probe, synthesize_b2b

runner = CliRunner()

TOPOLOGY_KEYS = ("spans", "slots", "lightpaths", "launch")


def _topology_file(tmp_path):
    data = scenario_to_json(build_default_scenario())
    topology_path = tmp_path / "topology.json"
    topology_path.write_text(json.dumps({k: data[k] for k in TOPOLOGY_KEYS}))
    return topology_path


def _fit_file(tmp_path, probe_name="PL2"):
    samples_path = tmp_path / f"b2b_{probe_name}.csv"
    write_samples(synthesize_b2b(find_probe(default_probes(), probe_name)), samples_path)
    fit_path = tmp_path / f"fit_{probe_name}.json"
    result = runner.invoke(
        app, ["characterize", str(samples_path), str(fit_path), "--probe", probe_name]
    )
    assert result.exit_code == 0, result.output
    return fit_path


def _probe_result_file(tmp_path):
    result_path = tmp_path / "probe.json"
    result_path.write_text(json.dumps({
        "probe": {"name": "PLX", "bits_per_symbol": 2, "symbol_rate_gbd": 12.5,
                  "line_rate_gbps": 40},
        "slot": {"center_freq_thz": 193.9},
        "measured_q_db": 13.0,
        "estimated_gosnr_db": 14.0,
        "estimated_gsnr_db": 14.0,
        "seed": 0,
    }))
    return result_path


def test_version():
    """Test --version prints the package version."""
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert f"gsnrprobe version {__version__}" in result.output


def test_characterize_writes_fit(tmp_path):
    """Test characterizing a noiseless QPSK sweep gives a near-zero residual."""
    fit = json.loads(_fit_file(tmp_path).read_text())
    assert fit["residual_rms_db"] < 1e-9
    assert fit["probe"]["name"] == "PL2"
    assert len(fit["standard_errors"]) == 3
    assert (fit["osnr_min_db"], fit["osnr_max_db"]) == (8.0, 30.0)


def test_characterize_malformed_csv(tmp_path):
    """Test a one-column CSV row is reported as a malformed sample."""
    samples_path = tmp_path / "bad.csv"
    samples_path.write_text("osnr_db,q_db\n10,4\n12\n")
    result = runner.invoke(app, ["characterize", str(samples_path), str(tmp_path / "f.json")])
    assert result.exit_code == 1
    assert "malformed sample" in result.output
    assert not (tmp_path / "f.json").exists()


def test_characterize_missing_file(tmp_path):
    """Test a missing input file exits with an error."""
    result = runner.invoke(app, ["characterize", str(tmp_path / "nope.csv"),
                                 str(tmp_path / "f.json")])
    assert result.exit_code == 1
    assert "Error:" in result.output


def test_probe_is_deterministic(tmp_path):
    """Test the same probe invocation prints the same result."""
    args = ["probe", str(_topology_file(tmp_path)), str(_fit_file(tmp_path)),
            "--path", "1792km", "--seed", "5"]
    first = runner.invoke(app, args)
    second = runner.invoke(app, args)
    assert first.exit_code == 0, first.output
    assert first.stdout == second.stdout
    data = json.loads(first.stdout)
    assert data["path_id"] == "1792km"
    assert data["probe"]["name"] == "PL2"
    assert data["seed"] == 5


def test_noiseless_probe_matches_campaign(tmp_path):
    """Test a noiseless CLI probe equals the noiseless campaign estimate."""
    out_path = tmp_path / "result.json"
    result = runner.invoke(app, [
        "probe", str(_topology_file(tmp_path)), str(_fit_file(tmp_path)),
        "--path", "1016km", "--noise", "0", "--penalty", "1.0", "--out", str(out_path),
    ])
    assert result.exit_code == 0, result.output
    data = json.loads(out_path.read_text())

    settings = ProbeSettings(q_noise_sigma_db=0.0, module_offset_db=0.0)
    report = run_experiment(build_default_scenario(seeds=(0,), settings=settings),
                            only=["1016km"])
    expected = report.path("1016km").results_for("PL2")[0]
    assert abs(data["estimated_gsnr_db"] - expected.estimated_gsnr_db) < 1e-9
    assert abs(data["estimated_gsnr_db"] - data["true_gsnr_db"]) < 0.05


def test_probe_unknown_probe(tmp_path):
    """Test an unknown probe name exits with an error."""
    result = runner.invoke(app, ["probe", str(_topology_file(tmp_path)),
                                 str(_fit_file(tmp_path)), "--probe", "PL9"])
    assert result.exit_code == 1
    assert "unknown probe" in result.output


def test_recommend_golden_json(tmp_path):
    """Test the recommendation JSON for a two-entry catalog."""
    catalog_path = tmp_path / "catalog.json"
    catalog_path.write_text(json.dumps([
        {"name": "200G", "bits_per_symbol": 2, "symbol_rate_gbd": 69,
         "line_rate_gbps": 200, "required_gsnr_typical_db": 9.0},
        {"name": "400G", "bits_per_symbol": 4, "symbol_rate_gbd": 69,
         "line_rate_gbps": 400, "required_gsnr_typical_db": 13.8},
    ]))
    result = runner.invoke(app, ["recommend", str(_probe_result_file(tmp_path)),
                                 "--catalog", str(catalog_path), "--json"])
    assert result.exit_code == 0, result.output

    def entry(name, bits, line_rate, typical):
        return {
            "name": name,
            "bits_per_symbol": bits,
            "symbol_rate_gbd": 69.0,
            "line_rate_gbps": line_rate,
            "required_gsnr_typical_db": typical,
            "required_gsnr_worst_db": typical + 1.0,
            "margin_db": 14.0 - typical,
            "predicted_feasible": True,
            "actual_feasible": None,
            "classification": "unverified",
        }

    expected = {
        "estimated_gsnr_db": 14.0,
        "operating_margin_db": 0.0,
        "chosen": "400G",
        "ranking": [entry("400G", 4.0, 400.0, 13.8), entry("200G", 2.0, 200.0, 9.0)],
    }
    assert result.stdout == json.dumps(expected, indent=2) + "\n"


def test_recommend_ranking_order(tmp_path):
    """Test the printed ranking follows the selection order."""
    result = runner.invoke(app, ["recommend", str(_probe_result_file(tmp_path)), "--json"])
    assert result.exit_code == 0, result.output
    names = [e["name"] for e in json.loads(result.stdout)["ranking"]]
    expected = recommend(compute_margins(14.0, default_catalog()), 0.0)
    assert names == [e.spec.name for e in expected.ranking]


def test_recommend_nothing_feasible(tmp_path):
    """Test a large operating margin leaves no feasible configuration."""
    result = runner.invoke(app, ["recommend", str(_probe_result_file(tmp_path)),
                                 "--operating-margin", "9"])
    assert result.exit_code == 0, result.output
    assert "no feasible configuration" in result.output


def test_experiment_is_reproducible(tmp_path):
    """Test two experiment runs write byte-identical reports."""
    first, second = tmp_path / "first", tmp_path / "second"
    for out_dir in (first, second):
        result = runner.invoke(app, ["experiment", "--seeds", "3", "--out-dir", str(out_dir)])
        assert result.exit_code == 0, result.output
    for name in ("report.json", "probe_results.csv", "margins.csv", "deviations.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
    assert not (first / "figure2.csv").exists()


def test_experiment_options(tmp_path):
    """Test --figure2, --timestamp and --write-scenario."""
    scenario_path = tmp_path / "scenario.json"
    result = runner.invoke(app, [
        "experiment", "--seeds", "2", "--seed", "9", "--noise", "0.1",
        "--out-dir", str(tmp_path / "out"), "--figure2", "--timestamp",
        "--write-scenario", str(scenario_path),
    ])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "out" / "figure2.csv").exists()
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert "generated_at" in report
    assert report["master_seed"] == 9
    assert report["settings"]["q_noise_sigma_db"] == 0.1

    scenario = parse_scenario(scenario_path)
    assert scenario.seeds == (0, 1)
    assert scenario.master_seed == 9


def test_experiment_failed_path_exit_code(tmp_path):
    """Test a scenario with one unmeasurable path still exits with 0."""
    scenario_path = tmp_path / "scenario.json"
    scenario_path.write_text(json.dumps({
        "settings": {"b2b_osnr_min_db": 20.0},
        "seeds": {"start": 0, "count": 2},
    }))
    result = runner.invoke(app, ["experiment", "--scenario", str(scenario_path),
                                 "--out-dir", str(tmp_path / "out")])
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert "5738km" in report["summary"]["failed_paths"]
    assert "1016km" not in report["summary"]["failed_paths"]


def test_experiment_all_paths_failed_exit_code(tmp_path):
    """Test a scenario where every path falls outside the fit range exits with 1."""
    scenario_path = tmp_path / "scenario.json"
    scenario_path.write_text(json.dumps({
        "settings": {"b2b_osnr_min_db": 27.0},
        "seeds": {"start": 0, "count": 2},
    }))
    result = runner.invoke(app, ["experiment", "--scenario", str(scenario_path),
                                 "--out-dir", str(tmp_path / "out")])
    assert result.exit_code == 1
    assert (tmp_path / "out" / "report.json").exists()


def test_experiment_invalid_scenario(tmp_path):
    """Test an unknown scenario field is a schema error."""
    scenario_path = tmp_path / "scenario.json"
    scenario_path.write_text(json.dumps({"seed_count": 2}))
    result = runner.invoke(app, ["experiment", "--scenario", str(scenario_path),
                                 "--out-dir", str(tmp_path / "out")])
    assert result.exit_code == 1
    assert "unknown field" in result.output


def test_experiment_fine_tune(tmp_path):
    """Test --fine-tune records a verified choice per seed and path."""
    result = runner.invoke(app, [
        "experiment", "--seeds", "3", "--fine-tune", "--out-dir", str(tmp_path / "out"),
    ])
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["fine_tuning"] is True
    for path in report["paths"]:
        tuned = path["fine_tuning"]
        assert len(tuned["per_seed"]) == 3
        assert tuned["step_downs"] >= 0
        feasible = {m["name"] for m in path["margins"] if m["actual_feasible"]}
        assert all(name in feasible for name in tuned["per_seed"] if name is not None)


def test_verbose_routes_module_logs_to_rich(tmp_path):
    """Test -V shows module-level log records through the rich handler."""
    result = runner.invoke(app, [
        "-V", "experiment", "--seeds", "1", "--out-dir", str(tmp_path / "out"),
    ])
    assert result.exit_code == 0, result.output
    assert "finished path 1016km" in result.output
