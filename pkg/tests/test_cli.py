"""
End-to-end tests for the cco command line on a small layout.
"""

from pathlib import Path

import pandas as pd
import pytest
from typer.testing import CliRunner

from src.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME
from src.config import MethodName, load_experiment
from src.errors import ConfigError
from src.main import app
from src.optim.random_search import random_search
from src.services.experiment_runner import ExperimentRunner
from src.services.history import write_history

runner = CliRunner()

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

SMALL_TOML = """
[layout]
name = "cli"
seed = 5

[layout.grid]
width_m = 400.0
height_m = 400.0
resolution_m = 20.0

[[layout.sites]]
x_m = 100.0
y_m = 100.0
height_m = 25.0
azimuths_deg = [0.0, 120.0, 240.0]

[[layout.sites]]
x_m = 300.0
y_m = 300.0
height_m = 25.0
azimuths_deg = [60.0, 180.0, 300.0]

[thresholds]
gamma_w_dbm = -110.0
gamma_o_db = 6.0

[method]
name = "random"
seed = 1
lambda_stride = 0.5

[method.random]
budget = 10

[method.bo]
n_init = 6
n_iterations = 2
fit_restarts = 2
refit_restarts = 1

[method.bo.acquisition]
raw_samples = 32
top_k = 2
pattern_iterations = 3

[method.ddpg]
iterations = 8
batch_size = 4
buffer_capacity = 8

[output]
directory = "{out}"
"""


@pytest.fixture
def config_file(tmp_path) -> Path:
    path = tmp_path / "small.toml"
    path.write_text(SMALL_TOML.format(out=(tmp_path / "runs").as_posix()), encoding="utf-8")
    return path


def _invoke(*args: str):
    return runner.invoke(app, list(args))


def test_gen_env_is_deterministic(config_file, tmp_path):
    """Test two gen-env calls with one seed write identical files."""
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert _invoke("gen-env", "--config", str(config_file), "--seed", "3", "--out", str(a)).exit_code == EXIT_OK
    assert _invoke("gen-env", "--config", str(config_file), "--seed", "3", "--out", str(b)).exit_code == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_full_pipeline(config_file, tmp_path):
    """Test gen-env, precompute, each run and report in sequence."""
    runs = tmp_path / "runs"
    assert _invoke("gen-env", "--config", str(config_file)).exit_code == EXIT_OK
    assert (runs / "environment.json").exists()

    result = _invoke("precompute", "--config", str(config_file))
    assert result.exit_code == EXIT_OK, result.output
    assert (runs / "coverage.cco").exists()

    for method in ("random", "bo", "ddpg"):
        result = _invoke("run", "--method", method, "--config", str(config_file))
        assert result.exit_code == EXIT_OK, result.output
        assert (runs / f"{method}_history.csv").exists()
        assert (runs / f"{method}_front.csv").exists()

    assert len(pd.read_csv(runs / "random_history.csv")) == 10
    assert len(pd.read_csv(runs / "bo_history.csv")) == 8
    ddpg = pd.read_csv(runs / "ddpg_history.csv")
    assert len(ddpg) == 3 * 8
    assert sorted(ddpg["lambda"].unique().tolist()) == [0.0, 0.5, 1.0]

    report_dir = tmp_path / "report"
    result = _invoke(
        "report",
        str(runs / "random_history.csv"),
        str(runs / "bo_history.csv"),
        str(runs / "ddpg_history.csv"),
        "--config", str(config_file),
        "--out", str(report_dir),
    )
    assert result.exit_code == EXIT_OK, result.output
    assert (report_dir / "sample_efficiency.csv").exists()
    assert (report_dir / "comparison.json").exists()
    assert (report_dir / "classes_min_power.png").exists()
    assert (report_dir / "classes_bo.png").exists()


def test_run_is_reproducible(config_file, tmp_path):
    """Test reruns with one seed give byte-identical CSVs."""
    first, second = tmp_path / "first", tmp_path / "second"
    for out in (first, second):
        result = _invoke("run", "--method", "random", "--config", str(config_file), "--seed", "4", "--out", str(out))
        assert result.exit_code == EXIT_OK, result.output
    assert (first / "random_history.csv").read_bytes() == (second / "random_history.csv").read_bytes()
    assert (first / "random_front.csv").read_bytes() == (second / "random_front.csv").read_bytes()


def test_budget_override(config_file, tmp_path):
    """Test --budget sets the random evaluation count."""
    result = _invoke("run", "--method", "random", "--config", str(config_file), "--budget", "3", "--out", str(tmp_path))
    assert result.exit_code == EXIT_OK, result.output
    assert len(pd.read_csv(tmp_path / "random_history.csv")) == 3


def test_missing_config_section_exits_2(config_file, tmp_path):
    """Test an incomplete config file exits with the configuration code."""
    text = config_file.read_text(encoding="utf-8")
    broken = tmp_path / "broken.toml"
    broken.write_text(text.replace("[thresholds]\ngamma_w_dbm = -110.0\ngamma_o_db = 6.0\n", ""), encoding="utf-8")
    result = _invoke("gen-env", "--config", str(broken))
    assert result.exit_code == EXIT_CONFIG
    assert "thresholds" in result.output


def test_bad_arguments_exit_2(config_file, tmp_path):
    """Test non-positive budgets, bad strides and missing files."""
    assert _invoke("run", "--method", "random", "--config", str(config_file), "--budget", "0").exit_code == EXIT_CONFIG
    assert (
        _invoke("run", "--method", "ddpg", "--config", str(config_file), "--lambda-stride", "0.3").exit_code
        == EXIT_CONFIG
    )
    assert _invoke("precompute", "--config", str(config_file), "--env", str(tmp_path / "none.json")).exit_code == EXIT_CONFIG
    assert _invoke("run", "--method", "ddpg", "--config", str(config_file), "--lambda-stride", "0").exit_code == EXIT_CONFIG
    assert (
        _invoke("run", "--method", "ddpg", "--config", str(config_file), "--lambda-stride=-0.5").exit_code
        == EXIT_CONFIG
    )


def test_malformed_history_exits_2(tmp_path):
    """Test report lists bad rows and exits with the configuration code."""
    bad = tmp_path / "bad.csv"
    bad.write_text("iteration,method\nx,random\n", encoding="utf-8")
    result = _invoke("report", str(bad), "--out", str(tmp_path / "report"))
    assert result.exit_code == EXIT_CONFIG


def test_corrupt_tensor_exits_3(config_file, tmp_path):
    """Test a truncated tensor file is a runtime failure."""
    runs = tmp_path / "runs"
    runs.mkdir()
    (runs / "coverage.cco").write_bytes(b"CCOTENS")
    result = _invoke("run", "--method", "random", "--config", str(config_file))
    assert result.exit_code == EXIT_RUNTIME


def test_planned_evaluations_default_config():
    """Test the shipped budgets: BO 512 + 500, DDPG 11 x 30000, random 1012."""
    config = load_experiment(CONFIGS / "default.toml")
    experiment = ExperimentRunner(config)
    assert experiment.planned_evaluations(MethodName.BO) == 1012
    assert experiment.planned_evaluations(MethodName.DDPG) == 11 * 30_000
    assert experiment.planned_evaluations(MethodName.RANDOM) == 1012
    assert experiment.planned_evaluations(MethodName.BO, budget=10) == 522
    assert experiment.planned_evaluations(MethodName.DDPG, budget=5, lambda_stride=0.5) == 15


def test_run_method_defaults_to_config(config_file, tmp_path):
    """Test run without --method uses method.name from the config."""
    result = _invoke("run", "--config", str(config_file), "--out", str(tmp_path))
    assert result.exit_code == EXIT_OK, result.output
    assert len(pd.read_csv(tmp_path / "random_history.csv")) == 10
    assert not (tmp_path / "bo_history.csv").exists()


def test_zero_stride_rejected_by_runner(config_file):
    """Test a zero stride is an error, not a fallback to the configured one."""
    experiment = ExperimentRunner(load_experiment(config_file))
    assert experiment.lambdas() == [0.0, 0.5, 1.0]
    with pytest.raises(ConfigError, match="stride"):
        experiment.lambdas(0)
    with pytest.raises(ConfigError, match="stride"):
        experiment.planned_evaluations(MethodName.DDPG, lambda_stride=0)
    with pytest.raises(ConfigError, match="stride"):
        experiment.lambda_stride(-0.5)


def test_bad_grid_exits_2(config_file, tmp_path):
    """Test a grid that is not a whole number of cells exits with the configuration code."""
    text = config_file.read_text(encoding="utf-8")
    broken = tmp_path / "grid.toml"
    broken.write_text(text.replace("width_m = 400.0", "width_m = 405.0"), encoding="utf-8")
    result = _invoke("gen-env", "--config", str(broken))
    assert result.exit_code == EXIT_CONFIG
    assert not (tmp_path / "runs" / "environment.json").exists()


def test_report_rejects_out_of_range_history(small_tensor, thresholds, tmp_path):
    """Test a history with an impossible downtilt fails the whole report."""
    records = random_search(small_tensor, thresholds, 6, seed=2)
    good, bad = tmp_path / "random_history.csv", tmp_path / "bo_history.csv"
    write_history(good, records, "random", (1.05, 1.05))
    write_history(bad, records, "bo", (1.05, 1.05))
    frame = pd.read_csv(bad, dtype=str, keep_default_na=False)
    frame.loc[1, "tilt_1"] = "11"
    frame.to_csv(bad, index=False)

    result = _invoke("report", str(good), str(bad), "--out", str(tmp_path / "report"))
    assert result.exit_code == EXIT_CONFIG
    result = _invoke("report", str(bad), "--out", str(tmp_path / "report"))
    assert result.exit_code == EXIT_CONFIG
    assert not (tmp_path / "report" / "comparison.json").exists()


def test_missing_tensor_uses_environment_seed(config_file, tmp_path):
    """Test a run without a tensor file follows the seed gen-env was given."""
    assert _invoke("gen-env", "--config", str(config_file), "--seed", "3").exit_code == EXIT_OK
    experiment = ExperimentRunner(load_experiment(config_file))
    assert not experiment.output.tensor_path.exists()
    assert experiment.load_tensor().seed == 3

    result = _invoke("run", "--method", "random", "--config", str(config_file), "--budget", "2")
    assert result.exit_code == EXIT_OK, result.output
