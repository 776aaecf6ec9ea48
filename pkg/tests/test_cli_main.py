import csv
import json

import pytest

from cutoff_duality.cli.main import RunConfig, build_parser, main
from cutoff_duality.registry.registry_global import reset_global_registry
from cutoff_duality.types.error_types import PreconditionError
from cutoff_duality.types.main import DualityReport
from cutoff_duality.utils.typing.custom_typing import DualityTrialRow

BSC_R0 = 0.2231435513142097


@pytest.fixture(autouse=True)
def reset_registry():
    yield
    reset_global_registry()


def read_rows(path):
    with path.open(newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def test_dmc_preset_writes_csv_and_json(tmp_path):
    out = tmp_path / "bsc.csv"
    code = main(["dmc", "--preset", "bsc:0.1", "--rho-grid", "0.5,1", "--out", str(out)])
    assert code == 0
    rows = read_rows(out)
    cutoff = [row for row in rows if row["quantity"] == "cutoff_rate"]
    assert len(cutoff) == 1
    assert float(cutoff[0]["value_nats"]) == pytest.approx(BSC_R0, abs=1e-6)
    assert [row["parameter"] for row in rows if row["quantity"] == "e0"] == ["0.5", "1"]
    mirror = json.loads(out.with_suffix(".json").read_text())
    assert mirror["cutoff_rate_nats"] == pytest.approx(BSC_R0, abs=1e-6)
    assert len(mirror["exponents"]) == 10, "Default rate grid should have ten rates"


def test_dmc_channel_file_to_stdout(tmp_path, capsys):
    path = tmp_path / "channel.json"
    path.write_text(json.dumps({"transition": [[1, 0], [0, 1]]}))
    code = main(["dmc", str(path), "--rho-grid", "1", "--rate-grid", "0.1,0.5"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "quantity,parameter,value_nats"
    assert "sphere_packing,0.5,inf" in lines


def test_dmc_json_format(capsys):
    code = main(["dmc", "--preset", "bec:0.5", "--rho-grid", "1", "--format", "json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["channel"]["transition"][0] == [0.5, 0.5, 0.0]


def test_dmc_rejects_invalid_channel_file(tmp_path, capsys):
    path = tmp_path / "channel.json"
    path.write_text(json.dumps({"transition": [[0.5, 0.5], [0.5, 0.47]]}))
    code = main(["dmc", str(path)])
    assert code == 2
    assert "row 1 sums to 0.97" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv, message",
    [
        (["dmc"], "a channel file or --preset is required"),
        (["dmc", "channel.json", "--preset", "bsc:0.1"], "not both"),
        (["dmc", "--preset", "erasure"], "unknown channel preset"),
        (["verify-duality", "--trials", "0"], "--trials must be at least 1"),
        (["ricean", "--delta", "0.01"], "--delta and --m1 must be given together"),
    ],
)
def test_usage_errors_exit_with_two(argv, message, capsys):
    assert main(argv) == 2
    assert message in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["dmc", "--bogus"],
        ["ricean", "--snr-grid", "2,1"],
        ["ricean", "--figure", "2"],
        ["sideinfo", "--log-level", "LOUD"],
    ],
)
def test_parser_errors_exit_with_two(argv):
    assert main(argv) == 2


def test_numerical_failure_exits_with_one(capsys):
    argv = [
        "ricean",
        "--snr-grid",
        "1e4",
        "--lower-method",
        "closed_form",
        "--delta",
        "0.01",
        "--m1",
        "1e4",
    ]
    assert main(argv) == 1
    assert "violate" in capsys.readouterr().err


def test_verify_duality_passes(tmp_path):
    out = tmp_path / "duality.json"
    argv = ["verify-duality", "--trials", "2", "--inputs", "2", "--outputs", "3"]
    code = main(argv + ["--format", "json", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["passed"] is True
    assert len(report["trials"]) == 2


def test_verify_duality_on_preset(capsys):
    assert main(["verify-duality", "--preset", "z:0.3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("trial,")
    assert len(lines) == 2


def test_ricean_figure_one(tmp_path):
    out = tmp_path / "figure1.csv"
    assert main(["ricean", "--figure", "1", "--d-grid", "0,1", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert [float(row["d"]) for row in rows] == [0.0, 1.0]
    assert float(rows[0]["gap_nats"]) == pytest.approx(0.260661, abs=1e-6)
    assert json.loads(out.with_suffix(".json").read_text())["figure"] == 1


def test_ricean_bracket(capsys):
    argv = ["ricean", "--snr-grid", "1e6,1e8", "--lower-method", "closed_form", "--format", "json"]
    assert main(argv) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["metadata"]["lower_bound_method"] == "closed_form"
    for row in payload["rows"]:
        assert row["lower_nats"] <= row["upper_nats"]


def test_sideinfo_figure_two(capsys):
    argv = ["sideinfo", "--figure", "2", "--eps2-grid", "0.5,1", "--format", "json"]
    assert main(argv) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert [row["eps2"] for row in rows] == [0.5, 1.0]
    assert rows[1]["gap_nats"] == pytest.approx(0.260661, abs=1e-6)


def test_run_config_from_namespace_keeps_defaults():
    args = build_parser().parse_args(["ricean", "--d", "2"])
    config = RunConfig.from_namespace(args)
    assert config.d == 2.0
    assert config.delta is None
    assert config.snr_grid[0] == pytest.approx(1e4)
    assert config.lower_method == "best"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"command": "dmc", "tol": 0.0},
        {"command": "dmc", "num_inputs": 0},
        {"command": "dmc", "figure": 1},
        {"command": "ricean", "figure": 2},
        {"command": "dmc", "rho_grid": [1.0, 0.5]},
    ],
)
def test_run_config_validation(kwargs):
    with pytest.raises(PreconditionError):
        RunConfig(**kwargs)


def test_verify_duality_failure_exits_with_one(monkeypatch, capsys):
    def failing_check(**kwargs):
        report = DualityReport(rho=kwargs["rho"], tolerance=kwargs["tolerance"])
        report.trials.append(
            DualityTrialRow(
                trial=0, primal_nats=0.5, dual_nats=0.6, gap=0.1, pointwise_min_slack=0.0
            )
        )
        return report

    monkeypatch.setattr("cutoff_duality.cli.main.verify_lagrange_duality", failing_check)
    assert main(["verify-duality", "--trials", "1"]) == 1
    captured = capsys.readouterr()
    assert "duality check failed: max gap 0.1" in captured.err
    assert captured.out.startswith("trial,primal_nats,dual_nats,gap,pointwise_min_slack")


def test_help_documents_exit_statuses(capsys):
    assert main(["--help"]) == 0
    assert "usage errors with status 2" in capsys.readouterr().out
