import json
from pathlib import Path

import pytest

from cli import commands
from cli.main import main
from cli.problem import load_problem
from cli.report import Report, dumps, format_number, read_report, render_csv, write_report
from utils.errors import DomainError, ProblemFileError

ROOT = Path(__file__).resolve().parent.parent
PROBLEMS = ROOT / "problems"


def write_json(path: Path, data) -> str:
    path.write_text(json.dumps(data, indent=2), encoding="utf-8")
    return str(path)


@pytest.fixture
def lebesgue_model(tmp_path):
    return write_json(tmp_path / "model.json", {"weights": [1.0, 1.0], "structure": {"kind": "lebesgue", "p": 3}})


def test_conjugate_command(capsys):
    assert main(["conjugate", "--family", "power", "--p", "2", "--v", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["results"]["conjugate"] == pytest.approx(4.5)
    assert report["passed"]
    assert report["contracts"][0]["name"] == "power_closed_form"


def test_dualize_command(capsys, tmp_path, lebesgue_model):
    functional = write_json(tmp_path / "y.json", {"values": [2.0 ** (-2.0 / 3.0)] * 2})
    assert main(["dualize", "--model", lebesgue_model, "--functional", functional]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["results"]["point"]["values"] == pytest.approx([2.0 ** (-1.0 / 3.0)] * 2)
    assert report["residuals"]["duality"] <= 1e-7


def test_dualize_zero_functional_is_an_operation_error(tmp_path, lebesgue_model, caplog):
    functional = write_json(tmp_path / "y.json", {"functional": {"values": [0.0, 0.0]}})
    assert main(["dualize", "--model", lebesgue_model, "--functional", functional]) == 1
    assert "UndefinedDirectionError" in caplog.text


def test_zero_weight_is_a_schema_error(tmp_path, caplog):
    model = write_json(tmp_path / "model.json", {"weights": [1.0, 0.0]})
    assert main(["norm", "--model", model, "--input", model]) == 2
    assert "schema error" in caplog.text


def test_exponent_one_is_a_domain_error(tmp_path):
    path = write_json(tmp_path / "problem.json", {
        "model": {"weights": [1.0, 1.0], "structure": {"kind": "lebesgue", "p": 1}},
        "input": {"values": [1.0, 2.0]},
    })
    with pytest.raises(ProblemFileError, match="domain error"):
        load_problem(path)
    assert main(["norm", "--problem", path]) == 2


def test_invalid_json_reports_the_line(tmp_path, caplog):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "weights": [1.0, 2.0],\n  "structure": {"kind": }\n}\n', encoding="utf-8")
    with pytest.raises(ProblemFileError, match=r"broken\.json:3:"):
        load_problem(str(path))
    assert main(["norm", "--problem", str(path)]) == 2
    assert "broken.json:3:" in caplog.text


def test_unknown_section_is_located(tmp_path):
    path = write_json(tmp_path / "problem.json", {"model": {"weights": [1.0]}, "extras": {}})
    with pytest.raises(ProblemFileError, match=r"problem\.json:\d+: /extras"):
        load_problem(path)


def test_missing_input_is_an_input_error(tmp_path, lebesgue_model):
    assert main(["dualize", "--model", lebesgue_model]) == 2


def test_sample_problems_load():
    for path in sorted(PROBLEMS.glob("*.json")):
        problem = load_problem(str(path))
        assert problem.model is not None


def test_extend_problem(capsys):
    path = str(PROBLEMS / "lebesgue3_extend.json")
    assert main(["extend", "--problem", path, "--probe", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["results"]["functional"]["values"] == pytest.approx([2.0 ** (-2.0 / 3.0)] * 2 + [0.0], abs=1e-9)
    assert report["results"]["probe"]["violations"] == 0


def test_reports_are_byte_identical(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    args = ["mazur", "--p", "3", "--n", "5", "--seed", "7"]
    assert main(args + ["--out", str(first)]) == 0
    assert main(args + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    report = read_report(str(first))
    assert report["seed"] == 7
    assert report["arguments"]["params"]["p"] == 3.0


def test_verify_csv_has_one_row_per_trial(tmp_path):
    out = tmp_path / "verify.csv"
    assert main(["verify", "measure_space", "--n", "4", "--trials", "5", "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "module,check,model,trial,measured"
    assert len(lines) == 1 + 5


def test_verify_mazur_passes(capsys):
    assert main(["verify", "mazur", "--n", "4", "--trials", "3", "--seed", "1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert all(contract["name"].startswith("mazur.") for contract in report["contracts"])


def test_unwritable_destination(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("", encoding="utf-8")
    assert main(["conjugate", "--p", "2", "--v", "1", "--out", str(blocker / "report.json")]) == 2


def test_failed_contract_exits_with_three(monkeypatch, capsys):
    def failing(problem, report):
        report.check("always", 1.0, 0.0)

    monkeypatch.setitem(commands.COMMANDS, "conjugate", failing)
    assert main(["conjugate"]) == 3
    captured = capsys.readouterr()
    report = json.loads(captured.out)
    assert report["passed"] is False
    assert report["contracts"][0]["name"] == "always"
    assert "1 contract(s) failed" in captured.err


def test_csv_report_on_stdout_stays_parseable(monkeypatch, capsys):
    def failing(problem, report):
        report.check("always", 1.0, 0.0)

    monkeypatch.setitem(commands.COMMANDS, "conjugate", failing)
    assert main(["conjugate", "--format", "csv"]) == 3
    captured = capsys.readouterr()
    assert "WARNING" not in captured.out
    assert "WARNING" in captured.err


def test_number_formatting():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(float("nan")) == "NaN"
    assert format_number(float("-inf")) == "-Infinity"
    text = dumps({"values": [1.0, 2.5], "nested": [{"a": 1}], "flag": True})
    assert '"values": [1, 2.5]' in text
    assert json.loads(text) == {"values": [1.0, 2.5], "nested": [{"a": 1}], "flag": True}


def test_csv_without_rows_flattens_results():
    report = Report(command="norm", arguments={}, seed=0, results={"norm": 5.0, "point": {"values": [1.0, 2.0]}})
    report.check("unit", 0.0, 1e-9)
    lines = render_csv(report).splitlines()
    assert lines[0] == "field,value"
    assert "norm,5" in lines
    assert "point.values,1 2" in lines
    assert "contract.unit,0" in lines


def test_run_command_and_write_report(tmp_path):
    problem = load_problem(str(PROBLEMS / "lebesgue3_dualize.json"))
    report = commands.run_command("dualize", problem)
    assert report.passed
    out = tmp_path / "nested" / "dualize.json"
    write_report(report, "json", str(out))
    written = read_report(str(out))
    assert written["command"] == "dualize"
    assert written["seed"] == 1
    assert len(written["results"]["point"]["values"]) == 3
    assert out.read_text(encoding="utf-8") == dumps(report.to_json())


def test_unknown_command_and_format(tmp_path):
    problem = load_problem(str(PROBLEMS / "lebesgue3_dualize.json"))
    with pytest.raises(DomainError):
        commands.run_command("integrate-everything", problem)
    with pytest.raises(DomainError):
        write_report(Report(command="norm", arguments={}, seed=1), "yaml", str(tmp_path / "r.yaml"))
