import json

import pytest

from fmtpbd import cli, instance_io, solution as solmod
from fmtpbd.model import Params
from tiny import line_instance, one_customer


@pytest.fixture
def tiny_file(tmp_path):
    path = tmp_path / "one.json"
    instance_io.save(one_customer(), path)
    return path


def test_generate_and_validate(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert cli.run(["generate", "--stops", "2", "--buses", "2", "--customers", "4", "--seed", "3", "-o", str(out)]) == 0
    assert cli.run(["validate", str(out)]) == 0
    assert capsys.readouterr().out.strip().endswith("ok")


def test_validate_bad_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"terminal": [0, 0], "bogus": 1}))
    assert cli.run(["validate", str(bad)]) == 2


def test_missing_file():
    assert cli.run(["solve", "/nonexistent/x.json"]) == 2


def test_bad_arguments():
    assert cli.run(["solve"]) == 2
    assert cli.run(["--threads", "0", "validate", "x"]) == 2
    assert cli.run(["analyze", "sweep-costs", "x", "--bus-factors", "1,-2"]) == 2


@pytest.mark.parametrize("algo", cli.ALGOS)
def test_solve_writes_solution(tiny_file, tmp_path, capsys, algo):
    out = tmp_path / f"{algo}.sol.json"
    assert cli.run(["solve", str(tiny_file), "--algo", algo, "-o", str(out)]) == 0
    assert "total 66.000000" in capsys.readouterr().out
    assert solmod.load(out).total == pytest.approx(66.0)
    assert cli.run(["verify", str(tiny_file), str(out)]) == 0


def test_solve_logs(tiny_file, tmp_path):
    log, it = tmp_path / "run.csv", tmp_path / "it.csv"
    assert cli.run(["solve", str(tiny_file), "--log", str(log), "--iteration-log", str(it), "--no-warm-start", "--no-heuristics"]) == 0
    assert log.read_text().count("\n") >= 2
    assert it.read_text().count("\n") >= 2


def test_infeasible_exit(tmp_path):
    inst = line_instance([(4.0, 0.0, 5.0, 200.0)], params=Params(Q_B=2.0))
    path = tmp_path / "inf.json"
    instance_io.save(inst, path)
    assert cli.run(["solve", str(path)]) == 1


def test_time_limit_exit(tmp_path):
    path = tmp_path / "big.json"
    instance_io.save(instance_io.generate(instance_io.GeneratorConfig(seed=0)), path)
    assert cli.run(["solve", str(path), "--time-limit", "0.5"]) == 3


def test_verify_detects_tampering(tiny_file, tmp_path, capsys):
    out = tmp_path / "s.json"
    cli.run(["solve", str(tiny_file), "-o", str(out)])
    data = json.loads(out.read_text())
    data["cost"]["bus"] += 1.0
    out.write_text(json.dumps(data))
    capsys.readouterr()
    assert cli.run(["verify", str(tiny_file), str(out)]) == 1
    assert "CostIdentityRow" in capsys.readouterr().out


def test_export_milp(tiny_file, tmp_path):
    out = tmp_path / "m.lp"
    assert cli.run(["export-milp", str(tiny_file), "-o", str(out)]) == 0
    assert "Subject To" in out.read_text()


def test_analyze_emissions(tiny_file, capsys):
    assert cli.run(["analyze", "emissions", str(tiny_file), "--algo", "oracle"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "mode,bus_kg,drone_kg,truck_kg,total_kg"
    assert lines[1].startswith("bus_drone,") and lines[2].startswith("truck,")


def test_analyze_sweeps(tiny_file, tmp_path):
    out = tmp_path / "c.csv"
    assert cli.run(["analyze", "sweep-costs", str(tiny_file), "--bus-factors", "1,2", "--drone-factors", "1", "--algo", "oracle", "-o", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 3
    out2 = tmp_path / "l.csv"
    assert cli.run(["analyze", "sweep-lockers", str(tiny_file), "--subsets", "0", "--algo", "oracle", "-o", str(out2)]) == 0
    assert out2.read_text().splitlines()[1] == "0,1,66.000000"
    assert cli.run(["analyze", "sweep-lockers", str(tiny_file), "--subsets", "5"]) == 2
