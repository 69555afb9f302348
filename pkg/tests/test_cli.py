import csv
import io
import json
from dataclasses import replace

import pytest

from ciag import cli
from ciag.equilibrium import InsurerStrategy
from ciag.report import COLUMNS, COMPARISON_COLUMNS, ERROR_COLUMN

PRESET = ["--preset", "paper-default"]


def run(argv, capsys):
    code = cli.run_command(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_pbe2_json(capsys):
    code, out, _ = run(["solve", *PRESET, "--set", "prior=0.995", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["region"] == "PBE2"
    assert doc["ins_strategy"] == {"audit_prob_given_cd": 0.0, "audit_prob_given_nc": 0.0}
    assert doc["beliefs"] == {"mu": 0.995, "lambda": None}
    assert doc["phi_star"] == pytest.approx(0.9705882352941176)


def test_solve_human_and_csv(capsys):
    code, out, _ = run(["solve", *PRESET, "--set", "discount_pct=25", "--set", "audit_cost=100000",
                        "--set", "prior=0.3"], capsys)
    assert code == 0
    assert "PBE3_Mixed" in out and "theta" in out and "off path" not in out
    code, out, _ = run(["solve", *PRESET, "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["region"] == "PBE3_Mixed"
    assert float(rows[0]["delta"]) == pytest.approx(1 / 17, rel=1e-11)


def test_scenario_file(tmp_path, capsys):
    path = tmp_path / "s.txt"
    path.write_text("loss: 4000\naudit_cost: 5000\n", encoding="utf-8")
    code, out, _ = run(["solve", *PRESET, "--scenario", str(path)], capsys)
    assert code == 0 and "PBE1" in out


def test_verify_pbe1_passes(capsys):
    code, out, _ = run(["verify", *PRESET, "--set", "loss=4000"], capsys)
    assert code == 0
    assert out.rstrip().endswith("PASS")
    assert "FAIL" not in out


def test_verify_mixed_passes(capsys):
    code, out, _ = run(["verify", *PRESET, "--set", "discount_pct=25", "--set", "audit_cost=100000",
                        "--set", "prior=0.3"], capsys)
    assert code == 0
    assert "indifference residual, insurer" in out and "INFO" in out


def test_verify_failure_exit_code(monkeypatch, capsys):
    real = cli.solve_pbe

    def wrong(params, u):
        sol = real(params, u)
        return replace(sol, ins_strategy=InsurerStrategy(1.0, 1.0))

    monkeypatch.setattr(cli, "solve_pbe", wrong)
    code, out, _ = run(["verify", *PRESET], capsys)
    assert code == 3
    assert "FAIL" in out


@pytest.mark.parametrize("argv, code", [
    ([], 1),
    (["explode"], 1),
    (["solve"], 1),
    (["solve", *PRESET, "--set", "colour=blue"], 1),
    (["solve", *PRESET, "--set", "nokey"], 1),
    (["solve", "--scenario", "/nonexistent/file"], 1),
    (["sweep", *PRESET, "--axis", "audit-cost"], 1),
    (["sweep", *PRESET, "--axis", "colour", "--values", "1,2"], 1),
    (["sweep", *PRESET, "--axis", "loss", "--values", "x..y"], 1),
    (["solve", *PRESET, "--set", "wealth=1000"], 2),
    (["simulate", *PRESET, "--reps", "0"], 2),
    (["solve", *PRESET, "--set", "breach_prob=0.001", "--set", "breach_prob_invested=0", "--set", "discount_pct=25"], 2),
])
def test_exit_codes(argv, code, capsys):
    assert run(argv, capsys)[0] == code


def _read(path):
    raw = path.read_bytes()
    assert b"\r" not in raw
    return list(csv.DictReader(io.StringIO(raw.decode("utf-8"))))


def test_simulate_csv_round_trip(tmp_path, capsys):
    from ciag.montecarlo import SimulationConfig, run_simulation
    from ciag.game import calibrated_defaults

    out = tmp_path / "sim.csv"
    code, _, _ = run(["simulate", *PRESET, "--seed", "5", "--reps", "3000", "--out", str(out)], capsys)
    assert code == 0
    rows = _read(out)
    assert tuple(rows[0].keys()) == COLUMNS
    assert len(rows) == 7
    summary = run_simulation(SimulationConfig(calibrated_defaults(), repetitions=3000, master_seed=5))
    for row in rows:
        r = summary.results[cli.report.StrategyModel(row["model"])]
        assert float(row["mean_insurer_payoff"]) == r.mean_insurer_payoff
        assert float(row["std_error"]) == r.std_error
        assert int(row["claims"]) == r.claims and int(row["denials"]) == r.denials
        assert float(row["theta"]) == float(format(summary.solution.theta, ".12g"))
        assert row["axis_value"] == ""


def test_sweep_csv_and_comparison(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, _, _ = run(["sweep", *PRESET, "--set", "discount_pct=25", "--axis", "audit-cost",
                      "--values", "5000..100000:3", "--reps", "1000", "--out", str(out)], capsys)
    assert code == 0
    rows = _read(out)
    assert tuple(rows[0].keys()) == COLUMNS + (ERROR_COLUMN,)
    assert len(rows) == 21
    assert [r["axis_value"] for r in rows[::7]] == ["5000", "52500", "100000"]
    assert [r["pbe_region"] for r in rows[::7]] == ["PBE3_Mixed", "PBE3_Mixed", "PBE2"]
    comp = _read(tmp_path / "sweep_gt_vs_never.csv")
    assert tuple(comp[0].keys()) == COMPARISON_COLUMNS
    for r in comp:
        assert float(r["difference_premiums"]) == pytest.approx(float(r["difference"]) / 3630, rel=1e-11)


def test_sweep_discount_percent_axis(capsys):
    code, out, _ = run(["sweep", *PRESET, "--axis", "discount-pct", "--values", "0,25", "--reps", "200"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["axis_value"] for r in rows[::7]] == ["0", "907.5"]


def test_sweep_error_rows(capsys):
    code, out, _ = run(["sweep", *PRESET, "--set", "breach_prob=0.001", "--set", "breach_prob_invested=0",
                        "--set", "discount_pct=25", "--axis", "prior", "--values", "0.3,0.99", "--reps", "100"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["error"].startswith("DeterrenceInfeasible") and rows[0]["mean_insurer_payoff"] == ""
    assert rows[0]["pbe_region"] == "PBE3_Mixed"
    assert rows[7]["error"] == "" and rows[7]["pbe_region"] == "PBE2"


def test_main_exits_with_code():
    with pytest.raises(SystemExit) as info:
        cli.main(["solve", *PRESET, "--set", "wealth=1000"])
    assert info.value.code == 2
