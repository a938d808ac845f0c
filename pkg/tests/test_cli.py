import json

import pytest

from stardiv import InfSupConfig, estimate_infsup
from stardiv.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_infsup_table_row(capsys):
    code, out, _ = run_cli(
        capsys,
        "infsup", "--mesh", "malkus", "--n", "5", "--degree", "1",
        "--omega", "5", "--eps", "1e-7",
    )
    assert code == 0
    # dense-oracle-verified eigenvalue for this mesh/space
    assert "4.084e-02" in out
    lines = [l for l in out.splitlines() if l.strip()]
    assert lines[0].split() == ["k", "N", "omega", "iterations", "lambda1", "restarts"]


def test_infsup_json_round_trip(capsys):
    code, out, _ = run_cli(
        capsys,
        "infsup", "--mesh", "malkus", "--n", "3", "--degree", "1",
        "--format", "json",
    )
    assert code == 0
    record = json.loads(out.strip().splitlines()[-1])
    assert record["experiment"] == "infsup"
    cfg_echo = record["config"]
    rerun = estimate_infsup(InfSupConfig(**cfg_echo))
    assert rerun.lambda1 == record["result"]["lambda1"]
    assert record["result"]["beta_upper"] == 2 * record["result"]["beta_lower"]
    assert record["trace"][0][0] == 0


def test_infsup_grid_flags(capsys):
    code, out, _ = run_cli(
        capsys,
        "infsup", "--mesh", "malkus", "--n", "2,3", "--degree", "1",
        "--omega", "10", "--eps", "1e-7",
    )
    assert code == 0
    rows = [l for l in out.splitlines() if l.strip() and not l.startswith("  k")]
    assert len(rows) == 2  # one row per N


def test_infsup_nonconvergence_exit_code(capsys):
    code, out, _ = run_cli(
        capsys,
        "infsup", "--mesh", "malkus", "--n", "5", "--degree", "1",
        "--eps", "1e-13", "--max-iters", "3",
    )
    assert code == 2


def test_elasticity_table(capsys):
    code, out, _ = run_cli(
        capsys,
        "elasticity", "--mesh", "type1", "--coarse-n", "2", "--refinements", "1",
        "--degree", "2", "--gamma", "0,100",
    )
    assert code == 0
    assert "k\\gamma" in out
    row = [l for l in out.splitlines() if l.strip().startswith("2")][0]
    counts = [int(tok) for tok in row.split()[1:]]
    assert len(counts) == 2
    assert counts[0] <= 15


def test_elasticity_json(capsys):
    code, out, _ = run_cli(
        capsys,
        "elasticity", "--mesh", "type1", "--coarse-n", "2", "--refinements", "1",
        "--degree", "2", "--gamma", "10", "--format", "json",
    )
    assert code == 0
    record = json.loads(out.strip())
    assert record["experiment"] == "elasticity"
    assert record["result"]["converged"] is True
    assert record["config"]["gamma"] == 10.0


def test_oracle_agreement(capsys):
    code, out, _ = run_cli(
        capsys,
        "oracle", "--mesh", "malkus", "--n", "2", "--degree", "1",
        "--format", "json",
    )
    assert code == 0
    record = json.loads(out.strip())
    res = record["result"]
    assert res["difference"] <= 1e-6 * res["lambda1_dense"]


def test_oracle_agreement_type1(capsys):
    code, out, _ = run_cli(
        capsys,
        "oracle", "--mesh", "type1", "--n", "2", "--degree", "2",
        "--eps", "1e-10", "--format", "json",
    )
    assert code == 0
    res = json.loads(out.strip())["result"]
    assert res["difference"] <= 1e-6 * res["lambda1_dense"]


def test_oracle_degenerate_flag(capsys):
    code, out, _ = run_cli(
        capsys,
        "oracle", "--mesh", "malkus", "--n", "2", "--degree", "1", "--degenerate",
    )
    assert code == 0
    assert "[1.000000, 1.000000]" in out


def test_oracle_refuses_large_problem(capsys):
    code, out, err = run_cli(
        capsys, "oracle", "--mesh", "type1", "--n", "40", "--degree", "2"
    )
    assert code == 1
    assert "refusing" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["infsup", "--mesh", "hexagons", "--n", "2", "--degree", "1"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["warp"])
    assert exc.value.code == 1


def test_table_output_deterministic(capsys):
    args = ["infsup", "--mesh", "malkus", "--n", "3", "--degree", "1"]
    code1 = main(args)
    out1 = capsys.readouterr().out
    code2 = main(args)
    out2 = capsys.readouterr().out
    assert code1 == code2 == 0
    assert out1 == out2


def test_console_script_entry_point():
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "stardiv.cli", "oracle", "--mesh", "malkus",
         "--n", "2", "--degree", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "dense=" in proc.stdout
