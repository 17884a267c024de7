import json
from importlib import resources

import jsonschema
import pytest

from covertq import cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def schema(name):
    ref = resources.files("covertq") / "schemas" / f"{name}.schema.json"
    return json.loads(ref.read_text())


RATES = ["--lambda-w", "0.3", "--lambda-b", "0.2", "--mu", "1"]


def test_simulate_writes_sequence(tmp_path, capsys):
    out = tmp_path / "seq.txt"
    code, _, err = run_cli(
        capsys, "simulate", *RATES, "--n", "1000", "--hyp", "h1",
        "--seed", "7", "--out", str(out),
    )
    assert code == 0
    line = out.read_text().strip()
    assert len(line) == 1000
    assert set(line) <= {"0", "1"}
    assert "busy_fraction" in err


def test_simulate_deterministic(tmp_path, capsys):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        run_cli(capsys, "simulate", *RATES, "--n", "500", "--hyp", "h1",
                "--seed", "7", "--out", str(out))
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_simulate_invalid_n_exits_2(capsys):
    code, _, err = run_cli(
        capsys, "simulate", *RATES, "--n", "0", "--hyp", "h0", "--seed", "1"
    )
    assert code == 2
    assert "n" in err


def test_simulate_invalid_rate_exits_2(capsys):
    code, _, err = run_cli(
        capsys, "simulate", "--lambda-w", "-1", "--lambda-b", "0", "--mu", "1",
        "--n", "10", "--hyp", "h0", "--seed", "1",
    )
    assert code == 2
    assert "lambda_w" in err


def test_simulate_without_seed_prints_one(capsys):
    code, out, err = run_cli(capsys, "simulate", *RATES, "--n", "10", "--hyp", "h0")
    assert code == 0
    assert "seed:" in err


def test_detect_all_zeros_decides_h0(tmp_path, capsys):
    seq = tmp_path / "zeros.txt"
    seq.write_text("0" * 50 + "\n")
    code, out, _ = run_cli(capsys, "detect", *RATES, str(seq))
    assert code == 0
    rec = json.loads(out)
    jsonschema.validate(rec, schema("llr_result"))
    assert rec["decision"] == "H0"
    assert rec["llr"] > 0


def test_detect_zero_lambda_b_gives_zero_llr(tmp_path, capsys):
    seq = tmp_path / "seq.txt"
    seq.write_text("0110\n")
    code, out, _ = run_cli(
        capsys, "detect", "--lambda-w", "0.3", "--lambda-b", "0", "--mu", "1", str(seq)
    )
    assert code == 0
    rec = json.loads(out)
    assert rec["llr"] == 0.0
    assert rec["decision"] == "H0"


def test_detect_empty_file_exits_3(tmp_path, capsys):
    seq = tmp_path / "empty.txt"
    seq.write_text("")
    code, _, err = run_cli(capsys, "detect", *RATES, str(seq))
    assert code == 3


def test_detect_missing_file_exits_3(capsys):
    code, _, _ = run_cli(capsys, "detect", *RATES, "/nonexistent/seq.txt")
    assert code == 3


def test_exponent_json_schema_and_self_check(capsys):
    code, out, _ = run_cli(capsys, "exponent", *RATES, "--self-check")
    assert code == 0
    rec = json.loads(out)
    jsonschema.validate(rec, schema("exponent_report"))
    assert rec["v_closed"] == pytest.approx(0.490653, abs=1e-6)


def test_exponent_csv(capsys):
    code, out, _ = run_cli(capsys, "exponent", *RATES, "--output", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.startswith("lambda_w,lambda_b,mu,v,")
    assert len(row.split(",")) == 7


def test_bound_single_value(capsys):
    code, out, _ = run_cli(
        capsys, "bound", "--lambda-w", "0.3", "--epsilon", "0.1", "--n", "1000"
    )
    assert code == 0
    rec = json.loads(out)
    jsonschema.validate(rec, schema("bound"))
    assert rec["bound"] == pytest.approx(0.020672, abs=1e-6)
    assert rec["feasible"]


def test_bound_table_json_and_csv(capsys):
    args = ["bound", "--lambda-w", "0.3", "--epsilon", "0.1",
            "--n-values", "100,400,1600"]
    code, out, _ = run_cli(capsys, *args)
    assert code == 0
    rows = json.loads(out)
    jsonschema.validate(rows, schema("bound"))
    assert len(rows) == 3
    code, out, _ = run_cli(capsys, *args, "--output", "csv")
    assert code == 0
    assert out.splitlines()[0] == "N,K_of_N,bound,bound_times_sqrtN"


def test_bound_requires_n_or_table(capsys):
    code, _, _ = run_cli(capsys, "bound", "--lambda-w", "0.3", "--epsilon", "0.1")
    assert code == 3


def test_sweep_json_schema(capsys):
    code, out, _ = run_cli(
        capsys, "sweep", *RATES, "--n", "50", "--thresholds=-1,0,1"
    )
    assert code == 0
    rows = json.loads(out)
    jsonschema.validate(rows, schema("sweep"))
    assert [r["gamma"] for r in rows] == [-1.0, 0.0, 1.0]


def test_campaign_end_to_end(tmp_path, capsys):
    cfg = tmp_path / "campaign.cfg"
    cfg.write_text(
        "lambda_w = 0.3\nlambda_b = 0.2\nmu = 1\n"
        "n_grid = 100,200,300,400\ntrials_per_point = 1000\n"
        "master_seed = 42\n"
    )
    stem = tmp_path / "result"
    code, out, _ = run_cli(capsys, "campaign", str(cfg), "--out", str(stem))
    assert code == 0
    doc = json.loads((tmp_path / "result.json").read_text())
    jsonschema.validate(doc, schema("campaign_result"))
    csv_lines = (tmp_path / "result.csv").read_text().splitlines()
    assert csv_lines[0] == "n,p_f,p_m,p_e,se_f,se_m,trials"
    assert len(csv_lines) == 5


def test_campaign_missing_key_exits_3(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("lambda_w = 0.3\nlambda_b = 0.2\n")
    code, _, err = run_cli(capsys, "campaign", str(cfg), "--out", str(tmp_path / "r"))
    assert code == 3
    assert "n_grid" in err


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2
