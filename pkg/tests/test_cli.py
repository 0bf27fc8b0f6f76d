import json

from hybrid_precode.bench import RAW_HEADER, read_csv
from hybrid_precode.cli import main


def test_cli_desk_run(tmp_path):
    out, agg, plot = tmp_path / "r.csv", tmp_path / "a.csv", tmp_path / "p.svg"
    code = main(["--profile", "desk", "--trials", "2", "--seed", "5",
                 "--algorithms", "dg_hp,svd_bound", "--out", str(out), "--agg", str(agg),
                 "--plot", str(plot)])
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 2 * 5 * 2
    assert {r.algorithm for r in rows} == {"dg_hp", "svd_bound"}
    assert len(read_csv(agg)) == 10
    assert plot.read_text().count("<polyline") == 2


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"trials": 1, "snr_db": [0.0], "n_rf": 2, "n_s": 1,
                               "channel": {"n_bs": 8, "n_ms": 4, "k_subcarriers": 8,
                                           "cp_length": 2},
                               "n_cb": 8, "algorithms": ["approx_gs_hp"]}))
    out = tmp_path / "r.csv"
    assert main(["--config", str(cfg), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(RAW_HEADER)
    assert len(lines) == 2


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n_s": 5, "n_rf": 2}))
    assert main(["--config", str(bad), "--out", str(tmp_path / "x.csv")]) == 2
    assert main(["--config", str(tmp_path / "missing.json")]) == 2
    big = tmp_path / "big.json"
    big.write_text(json.dumps({"n_cb": 64, "n_rf": 6, "channel": {"n_bs": 64, "n_ms": 16},
                               "algorithms": ["exhaustive_hp"]}))
    assert main(["--profile", "desk", "--config", str(big)]) == 3
    assert "exceeds" in capsys.readouterr().err


def test_cli_thread_env(tmp_path, monkeypatch):
    monkeypatch.setenv("HYBRID_PRECODE_THREADS", "2")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["--profile", "desk", "--trials", "3", "--algorithms", "gs_hp"]
    assert main(args + ["--out", str(out1)]) == 0
    monkeypatch.setenv("HYBRID_PRECODE_THREADS", "1")
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
