import json
import os

import numpy as np
import pytest

from barrierchain._csvio import read_csv
from barrierchain.cli import ENV_OUTDIR, main


def run(argv, outdir, capsys, expect=0):
    old = os.environ.get(ENV_OUTDIR)
    os.environ[ENV_OUTDIR] = str(outdir)
    try:
        code = main(argv)
    finally:
        if old is None:
            os.environ.pop(ENV_OUTDIR, None)
        else:
            os.environ[ENV_OUTDIR] = old
    captured = capsys.readouterr()
    assert code == expect, captured.err
    return captured


SPECTRUM = ["spectrum", "--n", "8", "--omega-min", "0", "--omega-max", "6", "--steps", "4"]


def test_reruns_are_byte_identical(tmp_path, capsys):
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir(), b.mkdir()
    run(SPECTRUM, a, capsys)
    run(SPECTRUM, b, capsys)
    assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()


def test_spectrum_columns_and_flip(tmp_path, capsys):
    run(SPECTRUM, tmp_path, capsys)
    cols, meta = read_csv(tmp_path / "spectrum.csv")
    assert list(cols) == ["omega", "k", "lambda", "lambda_flipped"]
    assert meta["experiment"] == "spectrum"
    lam = np.asarray(cols["lambda"][:8])
    flipped = np.asarray(cols["lambda_flipped"][:8])
    assert np.allclose(flipped, -lam[::-1])


def test_out_flag_overrides_default_name(tmp_path, capsys):
    target = tmp_path / "custom.csv"
    captured = run(SPECTRUM + ["--out", str(target)], tmp_path, capsys)
    assert target.exists()
    assert str(target) in captured.out


def test_threads_flag_never_changes_output(tmp_path, capsys):
    base = ["disorder", "--n", "8", "--omega-list", "10", "--b-list", "0,1",
            "--n-samples", "6", "--seed", "4", "--window-factor", "1.0"]
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir(), b.mkdir()
    run(base + ["--threads", "1"], a, capsys)
    run(base + ["--threads", "3"], b, capsys)
    assert (a / "disorder.csv").read_bytes() == (b / "disorder.csv").read_bytes()


def test_disorder_column_layout(tmp_path, capsys):
    run(["disorder", "--n", "8", "--omega-list", "10", "--b-list", "0,0.5",
         "--n-samples", "5", "--seed", "4", "--window-factor", "1.0"], tmp_path, capsys)
    cols, _ = read_csv(tmp_path / "disorder.csv")
    assert list(cols) == ["b", "omega", "mean", "stderr", "n_samples", "seed"]
    assert np.array_equal(cols["b"], [0.0, 0.5])
    assert cols["stderr"][0] <= 1e-12  # b = 0 ensemble is deterministic


def test_leakage_writes_one_file_per_length(tmp_path, capsys):
    captured = run(["leakage", "--n-list", "8,10", "--omega-min", "4", "--omega-max", "8",
                    "--steps", "2", "--n-samples", "5", "--seed", "4",
                    "--window-factor", "1.0"], tmp_path, capsys)
    assert len(captured.out.strip().splitlines()) == 2
    for n in (8, 10):
        cols, meta = read_csv(tmp_path / f"leakage_n{n}.csv")
        assert list(cols) == ["omega", "mean", "stderr", "n_samples", "seed"]
        assert int(meta["n"]) == n


def test_ebit_writes_one_file_per_omega_with_window(tmp_path, capsys):
    run(["ebit", "--n", "10", "--omega-list", "4,8", "--points", "16"], tmp_path, capsys)
    for omega in (4, 8):
        cols, meta = read_csv(tmp_path / f"ebit_omega{omega}.csv")
        assert list(cols) == ["t", "abs_p_Nm1", "abs_p_N", "concurrence"]
        assert float(meta["omega"]) == float(omega)
        assert float(meta["window_lo"]) == 0.0
        assert float(meta["window_hi"]) > 0.0
        assert len(cols["t"]) == 16
        c = np.asarray(cols["concurrence"])
        pn = np.asarray(cols["abs_p_N"])
        pm = np.asarray(cols["abs_p_Nm1"])
        assert np.allclose(c, 2.0 * pm * pn, atol=1e-12)


def test_transfer_and_maxfid_smoke(tmp_path, capsys):
    run(["transfer", "--n", "10", "--omega", "5", "--T", "40", "--points", "21"],
        tmp_path, capsys)
    cols, _ = read_csv(tmp_path / "transfer.csv")
    assert list(cols) == ["t", "abs_f", "avg_fidelity", "concurrence"]
    assert len(cols["t"]) == 21

    run(["maxfid", "--n-min", "6", "--n-max", "8", "--n-step", "2",
         "--omega-min", "0", "--omega-max", "10", "--omega-steps", "2", "--T", "60"],
        tmp_path, capsys)
    cols, _ = read_csv(tmp_path / "maxfid.csv")
    assert list(cols) == ["n", "omega", "t_star", "max_avg_fidelity"]
    assert np.array_equal(cols["n"], [6, 6, 8, 8])


def test_scaling_and_effective_smoke(tmp_path, capsys):
    run(["scaling", "--n-list", "8,9", "--omega-min", "5", "--omega-max", "20",
         "--steps", "3"], tmp_path, capsys)
    cols, _ = read_csv(tmp_path / "scaling.csv")
    assert list(cols) == ["n", "omega", "gap", "t_max"]
    assert np.allclose(np.asarray(cols["t_max"]), np.pi / np.asarray(cols["gap"]))

    run(["effective", "--n-min", "8", "--n-max", "10", "--n-step", "2",
         "--omega-list", "10"], tmp_path, capsys)
    cols, _ = read_csv(tmp_path / "effective.csv")
    assert list(cols) == ["n", "omega", "gap_exact", "gap_effective", "ratio"]


def test_ipr_tracks_four_states_per_omega(tmp_path, capsys):
    run(["ipr", "--n", "10", "--omega-min", "2", "--omega-max", "20", "--steps", "3"],
        tmp_path, capsys)
    cols, _ = read_csv(tmp_path / "ipr.csv")
    assert list(cols) == ["omega", "role", "k", "lambda", "ipr"]
    assert len(cols["omega"]) == 12
    assert set(cols["role"]) == {"barrier", "end"}
    assert all(v >= 1.0 for v in cols["ipr"])


def test_protocol_outputs_csv_and_json(tmp_path, capsys):
    captured = run(["protocol", "--n", "8", "--k1", "8", "--k2", "4", "--t1", "5",
                    "--window", "20"], tmp_path, capsys)
    paths = captured.out.strip().splitlines()
    assert paths[0].endswith("protocol.csv")
    assert paths[1].endswith("protocol.json")
    cols, meta = read_csv(tmp_path / "protocol.csv")
    assert list(cols) == ["t", "omega2", "omegaNm1", "abs_f", "avg_fidelity"]
    body = json.loads((tmp_path / "protocol.json").read_text())
    closed = 0.5 * np.pi * 16.0
    assert body["closed_form_interval"] == pytest.approx(closed)
    assert body["two_level_interval"] == pytest.approx(4.0 * closed)
    assert body["interval_used"] == pytest.approx(closed)
    assert body["optimized_interval"] is None
    assert 0.0 < body["final_avg_fidelity"] <= 1.0
    assert body["storage_drift"] >= 0.0
    assert body["t2"] == pytest.approx(5.0 + closed)
    assert body["config"]["experiment"] == "protocol"


def test_oracle_check_passes_and_fails(tmp_path, capsys):
    run(["oracle-check", "--n-min", "4", "--n-max", "5", "--pairs", "2"], tmp_path, capsys)
    body = json.loads((tmp_path / "oracle-check.json").read_text())
    assert body["pass"] is True
    assert body["checks"] == 4
    assert body["max_abs_error"] <= 1e-10

    captured = run(["oracle-check", "--n-min", "4", "--n-max", "4", "--pairs", "2",
                    "--tol", "1e-18", "--out", str(tmp_path / "strict.json")],
                   tmp_path, capsys, expect=1)
    error = json.loads(captured.err.strip().splitlines()[-1])
    assert error["error"] == "ValueError"
    # the report is still written so the failure can be inspected
    assert json.loads((tmp_path / "strict.json").read_text())["pass"] is False


def test_config_file_matches_flags(tmp_path, capsys):
    cfg = tmp_path / "spectrum.cfg"
    cfg.write_text(
        "experiment = spectrum\nn = 8\nomega-min = 0\nomega-max = 6\nsteps = 4\n"
    )
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir(), b.mkdir()
    run(SPECTRUM, a, capsys)
    run(["spectrum", "--config", str(cfg)], b, capsys)
    assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "spectrum.cfg"
    cfg.write_text("n = 8\nomega-min = 0\nomega-max = 6\nsteps = 4\n")
    run(["spectrum", "--config", str(cfg), "--steps", "3"], tmp_path, capsys)
    cols, _ = read_csv(tmp_path / "spectrum.csv")
    assert len(cols["omega"]) == 3 * 8


def test_config_big_t_alias(tmp_path, capsys):
    cfg = tmp_path / "transfer.cfg"
    cfg.write_text("experiment = transfer\nn = 8\nomega = 5\nT = 30\npoints = 7\n")
    run(["transfer", "--config", str(cfg)], tmp_path, capsys)
    cols, _ = read_csv(tmp_path / "transfer.csv")
    assert cols["t"][-1] == pytest.approx(30.0)


def test_config_experiment_mismatch_is_an_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("experiment = spectrum\nn = 8\n")
    captured = run(["ipr", "--config", str(cfg)], tmp_path, capsys, expect=1)
    assert "spectrum" in captured.err


def test_config_unknown_key_is_an_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("n = 8\nmystery = 1\n")
    captured = run(["spectrum", "--config", str(cfg)], tmp_path, capsys, expect=1)
    assert "mystery" in captured.err


def test_headers_do_not_leak_paths_or_threads(tmp_path, capsys):
    run(["disorder", "--n", "8", "--omega-list", "10", "--b-list", "0",
         "--n-samples", "2", "--seed", "4", "--window-factor", "1.0",
         "--threads", "2", "--out", str(tmp_path / "d.csv")], tmp_path, capsys)
    header = (tmp_path / "d.csv").read_text()
    assert "threads" not in header
    assert str(tmp_path) not in header


def test_errors_are_json_records(tmp_path, capsys):
    captured = run(["ipr", "--omega-min", "0"], tmp_path, capsys, expect=1)
    record = json.loads(captured.err.strip().splitlines()[-1])
    assert record["error"] == "ValueError"
    assert "--omega-min" in record["argv"] or "ipr" in record["argv"]
