import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from ddrom.cli import main


def read_csv(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    assert lines[0].startswith("# config-hash: ")
    rows = list(csv.reader(lines[1:]))
    return lines[0], rows[0], rows[1:]


def column(rows, header, name, cast=float):
    i = header.index(name)
    return [cast(r[i]) for r in rows]


def test_simulate_and_recover_roundtrip(tmp_path):
    out = tmp_path / "a"
    rc = main(["simulate", "--system", "scalar(a=0.5)", "--length", "60", "--out", str(out), "--prefix", "tr"])
    assert rc == 0
    assert (out / "tr_u.csv").exists() and (out / "tr_y.csv").exists()

    rc = main([
        "recover", "--data-u", str(out / "tr_u.csv"), "--data-y", str(out / "tr_y.csv"),
        "--nhat", "4", "--sigma", "2+0j", "--out", str(out),
    ])
    assert rc == 0
    _, header, rows = read_csv(out / "recover.csv")
    m0 = complex(float(rows[0][2]), float(rows[0][3]))
    assert abs(m0 - 2 / 3) < 1e-9
    assert header[:2] == ["sigma_re", "sigma_im"]


def test_recover_exit_code_on_noninformative_data(tmp_path):
    rc = main([
        "recover", "--system", "scalar(a=0.5)", "--length", "50", "--input", "zero",
        "--nhat", "4", "--sigma", "2+0j", "--out", str(tmp_path),
    ])
    assert rc == 2


def test_byte_identical_reruns(tmp_path):
    args = ["recover", "--system", "random(n=12,radius=0.8)", "--length", "200",
            "--nhat", "24", "--sigma", "1.5+0.5j", "--sigma", "2+0j", "--seed", "5"]
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert (out1 / "recover.csv").read_bytes() == (out2 / "recover.csv").read_bytes()


def test_tfirka_outputs_and_nonconvergence_exit(tmp_path):
    out = tmp_path / "tf"
    rc = main(["tfirka", "--system", "random(n=20,radius=0.8)", "--order", "4", "--out", str(out)])
    assert rc == 0
    assert (out / "rom.json").exists()
    report = json.loads((out / "report.json").read_text())
    assert report["converged"] is True
    assert len(report["point_history"]) == report["iterations"] + 1
    _, header, rows = read_csv(out / "report_summary.csv")
    assert header == ["iteration", "max_move", "max_residual", "max_kappa"]
    assert len(rows) == report["iterations"]

    rc = main(["tfirka", "--system", "random(n=30,radius=0.9)", "--order", "4",
               "--max-iterations", "2", "--tol", "1e-14", "--out", str(out)])
    assert rc == 3


def test_tdirka_end_to_end(tmp_path):
    out = tmp_path / "td"
    rc = main(["tdirka", "--system", "random(n=20,radius=0.8)", "--length", "400",
               "--nhat", "40", "--order", "4", "--out", str(out)])
    assert rc == 0
    rom = json.loads((out / "rom.json").read_text())
    assert rom["is_real"] is True
    assert len(rom["b"]) == 4


def test_cond_vs_radius_trends(tmp_path):
    rc = main(["cond-vs-radius", "--out", str(tmp_path), "--seed", "0"])
    assert rc == 0
    _, header, rows = read_csv(tmp_path / "cond_vs_radius.csv")
    assert header == ["d", "kappa_unscaled", "kappa_scaled"]
    ku = column(rows, header, "kappa_unscaled")
    ks = column(rows, header, "kappa_scaled")
    assert all(b >= a * 0.99 for a, b in zip(ku, ku[1:]))  # nondecreasing, 1% slack
    assert all(s <= u for s, u in zip(ks, ku))
    assert ks[-1] < ks[0]


def test_error_vs_nhat_threshold_crossing(tmp_path):
    rc = main(["error-vs-nhat", "--out", str(tmp_path), "--seed", "0"])
    assert rc == 0
    _, header, rows = read_csv(tmp_path / "error_vs_nhat.csv")
    assert header == ["nhat", "kappa", "rel_error_modulus1", "rel_error_modulusd"]
    nhat = column(rows, header, "nhat", int)
    e1 = column(rows, header, "rel_error_modulus1")
    ed = column(rows, header, "rel_error_modulusd")

    def first_reach(values):
        for h, v in zip(nhat, values):
            if np.isfinite(v) and v <= 1e-6:
                return h
        return None

    # recovery off the circle reaches accuracy at a smaller working order
    assert first_reach(ed) is not None
    assert first_reach(e1) is None or first_reach(ed) < first_reach(e1)
    # doubling the working order does not hurt (paired at n and 2n)
    by_nhat = dict(zip(nhat, ed))
    assert by_nhat[80] <= by_nhat[40]


def test_error_vs_nhat_random_benchmark(tmp_path):
    rc = main(["error-vs-nhat", "--benchmark", "random", "--n", "24", "--length", "600",
               "--nhat-max-power", "7", "--sigma-count", "15", "--out", str(tmp_path), "--seed", "0"])
    assert rc == 0
    _, header, rows = read_csv(tmp_path / "error_vs_nhat.csv")
    nhat = column(rows, header, "nhat", int)
    e1 = dict(zip(nhat, column(rows, header, "rel_error_modulus1")))
    assert e1[48] <= e1[24]  # working order n vs 2n


def test_h2_convergence_small(tmp_path):
    rc = main(["h2-convergence", "--benchmark", "random", "--n", "30", "--length", "600",
               "--nhat", "60", "--r-min", "2", "--r-max", "6", "--r-step", "2",
               "--quad-tol", "1e-8", "--out", str(tmp_path)])
    assert rc == 0
    _, header, rows = read_csv(tmp_path / "h2_convergence.csv")
    assert header == ["r", "err_tf", "err_td", "iters_tf", "iters_td"]
    err_tf = column(rows, header, "err_tf")
    err_td = column(rows, header, "err_td")
    assert all(np.isfinite(err_tf)) and all(np.isfinite(err_td))
    assert err_tf[-1] < err_tf[0] and err_td[-1] < err_td[0]


def test_heat_trajectory_zero_test_input(tmp_path):
    rc = main(["heat-trajectory", "--n", "40", "--nhat", "80", "--duration", "2",
               "--test-amplitude", "0", "--out", str(tmp_path)])
    assert rc == 0
    _, header, rows = read_csv(tmp_path / "heat_trajectory.csv")
    assert header == ["k", "y_test", "y_td", "abs_error"]
    assert max(abs(v) for v in column(rows, header, "y_test")) == 0.0
    assert max(abs(v) for v in column(rows, header, "y_td")) == 0.0
    sidecar = json.loads((tmp_path / "heat_trajectory.json").read_text())
    assert sidecar["train_input"] != sidecar["test_input"]  # no leakage


def test_heat_trajectory_accuracy(tmp_path):
    rc = main(["heat-trajectory", "--n", "40", "--nhat", "80", "--duration", "2", "--out", str(tmp_path)])
    assert rc == 0
    sidecar = json.loads((tmp_path / "heat_trajectory.json").read_text())
    assert sidecar["max_abs_error"] < 1e-2


def test_config_file_merging(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"length": 80, "system": "scalar(a=0.5)"}))
    rc = main(["simulate", "--config", str(cfg), "--out", str(tmp_path), "--prefix", "cfgd"])
    assert rc == 0
    k_rows = (tmp_path / "cfgd_u.csv").read_text().splitlines()
    assert len(k_rows) == 2 + 81  # comment + header + samples

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"no_such_key": 1}))
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == 1


def test_unknown_system_spec_exit_code(tmp_path):
    assert main(["tfirka", "--system", "bogus(n=3)", "--order", "2", "--out", str(tmp_path)]) == 1


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ddrom.cli", "simulate", "--system", "scalar(a=0.5)",
         "--length", "30", "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "wrote" in proc.stdout
