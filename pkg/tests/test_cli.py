import json
import subprocess
import sys

import pytest

from cbos.cli import main
from cbos.dataset import load_csv, make_blobs, profile, write_csv


@pytest.fixture
def csv_path(tmp_path):
    d = make_blobs(60, 12, 3, 2, 1.0, seed=4)
    d = d.replace(label_position=0)
    p = tmp_path / "data.csv"
    write_csv(d, p)
    return p


@pytest.mark.parametrize("method", ["cbos", "smote", "adasyn", "random", "smote-enn", "none"])
def test_resample_appends_rows(tmp_path, csv_path, method, capsys):
    out = tmp_path / "out.csv"
    code = main(["resample", "--input", str(csv_path), "--label-col", "label", "--method", method,
                 "--seed", "3", "--output", str(out), "--k-neighbors", "3", "--clusters", "2"])
    assert code == 0
    assert out.read_text().splitlines()[0] == csv_path.read_text().splitlines()[0]
    before, after = load_csv(csv_path, "label"), load_csv(out, "label", minority_label="minority")
    if method != "smote-enn":
        assert after.features[: len(before)].tobytes() == before.features.tobytes()
    if method in ("cbos", "smote", "random"):
        assert abs(profile(after).k_minority - 60) <= 12 / 2 + 1


def test_resample_cbos_flags(tmp_path, csv_path):
    out = tmp_path / "o.csv"
    args = ["resample", "--input", str(csv_path), "--label-col", "label", "--method", "cbos", "--eta", "0.5",
            "--random-lo", "0.2", "--random-hi", "0.4", "--weight-mode", "inverse", "--noise-mode", "per_sample",
            "--output", str(out)]
    assert main(args) == 0
    assert profile(load_csv(out, "label", "minority")).k_minority == pytest.approx(12 + 24, abs=7)


def test_induce(tmp_path, csv_path, capsys):
    out = tmp_path / "ind.csv"
    assert main(["induce", "--input", str(csv_path), "--label-col", "label", "--rate", "0.1",
                 "--output", str(out)]) == 0
    prof = profile(load_csv(out, "label"))
    assert (prof.k_majority, prof.k_minority) == (60, 6)


def test_induce_data_error(tmp_path, csv_path, capsys):
    code = main(["induce", "--input", str(csv_path), "--label-col", "label", "--rate", "0.4",
                 "--output", str(tmp_path / "x.csv")])
    assert code == 2
    assert "already below target" in capsys.readouterr().err


def test_eval_json(csv_path, capsys):
    assert main(["eval", "--train", str(csv_path), "--test", str(csv_path), "--label-col", "label",
                 "--epochs", "100", "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out["metrics"]) >= {"precision", "recall", "accuracy", "f_score", "g_mean"}
    assert sum(out["confusion"].values()) == 72


def test_bench_config_file_is_deterministic(tmp_path, capsys):
    cfg = {"data": {"blobs": {"n_majority": 80, "n_minority": 10, "dims": 3}},
           "methods": [{"name": "cbos"}, {"name": "smote", "k_neighbors": 3}],
           "runs": 2, "classifier": {"epochs": 100}}
    cfg_path = tmp_path / "exp.json"
    cfg_path.write_text(json.dumps(cfg))
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        assert main(["bench", "--config", str(cfg_path), "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert "G-Mean" in capsys.readouterr().out


def test_bench_inline_csv_format(csv_path, capsys):
    assert main(["bench", "--input", str(csv_path), "--label-col", "label", "--methods", "cbos,random",
                 "--runs", "1", "--epochs", "50", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1 + 3 * 5


def exit_code(argv):
    try:
        return main(argv)
    except SystemExit as exc:  # argparse usage errors
        return exc.code


@pytest.mark.parametrize("argv, code", [
    (["bench", "--methods", "tomek"], 1),
    (["bench", "--bogus"], 1),
    (["resample"], 1),
    (["bench", "--config", "/nonexistent.json"], 1),
    (["eval", "--train", "/nonexistent.csv", "--test", "/nonexistent.csv", "--label-col", "y"], 2),
])
def test_exit_codes(argv, code, capsys):
    assert exit_code(argv) == code


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cbos.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "bench" in proc.stdout
