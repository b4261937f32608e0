import csv
import hashlib
import json

import numpy as np
import pytest

from ridgenet.cli import main


def read_manifest(out):
    return json.loads((out / "manifest.json").read_text())


def run(tmp_path, *argv, name="run"):
    out = tmp_path / name
    code = main([f"--out={out}", *argv])
    return code, out, read_manifest(out)


class TestLatticeReconstruct:
    def test_produces_curve_and_manifest(self, tmp_path):
        code, out, manifest = run(tmp_path, "lattice-reconstruct",
                                  "--target=sin", "--points=20")
        assert code == 0
        assert manifest["status"] == "ok"
        with open(out / "reconstruction.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 20
        mid = rows[10]
        assert float(mid["f_reconstructed"]) == pytest.approx(
            float(mid["f_true"]), abs=0.2)

    def test_manifest_digests_match_files(self, tmp_path):
        code, out, manifest = run(tmp_path, "lattice-reconstruct", "--points=5")
        assert code == 0
        for path, digest in manifest["outputs"].items():
            actual = hashlib.sha256(open(path, "rb").read()).hexdigest()
            assert actual == digest


class TestSampleFit:
    def test_runs_and_is_reproducible(self, tmp_path):
        args = ("--seed=7", "sample-fit", "--algorithm=3")
        code1, out1, m1 = run(tmp_path, *args, name="a")
        code2, out2, m2 = run(tmp_path, *args, name="b")
        assert code1 == code2 == 0
        assert ((out1 / "fit.csv").read_bytes() == (out2 / "fit.csv").read_bytes())
        assert ((out1 / "hidden_params.csv").read_bytes()
                == (out2 / "hidden_params.csv").read_bytes())

    def test_config_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"J": 50}))
        code, out, manifest = run(tmp_path, f"--config={cfg}",
                                  "sample-fit", "--algorithm=1")
        assert code == 0
        assert manifest["config"]["J"] == 50
        n_rows = len((out / "hidden_params.csv").read_text().splitlines())
        assert n_rows == 51  # header + J

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"gamma": 1}))
        code, out, manifest = run(tmp_path, f"--config={cfg}",
                                  "sample-fit", "--algorithm=1")
        assert code == 2
        assert manifest["status"] == "error"
        assert manifest["error"]["category"] == "config"


class TestIsReconstruct:
    def test_sin_quality(self, tmp_path):
        code, out, manifest = run(tmp_path, "is-reconstruct", "--target=sin")
        assert code == 0
        with open(out / "is_reconstruction.csv") as fh:
            rows = list(csv.DictReader(fh))
        xs = np.array([float(r["x"]) for r in rows])
        pred = np.array([float(r["prediction"]) for r in rows])
        assert np.corrcoef(pred, np.sin(xs))[0, 1] > 0.85


class TestTrainCompare:
    def test_tsc_short_run(self, tmp_path):
        code, out, manifest = run(tmp_path, "train-compare", "--task=tsc",
                                  "--init=alg3", "--runs=2", "--steps=20")
        assert code == 0
        with open(out / "history.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert int(rows[0]["step"]) == 0 and int(rows[-1]["step"]) == 20
        assert float(rows[0]["metric_train_mean"]) < 1.0

    def test_missing_mnist_dir_is_data_error(self, tmp_path):
        code, out, manifest = run(tmp_path, "train-compare", "--task=mnist",
                                  "--init=random", "--steps=1",
                                  f"--mnist-dir={tmp_path / 'nowhere'}")
        assert code == 3
        assert manifest["error"]["category"] == "data"

    def test_mnist_env_dir(self, tmp_path, monkeypatch):
        data = tmp_path / "data"
        assert main([f"--out={tmp_path / 'mk'}", "make-data",
                     f"--data-dir={data}", "--n-train=60", "--n-test=20"]) == 0
        monkeypatch.setenv("RIDGENET_DATA_DIR", str(data))
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"J": 20}))
        code, out, manifest = run(tmp_path, f"--config={cfg}", "train-compare",
                                  "--task=mnist", "--init=alg2", "--steps=4")
        assert code == 0
        with open(out / "history.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert 0.0 <= float(rows[0]["metric_test_mean"]) <= 1.0


class TestCheck:
    def test_all_pass(self, tmp_path, capsys):
        code, out, manifest = run(tmp_path, "check")
        assert code == 0
        report = (out / "check_report.txt").read_text()
        assert "FAIL" not in report
        assert "admissibility_K_near_1" in report
        assert "gradient_check" in report


class TestMakeData:
    def test_writes_four_idx_files(self, tmp_path):
        code, out, manifest = run(tmp_path, "make-data",
                                  "--n-train=30", "--n-test=10")
        assert code == 0
        names = {p.split("/")[-1] for p in manifest["outputs"]}
        assert names == {"train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                         "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"}
