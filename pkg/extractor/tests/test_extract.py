"""Extractor unit tests plus the two pipeline acceptance criteria.

Criteria 11 and 12 exercise the extractor end to end against the modeling
tool's command line (``eigengreedy``), which must be on PATH. All runs use
the offline fixed-seed backbone initialization so no checkpoint download is
needed.
"""

import csv
import json
import subprocess
import time

import pytest
import torch
from click.testing import CliRunner

from fvextract.backbone import load_backbone, pooled_activations
from fvextract.cli import main as cli_main
from fvextract.dataset import scan_category
from fvextract.extract import ExtractionJob

# channel counts of the nine backbone stages
STAGE_CHANNELS = [32, 16, 24, 40, 80, 112, 192, 320, 1280]


def run_primary(*args):
    return subprocess.run(
        ["eigengreedy", *args], capture_output=True, text=True
    )


def extract(root, out_dir, nodes, batch_size=4):
    result = CliRunner().invoke(cli_main, [
        "extract", "--root", str(root), "--category", "bottle",
        "--nodes", nodes, "--out", str(out_dir),
        "--batch-size", str(batch_size), "--weights", "none",
    ])
    assert result.exit_code == 0, result.output
    return result


class TestDatasetScan:
    def test_row_order_and_metadata(self, mini_dataset):
        splits = scan_category(mini_dataset, "bottle")
        assert [r.image_id for r in splits["train"]] == [
            f"train/good/00{i}.png" for i in range(4)
        ]
        # test rows sorted by (anomaly_type, filename)
        assert [r.anomaly_type for r in splits["test"]] == [
            "dent", "dent", "good", "good", "scratch", "scratch"
        ]
        assert all(r.label == "normal" for r in splits["train"])
        labels = [r.label for r in splits["test"]]
        assert labels == ["anomalous"] * 2 + ["normal"] * 2 + ["anomalous"] * 2

    def test_missing_directory(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="missing dataset"):
            scan_category(tmp_path, "bottle")


@pytest.fixture(scope="module")
def model():
    return load_backbone("none")


class TestBackbone:
    def test_pooling_shape_contract(self, model):
        batch = torch.zeros(2, 3, 224, 224)
        pooled = pooled_activations(
            model, batch, ["features.0", "features.2"]
        )
        assert pooled["features.0"].shape == (2, STAGE_CHANNELS[0])
        assert pooled["features.2"].shape == (2, STAGE_CHANNELS[2])

    def test_unknown_node_rejected(self, model):
        with pytest.raises(ValueError, match="unknown node"):
            pooled_activations(model, torch.zeros(1, 3, 224, 224),
                               ["features.9"])

    def test_job_validation(self, tmp_path):
        with pytest.raises(ValueError, match="unknown node"):
            ExtractionJob(tmp_path, "bottle", ("conv1",), tmp_path)
        with pytest.raises(ValueError, match="batch size"):
            ExtractionJob(tmp_path, "bottle", ("features.0",), tmp_path,
                          batch_size=0)


class TestCriterion11:
    """Extractor conformance on the 10-image miniature dataset."""

    def test_conformance(self, mini_dataset, tmp_path):
        start = time.perf_counter()
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        extract(mini_dataset, out_a, "features.0,features.1")
        extract(mini_dataset, out_b, "features.0,features.1")

        stems = sorted(p.stem for p in out_a.glob("*.fvs"))
        assert stems == [
            "bottle__features.0__test", "bottle__features.0__train",
            "bottle__features.1__test", "bottle__features.1__train",
        ]

        # every store passes the downstream format checker
        for stem in stems:
            check = run_primary("validate", "--store", str(out_a / stem))
            assert check.returncode == 0, check.stderr
            assert "ok:" in check.stdout

        # counts and metadata match the directory tree
        report = run_primary(
            "validate", "--store", str(out_a / "bottle__features.0__test")
        ).stdout
        assert "n: 6" in report
        assert "anomalous: 4" in report
        manifest = json.loads(
            (out_a / "bottle__features.0__test.json").read_text()
        )
        assert [s["anomaly_type"] for s in manifest["samples"]] == [
            "dent", "dent", "good", "good", "scratch", "scratch"
        ]
        train_manifest = json.loads(
            (out_a / "bottle__features.0__train.json").read_text()
        )
        assert len(train_manifest["samples"]) == 4
        assert all(s["label"] == "normal"
                   for s in train_manifest["samples"])

        # two runs are bitwise identical
        for stem in stems:
            for suffix in (".fvs", ".json"):
                assert (out_a / (stem + suffix)).read_bytes() == \
                    (out_b / (stem + suffix)).read_bytes(), stem + suffix

        print(f"PASS criterion 11: extractor conformance "
              f"({time.perf_counter() - start:.2f}s)")


class TestCriterion12:
    """End-to-end smoke: extractor output through fit and an exp1 run."""

    def test_smoke(self, mini_dataset, tmp_path):
        start = time.perf_counter()
        out = tmp_path / "stores"
        extract(mini_dataset, out, "features.0")
        train = out / "bottle__features.0__train"
        test = out / "bottle__features.0__test"

        fit = run_primary("fit", "--train", str(train),
                          "--out", str(tmp_path / "model.gmd"))
        assert fit.returncode == 0, fit.stderr
        d = json.loads(fit.stdout)["d"]
        assert d == STAGE_CHANNELS[0]

        config = {
            "kind": "exp1",
            "category": "bottle",
            "node": "features.0",
            "methods": ["bottom_up", "pca", "npca"],
            "feature_store_paths": {"train": str(train), "test": str(test)},
        }
        (tmp_path / "config.json").write_text(json.dumps(config))
        run = run_primary("experiment", "--config",
                          str(tmp_path / "config.json"),
                          "--out-dir", str(tmp_path / "exp1"))
        assert run.returncode == 0, run.stderr

        csvs = sorted((tmp_path / "exp1").glob("*.csv"))
        assert len(csvs) == 3
        for path in csvs:
            with open(path) as f:
                rows = list(csv.DictReader(f))
            assert [int(r["k"]) for r in rows] == list(range(1, d + 1))
            assert all(0.0 <= float(r["auroc_eval"]) <= 1.0 for r in rows)

        print(f"PASS criterion 12: end-to-end smoke "
              f"({time.perf_counter() - start:.2f}s)")
