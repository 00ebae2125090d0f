import json
import subprocess
import sys

import numpy as np
import pytest

from clustermatch.bench import CSV_COLUMNS, SweepSpec, read_csv, run_sweep
from clustermatch.cli import main
from clustermatch.data import Dataset, FeatureMatrix
from clustermatch.io import write_dataset


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "d.msmf"
    assert main(["synth", "--sets", "6", "--inliers", "8", "--outliers", "2", "--eps", "0.15", "--seed", "7", "-o", str(path)]) == 0
    return path


def last_json(capsys):
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


class TestSynth:
    def test_byte_identical(self, tmp_path):
        args = ["synth", "--sets", "30", "--inliers", "20", "--outliers", "0", "--dim", "5", "--eps", "0.15", "--seed", "7"]
        main(args + ["-o", str(tmp_path / "a.msmf")])
        main(args + ["-o", str(tmp_path / "b.msmf")])
        a = (tmp_path / "a.msmf").read_bytes()
        assert a == (tmp_path / "b.msmf").read_bytes()
        assert b"sizes " + b" ".join([b"20"] * 30) in a

    def test_invalid_flags(self, tmp_path):
        assert main(["synth", "--sets", "1", "--inliers", "3", "-o", str(tmp_path / "x")]) == 2


class TestMatch:
    def test_cluster_method_is_consistent(self, dataset, capsys):
        assert main(["match", str(dataset), "--method", "matchCluster"]) == 0
        report = last_json(capsys)
        assert report["mean_Cu"] == 1.0
        assert list(report) == CSV_COLUMNS

    def test_hung_pair_reports_null_clustering_error(self, dataset, capsys):
        assert main(["match", str(dataset), "--method", "hungPair"]) == 0
        report = last_json(capsys)
        assert report["clustering_error"] is None and 0 < report["mean_Cu"] <= 1

    def test_zero_noise(self, tmp_path, capsys):
        path = tmp_path / "z.msmf"
        main(["synth", "--sets", "5", "--inliers", "10", "--eps", "0", "-o", str(path)])
        for method in ("matchCluster", "matchClusterFast", "hungPair", "hungLin"):
            assert main(["match", str(path), "--method", method]) == 0
            assert last_json(capsys)["accuracy"] == 1.0

    def test_bogus_method(self, dataset, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["match", str(dataset), "--method", "bogus"])
        assert exc.value.code == 2
        assert "bogus" in capsys.readouterr().err

    def test_ragged_needs_pad(self, tmp_path, capsys):
        path = tmp_path / "r.msmf"
        rng = np.random.default_rng(0)
        sets = [FeatureMatrix(rng.random((2, n)), str(n)) for n in (4, 3, 4)]
        write_dataset(Dataset(sets), path)
        assert main(["match", str(path), "--method", "matchCluster"]) == 3
        assert "--pad" in capsys.readouterr().err
        assert main(["match", str(path), "--method", "matchCluster", "--pad"]) == 0

    def test_missing_dataset(self, tmp_path):
        assert main(["match", str(tmp_path / "none.msmf"), "--method", "hungPair"]) == 3

    def test_result_then_eval(self, dataset, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert main(["match", str(dataset), "--method", "matchClusterFast", "--seed", "3", "-o", str(out)]) == 0
        matched = last_json(capsys)
        assert main(["eval", str(dataset), str(out)]) == 0
        evaluated = last_json(capsys)
        for key in ("accuracy", "mean_Cu", "clustering_error"):
            assert evaluated[key] == matched[key]

    def test_star_accuracy_flag(self, dataset, capsys):
        assert main(["match", str(dataset), "--method", "hungLin", "--accuracy", "star"]) == 0
        assert 0 <= last_json(capsys)["accuracy"] <= 1

    def test_module_entry_point(self, dataset):
        proc = subprocess.run(
            [sys.executable, "-m", "clustermatch", "match", str(dataset), "--method", "hungLin"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0 and json.loads(proc.stdout)["method"] == "hungLin"


class TestBench:
    ARGS = ["bench", "--axis", "epsilon", "--values", "0.1,0.2", "--sets", "4", "--inliers", "6", "--trials", "2"]

    def _run(self, tmp_path, name, extra=()):
        out = tmp_path / name
        assert main(self.ARGS + list(extra) + ["-o", str(out)]) == 0
        return read_csv(out.read_text())

    def test_rows_and_order(self, tmp_path):
        rows = self._run(tmp_path, "a.csv")
        assert list(rows[0]) == CSV_COLUMNS
        assert len(rows) == 4 * 2 * 2
        keys = [(r["method"], float(r["epsilon"]), int(r["seed"])) for r in rows]
        assert keys[:4] == [("matchCluster", 0.1, 0), ("matchCluster", 0.1, 1), ("matchCluster", 0.2, 0), ("matchCluster", 0.2, 1)]

    def test_deterministic_except_runtime(self, tmp_path):
        a = self._run(tmp_path, "a.csv")
        b = self._run(tmp_path, "b.csv")
        strip = lambda rows: [{k: v for k, v in r.items() if k != "runtime_ms"} for r in rows]
        assert strip(a) == strip(b)

    def test_single_row(self, tmp_path):
        out = tmp_path / "one.csv"
        assert main(["bench", "--axis", "outliers", "--values", "2", "--sets", "3", "--inliers", "4", "--trials", "1", "--methods", "hungLin", "-o", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2 and lines[0] == ",".join(CSV_COLUMNS)

    def test_unknown_method_list(self):
        with pytest.raises(SystemExit) as exc:
            main(self.ARGS + ["--methods", "hungPair,nope"])
        assert exc.value.code == 2

    def test_parallel_matches_serial(self):
        spec = SweepSpec("n_sets", (3, 4), n_inliers=5, trials=2, epsilon=0.1)
        strip = lambda rows: [(r.method, r.n_sets, r.seed, r.accuracy, r.mean_Cu) for r in rows]
        assert strip(run_sweep(spec, workers=2)) == strip(run_sweep(spec, workers=1))

    def test_env_thread_cap(self, monkeypatch):
        from clustermatch.bench import thread_count

        monkeypatch.setenv("MSM_THREADS", "3")
        assert thread_count() == 3
