import json

import numpy as np
import pytest

from dyngraph import read_dataset
from dyngraph.cli import main


def run(*argv):
    return main(list(argv))


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """One small trained pipeline shared by the CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    toy = root / "toy.jsonl"
    cfg = root / "train.cfg"
    ckpt = root / "model.ckpt"
    assert run("synth", "--model", "toy", "--nodes", "6", "--snapshots", "5",
               "--graphs", "8", "--seed", "3", "--out", str(toy)) == 0
    cfg.write_text(
        "epochs = 2\nbatch_size = 4\nseed = 1\nd_f = 4\nd_z = 2\nh = 8\nL = 1\n"
    )
    assert run("train", "--data", str(toy), "--config", str(cfg),
               "--mode", "factorized", "--out", str(ckpt)) == 0
    return {"root": root, "toy": toy, "cfg": cfg, "ckpt": ckpt}


class TestSynth:
    def test_ba_flag_contract(self, tmp_path):
        out = tmp_path / "d.jsonl"
        assert run("synth", "--model", "ba", "--nodes", "30", "--snapshots", "10",
                   "--graphs", "5", "--seed", "7", "--out", str(out)) == 0
        ds = read_dataset(out)
        assert ds.n_max == 30 and ds.T == 10 and len(ds) == 5

    def test_toy_writes_labels_sidecar(self, workspace):
        labels = workspace["toy"].with_name("toy.jsonl.labels")
        assert labels.exists()
        assert len(labels.read_text().splitlines()) == 8

    def test_determinism(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for out in (a, b):
            assert run("synth", "--model", "ba", "--nodes", "20", "--snapshots", "4",
                       "--graphs", "3", "--seed", "5", "--out", str(out)) == 0
        assert a.read_bytes() == b.read_bytes()


class TestTrain:
    def test_writes_checkpoint_and_report(self, workspace):
        assert workspace["ckpt"].exists()
        report = workspace["root"] / "model.ckpt.report.jsonl"
        rows = [json.loads(line) for line in report.read_text().splitlines()]
        assert [r["epoch"] for r in rows] == [1, 2]
        for key in ("neg_elbo", "edge_nll", "node_nll", "kl_f", "kl_edge", "kl_node", "kl_joint", "seconds"):
            assert key in rows[0]

    def test_malformed_config_is_usage_error(self, workspace, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("no_such_key = 1\n")
        assert run("train", "--data", str(workspace["toy"]), "--config", str(bad),
                   "--out", str(tmp_path / "m.ckpt")) == 2
        assert "unknown key" in capsys.readouterr().err

    def test_missing_data_file_is_usage_error(self, workspace, tmp_path):
        assert run("train", "--data", str(tmp_path / "nope.jsonl"),
                   "--config", str(workspace["cfg"]), "--out", str(tmp_path / "m.ckpt")) == 2


class TestGenerate:
    def test_byte_identical_runs(self, workspace, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for out in (a, b):
            assert run("generate", "--ckpt", str(workspace["ckpt"]), "--num", "4",
                       "--seed", "1", "--out", str(out)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_output_is_valid_binary_dataset(self, workspace, tmp_path):
        out = tmp_path / "g.jsonl"
        assert run("generate", "--ckpt", str(workspace["ckpt"]), "--num", "3",
                   "--seed", "2", "--out", str(out)) == 0
        ds = read_dataset(out)
        assert len(ds) == 3 and ds.n_max == 6 and ds.T == 5

    def test_bernoulli_mode(self, workspace, tmp_path):
        out = tmp_path / "g.jsonl"
        assert run("generate", "--ckpt", str(workspace["ckpt"]), "--num", "2",
                   "--seed", "2", "--out", str(out), "--binarize", "bernoulli") == 0
        assert len(read_dataset(out)) == 2


class TestEval:
    def test_self_comparison_all_zero(self, workspace, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert run("eval", "--real", str(workspace["toy"]), "--gen", str(workspace["toy"]),
                   "--out", str(out)) == 0
        report = json.loads(out.read_text())
        assert all(v == 0.0 for v in report["mmd"].values())
        assert report["mse"] == 0.0
        assert "Betweenness" in capsys.readouterr().out

    def test_graph_order_invariance(self, workspace, tmp_path):
        toy = workspace["toy"]
        lines = toy.read_text().splitlines()
        shuffled = tmp_path / "shuffled.jsonl"
        shuffled.write_text("\n".join([lines[0]] + lines[1:][::-1]) + "\n")
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        gen = tmp_path / "g.jsonl"
        assert run("generate", "--ckpt", str(workspace["ckpt"]), "--num", "3",
                   "--seed", "4", "--out", str(gen)) == 0
        assert run("eval", "--real", str(toy), "--gen", str(gen), "--out", str(out1)) == 0
        assert run("eval", "--real", str(shuffled), "--gen", str(gen), "--out", str(out2)) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_jobs_flag_matches_serial(self, workspace, tmp_path):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        assert run("eval", "--real", str(workspace["toy"]), "--gen", str(workspace["toy"]),
                   "--out", str(out1)) == 0
        assert run("eval", "--real", str(workspace["toy"]), "--gen", str(workspace["toy"]),
                   "--out", str(out2), "--jobs", "2") == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestProbe:
    def test_scores_and_graphs_written(self, workspace, tmp_path):
        out = tmp_path / "p.json"
        assert run("probe", "--ckpt", str(workspace["ckpt"]), "--factor", "z_node",
                   "--samples", "4", "--seed", "5", "--out", str(out)) == 0
        scores = json.loads(out.read_text())
        assert scores["varied_factor"] == "z_node"
        assert scores["edge_variation"] == 0.0  # node factor never moves edges
        graphs = read_dataset(tmp_path / "p.json.graphs.jsonl")
        assert len(graphs) == 4

    def test_deterministic(self, workspace, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            assert run("probe", "--ckpt", str(workspace["ckpt"]), "--factor", "f",
                       "--samples", "3", "--seed", "9", "--out", str(out)) == 0
        assert a.read_bytes() == b.read_bytes()


class TestPlot:
    def test_graph_style(self, workspace, tmp_path):
        out = tmp_path / "g.png"
        assert run("plot", "--in", str(workspace["toy"]), "--style", "graph", "--out", str(out)) == 0
        assert out.stat().st_size > 0

    def test_table_style(self, workspace, tmp_path):
        rep = tmp_path / "r.json"
        assert run("eval", "--real", str(workspace["toy"]), "--gen", str(workspace["toy"]),
                   "--out", str(rep)) == 0
        out = tmp_path / "t.png"
        assert run("plot", "--in", str(rep), "--style", "table", "--out", str(out)) == 0
        assert out.stat().st_size > 0


class TestBench:
    def test_small_sizes_table(self, tmp_path, capsys):
        out = tmp_path / "bench.json"
        assert run("bench", "--sizes", "20,40", "--snapshots", "2", "--reps", "2",
                   "--out", str(out)) == 0
        rows = json.loads(out.read_text())
        assert [r["n"] for r in rows] == [20, 40]
        assert all("log10_seconds" in r for r in rows)
        assert "log10(s)" in capsys.readouterr().out


class TestExitCodes:
    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run("synth", "--model", "ba", "--bogus", "1")
        assert exc.value.code == 2

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run("frobnicate")
        assert exc.value.code == 2

    def test_missing_input_file_exits_2(self, tmp_path):
        assert run("generate", "--ckpt", str(tmp_path / "none.ckpt"), "--num", "1",
                   "--seed", "0", "--out", str(tmp_path / "g.jsonl")) == 2

    def test_runtime_failure_exits_1(self, tmp_path, capsys):
        corrupt = tmp_path / "corrupt.ckpt"
        corrupt.write_bytes(b"not a checkpoint")
        assert run("generate", "--ckpt", str(corrupt), "--num", "1",
                   "--seed", "0", "--out", str(tmp_path / "g.jsonl")) == 1
        assert "error" in capsys.readouterr().err
