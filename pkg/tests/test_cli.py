import csv
import json
import math

import numpy as np
import pytest

from regdecomp.cli import main
from regdecomp.core import misclassification_rate, total_cost
from regdecomp.graph import distance_matrix, giant_component, read_edge_list
from regdecomp.io import read_labels_csv

# mean intra- and inter-block distances reported for a=20, b=2, n=1e4
REPORTED_INTRA, REPORTED_INTER = 4.75, 5.0


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def data_lines(path):
    return [l for l in path.read_text().splitlines() if l and not l.startswith("#")]


@pytest.fixture(scope="module")
def planted_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("planted")
    assert main(["generate", "--model", "planted", "--n", "600", "--a", "30",
                 "--b", "2", "--seed", "4", "--out", str(out)]) == 0
    return out


class TestGenerate:
    def test_pa_three_nodes(self, tmp_path, capsys):
        rec = run_json(capsys, "generate", "--model", "pa", "--n", 3, "--out", tmp_path)
        assert len(data_lines(tmp_path / "graph.edgelist")) == 3
        assert rec["metrics"] == {"nodes": 3, "edges": 3}
        assert not (tmp_path / "labels.csv").exists()

    def test_sbm_zero_matrix(self, tmp_path, capsys, caplog):
        with caplog.at_level("WARNING"):
            rec = run_json(capsys, "generate", "--model", "sbm", "--sizes", "5,5",
                           "--probs", "[[0,0],[0,0]]", "--out", tmp_path)
        assert data_lines(tmp_path / "graph.edgelist") == []
        assert rec["metrics"]["edges"] == 0
        assert "no edges" in caplog.text
        assert len(read_labels_csv(tmp_path / "labels.csv")) == 10

    def test_planted_edge_count(self, tmp_path, capsys):
        rec = run_json(capsys, "generate", "--model", "planted", "--n", 2000,
                       "--a", 20, "--b", 2, "--seed", 8, "--out", tmp_path)
        mean = 2 * math.comb(1000, 2) * 0.01 + 1000 ** 2 * 0.001
        sd = math.sqrt(2 * math.comb(1000, 2) * 0.01 * 0.99 + 1000 ** 2 * 0.001 * 0.999)
        assert mean == pytest.approx(10990)
        assert abs(rec["metrics"]["edges"] - mean) <= 3 * sd
        assert len(data_lines(tmp_path / "graph.edgelist")) == rec["metrics"]["edges"]

    def test_missing_params(self, tmp_path, capsys):
        code, _, err = run(capsys, "generate", "--model", "planted", "--n", 10,
                           "--out", tmp_path)
        assert code != 0 and "--a" in err

    def test_invalid_params(self, tmp_path, capsys):
        code, _, err = run(capsys, "generate", "--model", "planted", "--n", 11,
                           "--a", 3, "--b", 1, "--out", tmp_path)
        assert code != 0 and err.startswith("regdecomp generate: error")


class TestDecompose:
    def test_pipeline(self, planted_dir, tmp_path, capsys):
        rec = run_json(capsys, "decompose", planted_dir / "graph.edgelist",
                       "--k", 2, "--restarts", 20, "--seed", 1, "--out", tmp_path,
                       "--truth", planted_dir / "labels.csv")
        assert rec["metrics"]["misclassification_all"] <= 0.02
        with open(tmp_path / "labels.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["node_id", "group"]
        assert {r[1] for r in rows[1:]} == {"0", "1"}

    def test_cost_recomputed_from_outputs(self, planted_dir, tmp_path, capsys):
        run_json(capsys, "decompose", planted_dir / "graph.edgelist", "--k", 2,
                 "--refs", "uniform:40", "--targets", "sample:200",
                 "--restarts", 10, "--out", tmp_path)
        model = json.loads((tmp_path / "model.json").read_text())
        g = read_edge_list(planted_dir / "graph.edgelist")
        comp, _ = giant_component(g)
        refs = [comp.index_of(r) for r in model["reference_ids"]]
        tgts = [comp.index_of(t) for t in model["target_ids"]]
        D = distance_matrix(comp, refs, tgts).entries
        z = np.array([model["labeling"][t] for t in model["target_ids"]])
        assert total_cost(D, z, 2) == pytest.approx(model["cost"], rel=1e-12)
        assert len(refs) == 40 and len(tgts) == 200

    def test_no_classify_labels_targets_only(self, planted_dir, tmp_path, capsys):
        rec = run_json(capsys, "decompose", planted_dir / "graph.edgelist", "--k", 2,
                       "--refs", "uniform:30", "--targets", "sample:50",
                       "--no-classify", "--restarts", 5, "--out", tmp_path)
        assert rec["metrics"]["labeled_nodes"] == 50

    def test_byte_identical_rerun(self, planted_dir, tmp_path, capsys):
        outs = []
        for i, jobs in enumerate((1, 3)):
            d = tmp_path / str(i)
            run_json(capsys, "decompose", planted_dir / "graph.edgelist", "--k-max", 3,
                     "--refs", "betweenness:100,30", "--restarts", 8, "--seed", 11,
                     "--jobs", jobs, "--out", d)
            outs.append({p.name: p.read_bytes() for p in d.iterdir()
                         if p.name != "run.json"})
        assert outs[0] == outs[1]
        assert set(outs[0]) == {"labels.csv", "model.json", "references.csv",
                                "references.json", "cost_curve.csv"}

    def test_knee_on_complete_bipartite(self, tmp_path, capsys):
        # K_{40,40}: every node sees its own side at 2 and the other side at 1
        edges = "".join(f"{u} {v}\n" for u in range(40) for v in range(40, 80))
        (tmp_path / "g.txt").write_text(edges)
        rec = run_json(capsys, "decompose", tmp_path / "g.txt", "--k-max", 6,
                       "--restarts", 20, "--out", tmp_path / "o")
        assert rec["metrics"]["k_star"] == 2 and rec["metrics"]["monotone"]
        curve = (tmp_path / "o" / "cost_curve.csv").read_text().splitlines()
        assert curve[0] == "k,cost" and len(curve) == 7
        cost = [float(line.split(",")[1]) for line in curve[1:]]
        assert max(np.diff(cost[1:])) > -0.01 * (cost[0] - cost[1])
        labels = read_labels_csv(tmp_path / "o" / "labels.csv")
        assert len({labels[str(i)] for i in range(40)}) == 1
        assert labels["0"] != labels["40"]

    def test_expand(self, tmp_path, capsys):
        # path a-b-c-d plus a pendant isolated edge; targets file names a, d
        (tmp_path / "g.txt").write_text("a b\nb c\nc d\nx y\n")
        (tmp_path / "t.txt").write_text("a\nd\n")
        run_json(capsys, "decompose", tmp_path / "g.txt", "--k", 2, "--refs", "all",
                 "--targets", f"file:{tmp_path / 't.txt'}", "--no-classify",
                 "--expand", "--restarts", 5, "--out", tmp_path / "o")
        labels = read_labels_csv(tmp_path / "o" / "labels.csv")
        assert set(labels) == {"a", "b", "c", "d"}
        assert labels["a"] == labels["b"] != labels["c"] == labels["d"]

    def test_unknown_reference_file(self, planted_dir, tmp_path, capsys):
        (tmp_path / "r.txt").write_text("no-such-node\n")
        code, _, err = run(capsys, "decompose", planted_dir / "graph.edgelist",
                           "--refs", f"file:{tmp_path / 'r.txt'}", "--out", tmp_path)
        assert code != 0 and "no-such-node" in err

    def test_k_and_k_max_exclusive(self, planted_dir, tmp_path):
        with pytest.raises(SystemExit):
            main(["decompose", str(planted_dir / "graph.edgelist"), "--k", "2",
                  "--k-max", "3"])


class TestSweep:
    def test_rows_and_trend(self, planted_dir, tmp_path, capsys):
        rec = run_json(capsys, "sweep-refs", planted_dir / "graph.edgelist",
                       planted_dir / "labels.csv", "--m-list", "2,8,40",
                       "--target-sizes", "60,120", "--trials", 3,
                       "--restarts", 10, "--out", tmp_path)
        with open(tmp_path / "sweep.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert rec["metrics"]["rows"] == len(rows) == 3 * 2 * 3
        mean = {m: np.mean([float(r["error"]) for r in rows if r["m"] == m])
                for m in ("2", "8", "40")}
        assert mean["2"] >= mean["8"] >= mean["40"]
        assert mean["40"] <= 0.02

    def test_full_references_match_direct_fit(self, planted_dir, tmp_path, capsys):
        # with every node as a reference the error equals a direct fit on those targets
        g = read_edge_list(planted_dir / "graph.edgelist")
        comp, _ = giant_component(g)
        N = comp.node_count
        run_json(capsys, "sweep-refs", planted_dir / "graph.edgelist",
                 planted_dir / "labels.csv", "--m-list", N, "--target-sizes", 100,
                 "--trials", 1, "--restarts", 10, "--out", tmp_path)
        with open(tmp_path / "sweep.csv") as fh:
            (row,) = list(csv.DictReader(fh))
        truth = read_labels_csv(planted_dir / "labels.csv")
        tg = np.random.default_rng([0, 100, 0]).choice(N, 100, replace=False)
        D = distance_matrix(comp, np.arange(N), tg).entries
        from regdecomp.core import RDConfig, regular_decomposition
        model = regular_decomposition(D, RDConfig(k=2, s_max=10), 1)
        z = np.array([truth[comp.original_ids[i]] for i in tg])
        assert float(row["error"]) == pytest.approx(misclassification_rate(model.labels, z),
                                                    abs=0.02)

    def test_missing_truth(self, planted_dir, tmp_path, capsys):
        (tmp_path / "l.csv").write_text("node_id,group\n0,0\n")
        code, _, err = run(capsys, "sweep-refs", planted_dir / "graph.edgelist",
                           tmp_path / "l.csv", "--out", tmp_path)
        assert code != 0 and "lack a label" in err


class TestSummarize:
    def test_two_cliques(self, tmp_path, capsys):
        edges = [f"{u} {v}" for c in (range(4), range(4, 7))
                 for u in c for v in c if u < v]
        (tmp_path / "g.txt").write_text("\n".join(edges) + "\n")
        (tmp_path / "l.csv").write_text(
            "node_id,group\n" + "".join(f"{i},{int(i >= 4)}\n" for i in range(7)))
        s = run_json(capsys, "summarize", tmp_path / "g.txt", tmp_path / "l.csv",
                     "--out", tmp_path)
        assert s["density"] == [[1.0, 0.0], [0.0, 1.0]]
        assert s["group_sizes"] == [4, 3] and s["per_group_edges"] == [6, 3]
        assert json.loads((tmp_path / "summary.json").read_text()) == s

    def test_single_group(self, tmp_path, capsys):
        (tmp_path / "g.txt").write_text("0 1\n1 2\n2 3\n")
        (tmp_path / "l.csv").write_text("node_id,group\n0,5\n1,5\n2,5\n")
        s = run_json(capsys, "summarize", tmp_path / "g.txt", tmp_path / "l.csv",
                     "--out", tmp_path)
        assert s["density"] == [[pytest.approx(2 / 3)]]

    def test_planted_densities(self, tmp_path, capsys):
        run_json(capsys, "generate", "--model", "planted", "--n", 2000, "--a", 20,
                 "--b", 2, "--seed", 5, "--out", tmp_path)
        s = run_json(capsys, "summarize", tmp_path / "graph.edgelist",
                     tmp_path / "labels.csv", "--out", tmp_path)
        p, q, pairs_in, pairs_out = 0.01, 0.001, math.comb(1000, 2), 1000 ** 2
        for i in range(2):
            sd = math.sqrt(p * (1 - p) / pairs_in)
            assert abs(s["density"][i][i] - p) <= 3 * sd
        assert abs(s["density"][0][1] - q) <= 3 * math.sqrt(q * (1 - q) / pairs_out)

    def test_unknown_ids(self, tmp_path, capsys):
        (tmp_path / "g.txt").write_text("0 1\n")
        (tmp_path / "l.csv").write_text("node_id,group\n0,0\nghost,1\n")
        code, _, err = run(capsys, "summarize", tmp_path / "g.txt",
                           tmp_path / "l.csv", "--out", tmp_path)
        assert code != 0 and "ghost" in err


class TestTheoryCommand:
    def test_reference_instance(self, capsys):
        r = run_json(capsys, "theory", "--a", 20, "--b", 2, "--n", 1e4)
        assert r["above_ks_threshold"] is True
        assert (r["lambda1"], r["lambda2"]) == (11, 9)
        assert r["d1_numeric"] < r["d2_numeric"]
        assert abs(r["d1_numeric"] - r["d"]) < 0.5 and abs(r["d2_numeric"] - r["d"]) < 0.5

    def test_below_threshold(self, capsys):
        r = run_json(capsys, "theory", "--a", 5, "--b", 4)
        assert r["above_ks_threshold"] is False
        assert r["alpha"] is None and "spectral" in r["notes"]

    def test_csv_format(self, capsys):
        code, out, _ = run(capsys, "theory", "--a", 20, "--b", 2, "--format", "csv")
        lines = out.splitlines()
        assert code == 0 and lines[0] == "key,value" and "lambda1,11.0" in lines

    @pytest.mark.xfail(strict=True, reason="numeric d1 = 3.63 sits about 1.1 hops "
                       "below the reported intra-block mean")
    def test_reported_means_bracket_prediction(self, capsys):
        r = run_json(capsys, "theory", "--a", 20, "--b", 2, "--n", 1e4)
        assert abs(r["d1_numeric"] - REPORTED_INTRA) <= 0.35
        assert abs(r["d2_numeric"] - REPORTED_INTER) <= 0.35
