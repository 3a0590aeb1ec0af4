import json

import pytest

from structiou.cli import main

GOLD_TREE = "(NP (PRP Your) (NN turn))\n"
PRED_TREE = "(VP (VBP uh) (NP (PRP Your) (NN turn)))\n"
GOLD_BOUNDS = "Your\t2.56\t2.72\nturn\t2.72\t3.01\n"
PRED_BOUNDS = "uh\t2.55\t2.56\nYour\t2.56\t2.72\nturn\t2.72\t3.01\n"


@pytest.fixture
def corpus(tmp_path):
    files = {}
    for name, text in (
        ("gold.trees", GOLD_TREE),
        ("pred.trees", PRED_TREE),
        ("gold.bounds", GOLD_BOUNDS),
        ("pred.bounds", PRED_BOUNDS),
    ):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        files[name] = str(path)
    return files


class TestEval:
    def test_calibration_row(self, corpus, tmp_path, capsys):
        out = tmp_path / "scores.tsv"
        code = main([
            "eval",
            "--gold", corpus["gold.trees"],
            "--pred", corpus["pred.trees"],
            "--gold-bounds", corpus["gold.bounds"],
            "--pred-bounds", corpus["pred.bounds"],
            "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "index\tn1\tn2\tobjective\tstruct_iou"
        assert lines[1] == "0\t5\t3\t3.0000\t0.7500"
        assert lines[-1] == "# corpus\t0.7500"

    def test_identity_even(self, corpus, tmp_path):
        out = tmp_path / "scores.tsv"
        code = main([
            "eval",
            "--gold", corpus["gold.trees"],
            "--pred", corpus["gold.trees"],
            "--even",
            "--out", str(out),
        ])
        assert code == 0
        rows = [
            l for l in out.read_text().splitlines()
            if l and not l.startswith(("index", "#"))
        ]
        assert all(r.endswith("1.0000") for r in rows)

    def test_json_mirror(self, corpus, tmp_path):
        out = tmp_path / "scores.json"
        code = main([
            "eval",
            "--gold", corpus["gold.trees"],
            "--pred", corpus["pred.trees"],
            "--gold-bounds", corpus["gold.bounds"],
            "--pred-bounds", corpus["pred.bounds"],
            "--format", "json",
            "--out", str(out),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["sentences"][0]["struct_iou"] == pytest.approx(0.75)
        assert payload["corpus"]["value"] == pytest.approx(0.75)

    def test_line_count_mismatch_exit2(self, corpus, tmp_path):
        short = tmp_path / "short.trees"
        short.write_text("", encoding="utf-8")
        code = main([
            "eval",
            "--gold", corpus["gold.trees"],
            "--pred", str(short),
            "--even",
        ])
        assert code == 2

    def test_missing_projection_exit1(self, corpus):
        code = main([
            "eval", "--gold", corpus["gold.trees"], "--pred", corpus["pred.trees"],
        ])
        assert code == 1

    def test_even_excludes_bounds_exit1(self, corpus):
        code = main([
            "eval",
            "--gold", corpus["gold.trees"],
            "--pred", corpus["pred.trees"],
            "--even",
            "--gold-bounds", corpus["gold.bounds"],
            "--pred-bounds", corpus["pred.bounds"],
        ])
        assert code == 1

    def test_malformed_tree_exit2(self, corpus, tmp_path):
        bad = tmp_path / "bad.trees"
        bad.write_text("(NP (PRP Your)\n", encoding="utf-8")
        code = main([
            "eval", "--gold", str(bad), "--pred", str(bad), "--even",
        ])
        assert code == 2


class TestParseval:
    def test_identical(self, corpus, tmp_path):
        out = tmp_path / "pv.tsv"
        code = main([
            "parseval",
            "--gold", corpus["gold.trees"],
            "--pred", corpus["gold.trees"],
            "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[1].split("\t")[3] == "100.0000"

    def test_attachment_fixture(self, tmp_path):
        right = "(NP (NP (N N)) (PP (P P) (NP (NP (N N)) (PP (P P) (NP (N N))))))\n"
        left = "(NP (NP (NP (N N)) (PP (P P) (NP (N N)))) (PP (P P) (NP (N N))))\n"
        a = tmp_path / "a.trees"
        b = tmp_path / "b.trees"
        a.write_text(right, encoding="utf-8")
        b.write_text(left, encoding="utf-8")
        out = tmp_path / "pv.tsv"
        code = main([
            "parseval", "--gold", str(a), "--pred", str(b),
            "--unlabeled", "--out", str(out),
        ])
        assert code == 0
        f1 = float(out.read_text().splitlines()[1].split("\t")[3])
        assert f1 == pytest.approx(500 / 7, abs=1e-3)

    def test_word_count_mismatch_exit2(self, corpus, tmp_path):
        other = tmp_path / "other.trees"
        other.write_text("(X w)\n", encoding="utf-8")
        code = main([
            "parseval", "--gold", corpus["gold.trees"], "--pred", str(other),
        ])
        assert code == 2


class TestPerturb:
    def test_delta_zero_round_trips(self, corpus, tmp_path):
        out_dir = tmp_path / "p0"
        code = main([
            "perturb",
            "--gold", corpus["gold.trees"],
            "--gold-bounds", corpus["gold.bounds"],
            "--mode", "noise", "--delta", "0", "--reps", "2",
            "--seed", "1", "--out", str(out_dir),
        ])
        assert code == 0
        assert (out_dir / "rep0.trees").read_text() == GOLD_TREE
        assert (out_dir / "rep0.bounds").read_text() == GOLD_BOUNDS
        summary = (out_dir / "summary.tsv").read_text().splitlines()
        assert summary[1].split("\t")[3] == "1.0000"

    def test_noise_degrades_more_with_delta(self, tmp_path):
        trees = "".join("(S (A a) (B b) (C c))\n" for _ in range(12))
        blocks = "\n\n".join(
            "a\t0\t1\nb\t1\t2\nc\t2\t3" for _ in range(12)
        ) + "\n"
        tf = tmp_path / "c.trees"
        bf = tmp_path / "c.bounds"
        tf.write_text(trees, encoding="utf-8")
        bf.write_text(blocks, encoding="utf-8")
        means = {}
        for delta in ("0.1", "1.0"):
            out_dir = tmp_path / f"d{delta}"
            code = main([
                "perturb", "--gold", str(tf), "--gold-bounds", str(bf),
                "--mode", "noise", "--delta", delta, "--reps", "3",
                "--seed", "5", "--out", str(out_dir),
            ])
            assert code == 0
            row = (out_dir / "summary.tsv").read_text().splitlines()[1]
            means[delta] = float(row.split("\t")[3])
        assert means["1.0"] < means["0.1"]

    def test_reproducible_summary(self, corpus, tmp_path):
        rows = []
        for name in ("x", "y"):
            out_dir = tmp_path / name
            main([
                "perturb", "--gold", corpus["gold.trees"],
                "--gold-bounds", corpus["gold.bounds"],
                "--mode", "insert", "--delta", "0.8", "--reps", "4",
                "--seed", "11", "--out", str(out_dir),
            ])
            rows.append((out_dir / "summary.tsv").read_text())
        assert rows[0] == rows[1]


class TestAmbiguity:
    def test_small_report(self, tmp_path):
        out = tmp_path / "amb.tsv"
        code = main([
            "ambiguity", "--n", "2", "--samples", "10", "--seed", "0",
            "--out", str(out),
        ])
        assert code == 0
        header, row = out.read_text().splitlines()
        cells = dict(zip(header.split("\t"), row.split("\t")))
        assert cells["parseval_plausible_lowest"] == "50.0000"

    def test_bad_n_exit1(self):
        assert main(["ambiguity", "--n", "0"]) == 1


class TestCorrelate:
    def write_scores(self, path, values):
        lines = ["index\tvalue"]
        lines += [f"{i}\t{v}" for i, v in enumerate(values)]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def test_self_correlation(self, tmp_path):
        a = tmp_path / "a.tsv"
        values = [float(i % 7) + i / 100.0 for i in range(30)]
        self.write_scores(a, values)
        out = tmp_path / "rho.tsv"
        code = main([
            "correlate", str(a), str(a),
            "--group-size", "5", "--groups", "40", "--seed", "3",
            "--out", str(out),
        ])
        assert code == 0
        rho_line = [l for l in out.read_text().splitlines() if "spearman" in l][0]
        assert float(rho_line.split("\t")[1]) == pytest.approx(1.0)

    def test_anti_correlation(self, tmp_path):
        a = tmp_path / "a.tsv"
        b = tmp_path / "b.tsv"
        values = [float(i % 7) + i / 100.0 for i in range(30)]
        self.write_scores(a, values)
        self.write_scores(b, [-v for v in values])
        out = tmp_path / "rho.tsv"
        code = main([
            "correlate", str(a), str(b),
            "--group-size", "5", "--groups", "40", "--seed", "3",
            "--out", str(out),
        ])
        assert code == 0
        rho_line = [l for l in out.read_text().splitlines() if "spearman" in l][0]
        assert float(rho_line.split("\t")[1]) == pytest.approx(-1.0)

    def test_seed_reproducible(self, tmp_path):
        a = tmp_path / "a.tsv"
        self.write_scores(a, [float(i) for i in range(25)])
        outs = []
        for name in ("r1.tsv", "r2.tsv"):
            out = tmp_path / name
            main([
                "correlate", str(a), str(a),
                "--group-size", "4", "--groups", "20", "--seed", "8",
                "--out", str(out),
            ])
            outs.append(out.read_text())
        assert outs[0] == outs[1]

    def test_row_mismatch_exit2(self, tmp_path):
        a = tmp_path / "a.tsv"
        b = tmp_path / "b.tsv"
        self.write_scores(a, [1.0, 2.0, 3.0])
        self.write_scores(b, [1.0, 2.0])
        assert main(["correlate", str(a), str(b)]) == 2

    def test_reads_eval_and_parseval_formats(self, corpus, tmp_path):
        ev = tmp_path / "ev.tsv"
        pv = tmp_path / "pv.tsv"
        trees = "".join(
            ["(NP (PRP a) (NN b))\n", "(S (X x) (Y y))\n"] * 6
        )
        tf = tmp_path / "many.trees"
        tf.write_text(trees, encoding="utf-8")
        main(["eval", "--gold", str(tf), "--pred", str(tf), "--even",
              "--out", str(ev)])
        main(["parseval", "--gold", str(tf), "--pred", str(tf),
              "--out", str(pv)])
        out = tmp_path / "rho.tsv"
        code = main([
            "correlate", str(ev), str(pv),
            "--group-size", "3", "--groups", "10", "--seed", "0",
            "--out", str(out),
        ])
        assert code == 0
        # identical inputs on both metrics: every group aggregates to the
        # ceiling, so the correlation is degenerate but the run succeeds
        assert "# degenerate\ttrue" in out.read_text()


class TestOracleCheck:
    def test_small_run_passes(self, capsys):
        code = main([
            "oracle-check", "--trials", "25", "--max-nodes", "6", "--seed", "3",
        ])
        assert code == 0
        assert "passed=25" in capsys.readouterr().out

    def test_single_node_degenerate(self, capsys):
        code = main([
            "oracle-check", "--trials", "1", "--max-nodes", "1", "--seed", "0",
        ])
        assert code == 0

    def test_injected_fault_exits_3(self, tmp_path, monkeypatch, capsys):
        from structiou.align import Alignment

        def broken(t1, t2, mode, variant):
            return Alignment(pairs=(), objective=1e6)

        monkeypatch.setattr("structiou.cli.oracle_alignment", broken)
        out_dir = tmp_path / "dumps"
        code = main([
            "oracle-check", "--trials", "2", "--max-nodes", "5",
            "--seed", "0", "--out", str(out_dir),
        ])
        assert code == 3
        dumps = list(out_dir.glob("oracle_counterexample_*.json"))
        assert len(dumps) == 2
        payload = json.loads(dumps[0].read_text())
        assert {"tree1", "tree2", "solver_objective", "oracle_objective"} <= set(
            payload
        )


def test_unknown_command_exit1():
    assert main(["bogus"]) == 1
