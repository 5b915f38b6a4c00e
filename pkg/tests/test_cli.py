import json
import subprocess
import sys
from pathlib import Path

import pytest

from netret.cli import main

from helpers import c3_docs


def write_jsonl(path: Path, records) -> Path:
    path.write_text(
        "".join(json.dumps(r) + "\n" for r in records), encoding="utf-8"
    )
    return path


@pytest.fixture()
def c3_corpus(tmp_path):
    return write_jsonl(
        tmp_path / "corpus.jsonl",
        [{"id": d.id, "text": d.text} for d in c3_docs()],
    )


@pytest.fixture()
def c3_bundle(tmp_path, c3_corpus):
    bundle = tmp_path / "bundle"
    rc = main(["index", "--corpus", str(c3_corpus), "--bundle", str(bundle)])
    assert rc == 0
    return bundle


class TestIndexCommand:
    def test_builds_bundle(self, tmp_path, c3_corpus, capsys):
        bundle = tmp_path / "b"
        assert main(["index", "--corpus", str(c3_corpus), "--bundle", str(bundle)]) == 0
        out = capsys.readouterr().out
        assert "N=3" in out and "M=3" in out
        for name in ("index.json", "dag.json", "cpts.json", "poss.json"):
            assert (bundle / name).exists()
        dag = json.loads((bundle / "dag.json").read_text())
        assert len(dag["arcs"]) <= 2

    def test_empty_corpus_exits_2(self, tmp_path, capsys):
        corpus = tmp_path / "empty.jsonl"
        corpus.write_text("", encoding="utf-8")
        rc = main(["index", "--corpus", str(corpus), "--bundle", str(tmp_path / "b")])
        assert rc == 2
        assert "EmptyCorpus" in capsys.readouterr().err

    def test_duplicate_ids_exit_2(self, tmp_path, capsys):
        corpus = write_jsonl(
            tmp_path / "dup.jsonl",
            [{"id": "d", "text": "apple"}, {"id": "d", "text": "pear"}],
        )
        rc = main(["index", "--corpus", str(corpus), "--bundle", str(tmp_path / "b")])
        assert rc == 2
        assert "DuplicateDocId" in capsys.readouterr().err

    def test_stopwords_file(self, tmp_path, capsys):
        corpus = write_jsonl(
            tmp_path / "c.jsonl",
            [{"id": "d1", "text": "the apple"}, {"id": "d2", "text": "the pear"}],
        )
        sw = tmp_path / "sw.txt"
        sw.write_text("the\n", encoding="utf-8")
        bundle = tmp_path / "b"
        assert main([
            "index", "--corpus", str(corpus), "--stopwords", str(sw),
            "--bundle", str(bundle),
        ]) == 0
        assert "M=2" in capsys.readouterr().out


class TestQueryCommand:
    def test_bnr_ranks_three_docs(self, c3_bundle, capsys):
        rc = main(["query", "--bundle", str(c3_bundle), "--model", "bnr",
                   "--k", "10", "apple cherry"])
        assert rc == 0
        lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
        assert len(lines) == 3
        assert lines[0]["rank"] == 1
        assert all(l["model"] == "bnr" for l in lines)
        assert all(isinstance(l["score"], float) for l in lines)

    def test_pir_scores_are_pairs(self, c3_bundle, capsys):
        rc = main(["query", "--bundle", str(c3_bundle), "--model", "pir",
                   "apple cherry"])
        assert rc == 0
        lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
        # recomputed ordering: D1 and D2 carry N = nidf, D3 trails (see ledger)
        assert lines[0]["doc"] == "D1"
        assert set(lines[0]["score"]) == {"pi", "n"}
        assert lines[0]["score"]["pi"] == 1.0

    def test_hybrid_with_min_operator(self, c3_bundle, capsys):
        rc = main(["query", "--bundle", str(c3_bundle), "--model", "hybrid",
                   "--op", "min", "apple"])
        assert rc == 0
        lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
        assert lines[-1]["doc"] == "D2"

    def test_k_one_yields_single_line(self, c3_bundle, capsys):
        rc = main(["query", "--bundle", str(c3_bundle), "--model", "bnr",
                   "--k", "1", "apple"])
        assert rc == 0
        assert len(capsys.readouterr().out.splitlines()) == 1

    def test_empty_query_exits_2(self, c3_bundle, capsys):
        rc = main(["query", "--bundle", str(c3_bundle), "--model", "bnr", "durian"])
        assert rc == 2
        assert "EmptyQuery" in capsys.readouterr().err


class TestBatchCommand:
    def test_two_queries_two_blocks(self, tmp_path, c3_bundle):
        queries = write_jsonl(
            tmp_path / "q.jsonl",
            [{"id": "q1", "text": "apple"}, {"id": "q2", "text": "cherry"}],
        )
        run = tmp_path / "run.jsonl"
        rc = main(["batch", "--bundle", str(c3_bundle), "--queries", str(queries),
                   "--model", "bnr", "--k", "2", "--out", str(run)])
        assert rc == 0
        lines = [json.loads(l) for l in run.read_text().splitlines()]
        assert {l["qid"] for l in lines} == {"q1", "q2"}
        assert sum(1 for l in lines if l["qid"] == "q1") == 2

    def test_unknown_term_query_flagged(self, tmp_path, c3_bundle):
        queries = write_jsonl(
            tmp_path / "q.jsonl",
            [{"id": "q1", "text": "durian"}, {"id": "q2", "text": "apple"}],
        )
        run = tmp_path / "run.jsonl"
        rc = main(["batch", "--bundle", str(c3_bundle), "--queries", str(queries),
                   "--model", "pir", "--out", str(run)])
        assert rc == 0
        lines = [json.loads(l) for l in run.read_text().splitlines()]
        flagged = [l for l in lines if l.get("error") == "EmptyQuery"]
        assert len(flagged) == 1 and flagged[0]["qid"] == "q1"
        assert any(l.get("qid") == "q2" and "rank" in l for l in lines)

    def test_batch_is_deterministic(self, tmp_path, c3_bundle):
        queries = write_jsonl(
            tmp_path / "q.jsonl",
            [{"id": "q1", "text": "apple banana"}, {"id": "q2", "text": "cherry"}],
        )
        outs = []
        for name in ("r1.jsonl", "r2.jsonl"):
            run = tmp_path / name
            assert main(["batch", "--bundle", str(c3_bundle), "--queries",
                         str(queries), "--model", "hybrid", "--out", str(run)]) == 0
            outs.append(run.read_bytes())
        assert outs[0] == outs[1]


class TestEvalCommand:
    def _run_and_qrels(self, tmp_path):
        run = write_jsonl(
            tmp_path / "run.jsonl",
            [
                {"qid": "q1", "rank": 1, "doc": "a", "score": 0.9, "model": "bnr"},
                {"qid": "q1", "rank": 2, "doc": "b", "score": 0.5, "model": "bnr"},
                {"qid": "q1", "rank": 3, "doc": "c", "score": 0.4, "model": "bnr"},
            ],
        )
        qrels = tmp_path / "qrels.tsv"
        qrels.write_text("q1\ta\t1\nq1\tc\t1\nq1\tb\t0\n", encoding="utf-8")
        return run, qrels

    def test_metrics_values(self, tmp_path):
        run, qrels = self._run_and_qrels(tmp_path)
        out = tmp_path / "metrics.tsv"
        rc = main(["eval", "--run", str(run), "--qrels", str(qrels),
                   "--k", "1,3", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "qid\tp@1\tr@1\tp@3\tr@3\tap"
        assert lines[1] == "q1\t1.0000\t0.5000\t0.6667\t1.0000\t0.8333"
        assert lines[2].startswith("ALL\t")
        assert lines[2].endswith("0.8333")

    def test_figures_rendered_alongside_table(self, tmp_path):
        run, qrels = self._run_and_qrels(tmp_path)
        out = tmp_path / "metrics.tsv"
        rc = main(["eval", "--run", str(run), "--qrels", str(qrels),
                   "--k", "1,3", "--out", str(out)])
        assert rc == 0
        assert (tmp_path / "metrics_ap.png").stat().st_size > 0
        assert (tmp_path / "metrics_pk.png").stat().st_size > 0

    def test_no_plots_flag(self, tmp_path):
        run, qrels = self._run_and_qrels(tmp_path)
        out = tmp_path / "metrics.tsv"
        rc = main(["eval", "--run", str(run), "--qrels", str(qrels),
                   "--k", "1", "--out", str(out), "--no-plots"])
        assert rc == 0
        assert not (tmp_path / "metrics_ap.png").exists()

    def test_empty_run_map_zero(self, tmp_path, capsys):
        run = tmp_path / "run.jsonl"
        run.write_text("", encoding="utf-8")
        qrels = tmp_path / "qrels.tsv"
        qrels.write_text("q1\ta\t1\n", encoding="utf-8")
        rc = main(["eval", "--run", str(run), "--qrels", str(qrels),
                   "--k", "1", "--no-plots"])
        assert rc == 0
        captured = capsys.readouterr()
        assert captured.out.splitlines()[-1].endswith("0.0000")

    def test_qrels_all_zero_gives_zero_ap(self, tmp_path, capsys):
        run = write_jsonl(
            tmp_path / "run.jsonl",
            [{"qid": "q1", "rank": 1, "doc": "a", "score": 1.0, "model": "bnr"}],
        )
        qrels = tmp_path / "qrels.tsv"
        qrels.write_text("q1\ta\t0\n", encoding="utf-8")
        rc = main(["eval", "--run", str(run), "--qrels", str(qrels),
                   "--k", "1", "--no-plots"])
        assert rc == 0
        row = capsys.readouterr().out.splitlines()[1]
        assert row.split("\t")[-1] == "0.0000"

    def test_bad_qrels_exits_2(self, tmp_path, capsys):
        run = write_jsonl(
            tmp_path / "run.jsonl",
            [{"qid": "q1", "rank": 1, "doc": "a", "score": 1.0, "model": "bnr"}],
        )
        qrels = tmp_path / "qrels.tsv"
        qrels.write_text("not a qrels line\n", encoding="utf-8")
        rc = main(["eval", "--run", str(run), "--qrels", str(qrels), "--no-plots"])
        assert rc == 2


class TestInspectCommand:
    def test_summary(self, c3_bundle, capsys):
        rc = main(["inspect", "--bundle", str(c3_bundle)])
        assert rc == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["N"] == 3 and summary["M"] == 3
        assert summary["term_edges"] <= 2

    def test_dag_dump(self, c3_bundle, capsys):
        rc = main(["inspect", "--bundle", str(c3_bundle), "--what", "dag"])
        assert rc == 0
        dag = json.loads(capsys.readouterr().out)
        assert "roots" in dag and "arcs" in dag


class TestRoundTrip:
    def test_query_twice_byte_identical(self, c3_bundle, capsys):
        argv = ["query", "--bundle", str(c3_bundle), "--model", "pir", "apple cherry"]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        second = capsys.readouterr().out
        assert first == second

    def test_console_entry_point(self, tmp_path, c3_corpus):
        bundle = tmp_path / "b"
        proc = subprocess.run(
            [sys.executable, "-m", "netret.cli", "index",
             "--corpus", str(c3_corpus), "--bundle", str(bundle)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "N=3" in proc.stdout
