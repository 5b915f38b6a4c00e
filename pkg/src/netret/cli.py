"""Command line interface: index | query | batch | eval | inspect."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from netret import bnr, hybrid, pir
from netret.bundle import Bundle, load_bundle, save_bundle
from netret.corpus import Document, IndexOptions, build_index, tokenize
from netret.errors import EmptyQuery, NetretError
from netret.network import learn_structure
from netret.report import evaluate_run, metrics_table, render_figures

log = logging.getLogger("netret")

MODELS = ("bnr", "pir", "hybrid")


def _read_jsonl(path: Path) -> list[dict]:
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise NetretError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
    return records


def _read_stopwords(path: Path | None) -> frozenset[str]:
    if path is None:
        return frozenset()
    words = set()
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            word = line.strip().lower()
            if word:
                words.add(word)
    return frozenset(words)


def _result_lines(model: str, ranked, qid: str | None = None) -> list[str]:
    lines = []
    for rank, (doc_id, payload) in enumerate(ranked, start=1):
        obj: dict = {"rank": rank, "doc": doc_id, "model": model}
        if model == "bnr":
            obj["score"] = payload
        else:
            obj["score"] = {"pi": payload.possibility, "n": payload.necessity}
            if not payload.defined:
                obj["undefined"] = True
        if qid is not None:
            obj["qid"] = qid
        lines.append(json.dumps(obj, sort_keys=True))
    return lines


def _retrieve(bundle: Bundle, model: str, text: str, k: int, op: str):
    terms = tokenize(text, bundle.index.options)
    if model == "bnr":
        return bnr.bnr_retrieve(bundle.index, bundle.bnr, terms, k)
    if model == "pir":
        return pir.pir_retrieve(bundle.index, terms, k)
    return hybrid.hybrid_retrieve(bundle.index, bundle.hybrid, terms, k, op)


def cmd_index(args: argparse.Namespace) -> int:
    opts = IndexOptions(
        stopwords=_read_stopwords(args.stopwords),
        min_token_len=args.min_len,
        clamp=args.eps,
    )
    records = _read_jsonl(args.corpus)
    docs = []
    for rec in records:
        if "id" not in rec or "text" not in rec:
            raise NetretError("corpus records need 'id' and 'text' fields")
        docs.append(Document(id=str(rec["id"]), text=str(rec["text"])))
    index = build_index(docs, opts)
    dag = learn_structure(index)
    bnr_model = bnr.build_model(index, dag)
    hybrid_model = hybrid.translate_model(bnr_model)
    save_bundle(args.bundle, index, bnr_model, hybrid_model)
    print(
        f"N={index.n_docs} M={index.vocab_size} edges={len(dag.term_arcs)} "
        f"bundle={args.bundle}"
    )
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    bundle = load_bundle(args.bundle)
    ranked = _retrieve(bundle, args.model, args.query, args.k, args.op)
    for line in _result_lines(args.model, ranked):
        print(line)
    return 0


def cmd_batch(args: argparse.Namespace) -> int:
    bundle = load_bundle(args.bundle)
    out = args.out.open("w", encoding="utf-8") if args.out else sys.stdout
    try:
        for rec in _read_jsonl(args.queries):
            qid = str(rec.get("id", ""))
            text = str(rec.get("text", ""))
            try:
                ranked = _retrieve(bundle, args.model, text, args.k, args.op)
            except EmptyQuery:
                log.warning("query %s has no vocabulary terms", qid)
                out.write(json.dumps({"error": "EmptyQuery", "qid": qid}, sort_keys=True) + "\n")
                continue
            for line in _result_lines(args.model, ranked, qid=qid):
                out.write(line + "\n")
    finally:
        if args.out:
            out.close()
    return 0


def _read_qrels(path: Path) -> dict[str, set[str]]:
    qrels: dict[str, set[str]] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise NetretError(f"{path}:{lineno}: expected qid<TAB>docid<TAB>rel")
            qid, doc_id, rel = parts
            try:
                relevant = int(rel) != 0
            except ValueError as exc:
                raise NetretError(f"{path}:{lineno}: bad relevance {rel!r}") from exc
            if relevant:
                qrels.setdefault(qid, set()).add(doc_id)
    return qrels


def _read_run(path: Path) -> dict[str, list[str]]:
    run: dict[str, list[tuple[int, str]]] = {}
    for rec in _read_jsonl(path):
        if "error" in rec:
            run.setdefault(str(rec.get("qid", "")), [])
            continue
        qid = str(rec.get("qid", ""))
        run.setdefault(qid, []).append((int(rec["rank"]), str(rec["doc"])))
    return {
        qid: [doc for _, doc in sorted(entries)] for qid, entries in run.items()
    }


def cmd_eval(args: argparse.Namespace) -> int:
    run = _read_run(args.run)
    if not run:
        log.warning("run file contains no results; MAP=0")
    qrels = _read_qrels(args.qrels)
    retrieved = {doc for ranked in run.values() for doc in ranked}
    unseen = {
        doc for docs in qrels.values() for doc in docs if doc not in retrieved
    }
    if unseen:
        log.warning("%d judged doc id(s) never retrieved in the run", len(unseen))
    k_values = [int(k) for k in args.k.split(",") if k.strip()]
    results, mean_ap, _ = evaluate_run(run, qrels, k_values)
    table = metrics_table(results, mean_ap, k_values)
    if args.out:
        args.out.write_text(table, encoding="utf-8")
    else:
        sys.stdout.write(table)
    plots_dir = args.plots
    if plots_dir is None and args.out is not None and not args.no_plots:
        plots_dir = args.out.parent
    if plots_dir is not None and not args.no_plots:
        stem = args.out.stem if args.out else "metrics"
        for path in render_figures(results, mean_ap, k_values, plots_dir, stem):
            log.info("wrote %s", path)
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    if args.what == "summary":
        bundle = load_bundle(args.bundle)
        summary = {
            "N": bundle.index.n_docs,
            "M": bundle.index.vocab_size,
            "rankable_docs": len(bundle.index.rankable_doc_ids),
            "term_edges": len(bundle.dag.term_arcs),
            "roots": list(bundle.dag.roots),
            "models": list(MODELS),
        }
        print(json.dumps(summary, sort_keys=True, indent=1))
    else:
        name = {"index": "index.json", "dag": "dag.json",
                "cpts": "cpts.json", "poss": "poss.json"}[args.what]
        sys.stdout.write((Path(args.bundle) / name).read_text(encoding="utf-8"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netret",
        description="Document retrieval over Bayesian and possibilistic term networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build an index and model bundle from a JSONL corpus")
    p.add_argument("--corpus", type=Path, required=True, help="JSONL file with id/text records")
    p.add_argument("--stopwords", type=Path, default=None, help="plain text, one word per line")
    p.add_argument("--bundle", type=Path, required=True, help="output bundle directory")
    p.add_argument("--min-len", type=int, default=2, help="minimum token length")
    p.add_argument("--eps", type=float, default=1e-4, help="probability clamp for CPT rows")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="rank documents for one query")
    p.add_argument("--bundle", type=Path, required=True)
    p.add_argument("--model", choices=MODELS, required=True)
    p.add_argument("--op", choices=("min", "product"), default="product")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("query", help="query text")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("batch", help="run a JSONL query file and write a run file")
    p.add_argument("--bundle", type=Path, required=True)
    p.add_argument("--queries", type=Path, required=True, help="JSONL with id/text records")
    p.add_argument("--model", choices=MODELS, required=True)
    p.add_argument("--op", choices=("min", "product"), default="product")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out", type=Path, default=None, help="run file (default stdout)")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("eval", help="score a run file against qrels")
    p.add_argument("--run", type=Path, required=True)
    p.add_argument("--qrels", type=Path, required=True, help="TSV qid<TAB>docid<TAB>rel")
    p.add_argument("--k", default="1,5,10", help="comma-separated cutoffs")
    p.add_argument("--out", type=Path, default=None, help="TSV output (default stdout)")
    p.add_argument("--plots", type=Path, default=None,
                   help="figure directory (default: alongside --out)")
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inspect", help="print bundle contents")
    p.add_argument("--bundle", type=Path, required=True)
    p.add_argument("--what", choices=("summary", "index", "dag", "cpts", "poss"),
                   default="summary")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING,
                        format="netret: %(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NetretError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
