"""Single command-line entry point for every pipeline.

Subcommands: ``index``, ``search``, ``eval`` (harness), ``weigh``
(graph-of-words term weights), ``comp`` (compositionality), ``rerank-rst``
(relation-aware re-ranking), ``coherence`` (entity-grid and bipartite
coherence plus the reordering evaluation), ``fuse`` and ``difficulty``
(subjective logic), ``graph dump`` (Graphviz export).

Exit codes: 0 success, 1 usage or parameter error, 2 data or validation
error.  All randomness flows from ``--seed``; identical invocations
produce byte-identical output.  ``--config`` supplies ``key=value``
defaults that explicit flags override; ``CATENAE_THREADS`` is the
environment fallback for ``--threads``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence, TextIO

from . import bipartite, comp, entitygrid, graphrank, rhetoric, retrieval, slogic, text
from .errors import DataError, ParameterError


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems via exception (exit 1)."""

    def error(self, message: str):  # noqa: D102 - argparse hook
        raise UsageError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="write primary output here instead of stdout")
    parser.add_argument("--config", help="key=value file supplying flag defaults")
    parser.add_argument("--threads", type=int, help="worker parallelism bound")
    parser.add_argument("--seed", type=int, help="seed for all randomness (default 42)")


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(raw: str, like: object) -> object:
    if isinstance(like, bool):
        lowered = raw.lower()
        if lowered in _BOOL_TRUE:
            return True
        if lowered in _BOOL_FALSE:
            return False
        raise DataError(f"cannot read {raw!r} as a boolean")
    if isinstance(like, int):
        return int(raw)
    if isinstance(like, float):
        return float(raw)
    return raw


def _resolve(args: argparse.Namespace, defaults: dict[str, object]) -> argparse.Namespace:
    """Fill unset options from the config file, then from hard defaults."""
    config = _load_config(args.config) if getattr(args, "config", None) else {}
    for dest, default in defaults.items():
        if getattr(args, dest, None) is not None:
            continue
        if dest in config:
            setattr(args, dest, _coerce(config[dest], default))
        else:
            setattr(args, dest, default)
    if getattr(args, "threads", None) is None:
        env = os.environ.get("CATENAE_THREADS")
        args.threads = int(env) if env else (os.cpu_count() or 1)
    if args.threads < 1:
        raise ParameterError(f"--threads must be >= 1, got {args.threads}")
    if getattr(args, "seed", None) is None:
        args.seed = 42
    return args


def _pmap(fn: Callable, items: Sequence, threads: int) -> list:
    """Order-preserving parallel map; results never depend on thread count."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _open_out(args: argparse.Namespace):
    if args.out:
        return open(args.out, "w", encoding="utf-8", newline="\n")
    return None


def _emit(args: argparse.Namespace, write: Callable[[TextIO], None]) -> None:
    handle = _open_out(args)
    if handle is None:
        write(sys.stdout)
        sys.stdout.flush()
    else:
        with handle:
            write(handle)


def _load_stopwords(spec: str) -> frozenset[str] | None:
    if spec == "none":
        return None
    if spec == "default":
        return text.default_stopwords()
    return text.load_wordlist(spec)


def _load_annotation_dir(path: str, docs: dict[str, text.Document] | None) -> dict[str, text.AnnotationSet]:
    root = Path(path)
    if not root.is_dir():
        raise DataError(f"annotations path is not a directory: {path}")
    out: dict[str, text.AnnotationSet] = {}
    for tsv in sorted(root.glob("*.tsv")):
        doc = docs.get(tsv.stem) if docs else None
        out[tsv.stem] = text.load_annotations(tsv, doc)
    return out


def _read_index(path: str) -> retrieval.InvertedIndex:
    index_file = Path(path) / "index.json"
    if not index_file.is_file():
        raise DataError(f"no index.json under {path}")
    return retrieval.InvertedIndex.from_json(index_file.read_text(encoding="utf-8"))


def _query_terms(raw: str) -> list[str]:
    return [t.normalized for t in text.tokenize(raw)]


# --- subcommand implementations ---------------------------------------------

def _cmd_index(args: argparse.Namespace) -> int:
    _resolve(args, {"stopwords": "none"})
    corpus = text.load_corpus(args.corpus)
    index = retrieval.build_index(corpus, _load_stopwords(args.stopwords))
    out_dir = Path(args.index_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "index.json").write_text(index.to_json() + "\n", encoding="utf-8")
    sys.stderr.write(f"indexed {index.doc_count} documents, {len(index.postings)} terms\n")
    return 0


def _cmd_search(args: argparse.Namespace) -> int:
    _resolve(args, {"k1": retrieval.DEFAULT_K1, "b": retrieval.DEFAULT_B,
                    "top": 1000, "qid": "q1", "tag": "bm25"})
    index = _read_index(args.index)
    queries: list[tuple[str, str]] = []
    if args.queries:
        for lineno, line in enumerate(Path(args.queries).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            if "\t" not in line:
                raise DataError(f"{args.queries}:{lineno}: expected qid<TAB>query")
            qid, _, query = line.partition("\t")
            queries.append((qid.strip(), query.strip()))
    if args.query is not None:
        queries.append((args.qid, args.query))
    if not queries:
        raise ParameterError("provide --query or --queries")

    runs = []
    for qid, raw in queries:
        run = retrieval.score_baseline(
            _query_terms(raw), index, k1=args.k1, b=args.b, query_id=qid, tag=args.tag
        )
        runs.append(retrieval.RankedRun(qid, run.entries[: args.top], run.tag))
    _emit(args, lambda out: retrieval.write_run(runs, out))
    return 0


_METRIC_NAMES = ("p", "precision", "bpref", "mrr", "ndcg", "err", "kendall")


def _parse_metric(spec: str) -> tuple[str, int | None]:
    name, _, depth = spec.partition("@")
    name = name.lower()
    if name not in _METRIC_NAMES:
        raise ParameterError(f"unknown metric {spec!r}")
    if depth:
        try:
            k = int(depth)
        except ValueError:
            raise ParameterError(f"bad metric depth in {spec!r}") from None
        return name, k
    if name in ("p", "precision", "ndcg", "err"):
        raise ParameterError(f"metric {name!r} needs a depth, e.g. {name}@10")
    return name, None


def _cmd_eval(args: argparse.Namespace) -> int:
    _resolve(args, {})
    name, k = _parse_metric(args.metric)
    runs = retrieval.parse_run_file(args.run)
    if name == "kendall":
        if not args.compare_run:
            raise ParameterError("--metric kendall needs --compare-run")
        other = {r.query_id: r for r in retrieval.parse_run_file(args.compare_run)}
        rows = []
        for run in sorted(runs, key=lambda r: r.query_id):
            reference = other.get(run.query_id)
            if reference is None:
                sys.stderr.write(f"warning: no comparison run for query {run.query_id}; skipped\n")
                continue
            shared = set(run.doc_ids) & set(reference.doc_ids)
            order_a = [d for d in run.doc_ids if d in shared]
            order_b = [d for d in reference.doc_ids if d in shared]
            rows.append((run.query_id, retrieval.kendall_tau(order_a, order_b)))
    else:
        if not args.qrels:
            raise ParameterError("--qrels is required for this metric")
        qrels = retrieval.parse_qrels_file(args.qrels)
        compute = {
            "p": lambda r: retrieval.precision_at_k(r, qrels, k),
            "precision": lambda r: retrieval.precision_at_k(r, qrels, k),
            "bpref": lambda r: retrieval.bpref(r, qrels),
            "mrr": lambda r: retrieval.mrr(r, qrels),
            "ndcg": lambda r: retrieval.ndcg_at_k(r, qrels, k),
            "err": lambda r: retrieval.err_at_k(r, qrels, k),
        }[name]
        rows = []
        for run in sorted(runs, key=lambda r: r.query_id):
            try:
                rows.append((run.query_id, compute(run)))
            except retrieval.UndefinedMetricError as exc:
                sys.stderr.write(f"warning: {exc}; query skipped\n")
    if not rows:
        raise DataError("metric undefined for every query")

    def write(out: TextIO) -> None:
        for qid, value in rows:
            out.write(f"{qid}\t{args.metric}\t{value:.6f}\n")
        mean = sum(v for _, v in rows) / len(rows)
        out.write(f"all\t{args.metric}\t{mean:.6f}\n")

    _emit(args, write)
    return 0


def _cmd_weigh(args: argparse.Namespace) -> int:
    _resolve(args, {
        "window": graphrank.DEFAULT_WINDOW,
        "damping": graphrank.DEFAULT_DAMPING,
        "tol": graphrank.DEFAULT_TOL,
        "max_iter": graphrank.DEFAULT_MAX_ITER,
        "directed": False,
        "centrality": "pagerank",
    })
    corpus = text.load_corpus(args.corpus)
    annotations: dict[str, text.AnnotationSet] = {}
    if args.directed:
        if not args.annotations:
            raise ParameterError("--directed requires --annotations")
        annotations = _load_annotation_dir(args.annotations, {d.doc_id: d for d in corpus})
    mode = "directed-by-annotation" if args.directed else "undirected"

    def weigh(doc: text.Document):
        graph = graphrank.build_word_graph(doc, args.window, mode, annotations.get(doc.doc_id))
        if not graph.vertices:
            return doc.doc_id, []
        ranked = graphrank.rank_vertices(
            graph, args.damping, args.tol, args.max_iter, args.centrality
        )
        ordered = sorted(ranked.weights.items(), key=lambda item: (-item[1], item[0]))
        return doc.doc_id, ordered

    results = _pmap(weigh, corpus, args.threads)

    def write(out: TextIO) -> None:
        for doc_id, ordered in results:
            for term, weight in ordered:
                out.write(f"{doc_id}\t{term}\t{weight:.10g}\n")

    _emit(args, write)
    return 0


def _cmd_comp(args: argparse.Namespace) -> int:
    _resolve(args, {
        "model": "kl",
        "metric": "spearman",
        "k": comp.DEFAULT_TOP_K,
        "epsilon": comp.DEFAULT_EPSILON,
        "window": 5,
        "weighting": "tf",
        "aggregate": "mean",
        "stopwords": "default",
    })
    if args.model not in ("kl", "rank"):
        raise ParameterError(f"--model must be kl or rank, got {args.model!r}")
    corpus = text.load_corpus(args.corpus)
    synonyms = text.load_synonyms(args.synonyms)
    stopwords = _load_stopwords(args.stopwords) or frozenset()
    phrases = []
    for line in Path(args.phrases).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            phrases.append(tuple(line.lower().split()))

    failures = 0
    rows: list[tuple[str, float]] = []
    for phrase in phrases:
        try:
            if args.model == "kl":
                result = comp.compositionality_kl(
                    phrase, corpus, synonyms, args.window,
                    epsilon=args.epsilon, aggregator=args.aggregate, stopwords=stopwords,
                )
            else:
                result = comp.compositionality_rank(
                    phrase, corpus, synonyms, args.window,
                    k=args.k, metric=args.metric, weighting=args.weighting,
                    aggregator=args.aggregate, stopwords=stopwords,
                )
            rows.append((" ".join(phrase), result.score))
        except DataError as exc:
            failures += 1
            sys.stderr.write(f"error: {' '.join(phrase)}: {exc}\n")

    def write(out: TextIO) -> None:
        for phrase_text, score in rows:
            out.write(f"{phrase_text}\t{args.model}\t{score:.10g}\n")

    _emit(args, write)
    return 2 if failures else 0


def _cmd_rerank_rst(args: argparse.Namespace) -> int:
    _resolve(args, {
        "lam": 0.5,
        "cutoff": rhetoric.DEFAULT_CUTOFF,
        "per_query": False,
        "tag": None,
    })
    docs = None
    if args.corpus:
        docs = {d.doc_id: d for d in text.load_corpus(args.corpus)}
    annotations = _load_annotation_dir(args.annotations, docs)
    runs = retrieval.parse_run_file(args.run)
    reranked = []
    if args.per_query:
        for run in runs:
            stats = rhetoric.relation_stats(run, annotations, args.cutoff)
            reranked.append(rhetoric.rerank_rhetorical(run, annotations, stats, args.lam, args.tag))
    else:
        stats = rhetoric.relation_stats(runs, annotations, args.cutoff)
        for run in runs:
            reranked.append(rhetoric.rerank_rhetorical(run, annotations, stats, args.lam, args.tag))
    _emit(args, lambda out: retrieval.write_run(reranked, out))
    return 0


def _cmd_coherence(args: argparse.Namespace) -> int:
    _resolve(args, {
        "mode": "transition",
        "shuffles": 20,
        "unweighted": False,
    })
    if args.mode not in ("entropy", "transition", "projection", "direct"):
        raise ParameterError(f"unknown coherence mode {args.mode!r}")
    if args.shuffles < 1:
        raise ParameterError(f"--shuffles must be >= 1, got {args.shuffles}")
    corpus = text.load_corpus(args.corpus)
    annotations = _load_annotation_dir(args.annotations, {d.doc_id: d for d in corpus})
    weighted = not args.unweighted

    def score_doc(doc: text.Document):
        ann = annotations.get(doc.doc_id)
        if ann is None:
            sys.stderr.write(f"warning: no annotations for {doc.doc_id}; empty grid\n")
            ann = text.AnnotationSet()
        grid = entitygrid.build_grid(doc, ann)
        if args.mode in ("entropy", "transition"):
            mode = "symbol" if args.mode == "entropy" else "transition"
            score = entitygrid.doc_coherence_entropy(grid, mode, weighted).value
        else:
            score = bipartite.coherence_score_bipartite(grid, args.mode)
        if len(doc.sentences) < 3:
            accuracy = None
        else:
            accuracy = entitygrid.reorder_eval(
                doc, ann, args.shuffles, args.seed, mode="transition", weighted=weighted
            )
        return doc.doc_id, score, accuracy

    results = _pmap(score_doc, corpus, args.threads)

    def write(out: TextIO) -> None:
        for doc_id, score, accuracy in results:
            acc = "na" if accuracy is None else f"{accuracy:.6f}"
            out.write(f"{doc_id}\t{score:.10g}\t{acc}\n")

    _emit(args, write)
    return 0


def _cmd_fuse(args: argparse.Namespace) -> int:
    _resolve(args, {})
    raw = args.tree
    if not raw.lstrip().startswith("{"):
        raw = Path(raw).read_text(encoding="utf-8")
    opinion = slogic.fuse(slogic.load_fusion_tree(raw))
    payload = {
        "b": opinion.b,
        "d": opinion.d,
        "u": opinion.u,
        "a": opinion.a,
        "expectation": slogic.expectation(opinion),
    }
    _emit(args, lambda out: out.write(json.dumps(payload, sort_keys=True) + "\n"))
    return 0


def _cmd_difficulty(args: argparse.Namespace) -> int:
    _resolve(args, {"qid": "q1", "base_rate": 0.5, "no_scale": False})
    index = _read_index(args.index)
    u = slogic.query_difficulty(
        _query_terms(args.query), index, a=args.base_rate, scale_evidence=not args.no_scale
    )
    _emit(args, lambda out: out.write(f"{args.qid}\t{u:.10g}\n"))
    return 0


def _cmd_graph_dump(args: argparse.Namespace) -> int:
    _resolve(args, {"format": "dot", "projection": "none"})
    if args.format != "dot":
        raise ParameterError(f"unknown graph format {args.format!r}")
    corpus = text.load_corpus(args.corpus)
    annotations = _load_annotation_dir(args.annotations, {d.doc_id: d for d in corpus})

    def write(out: TextIO) -> None:
        for doc in corpus:
            ann = annotations.get(doc.doc_id, text.AnnotationSet())
            grid = entitygrid.build_grid(doc, ann)
            g = bipartite.grid_to_bipartite(grid)
            if args.projection == "none":
                out.write(bipartite.to_dot(g, doc.doc_id) + "\n")
            else:
                projected = bipartite.project(g, args.projection)
                out.write(bipartite.projection_to_dot(projected, f"{doc.doc_id}-{args.projection}") + "\n")

    _emit(args, write)
    return 0


# --- parser assembly ---------------------------------------------------------

def build_parser() -> Parser:
    parser = Parser(prog="catenae", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = subs.add_parser("index", help="build an inverted index from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--index-dir", required=True, help="directory for index.json")
    p.add_argument("--stopwords", help="none (default), default, or a word list path")
    _add_common(p)
    p.set_defaults(func=_cmd_index)

    p = subs.add_parser("search", help="BM25 search over a built index")
    p.add_argument("--index", required=True)
    p.add_argument("--query")
    p.add_argument("--queries", help="TSV file of qid<TAB>query")
    p.add_argument("--qid")
    p.add_argument("--k1", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--top", type=int)
    p.add_argument("--tag")
    _add_common(p)
    p.set_defaults(func=_cmd_search)

    p = subs.add_parser("eval", help="evaluate a TREC run against qrels")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels")
    p.add_argument("--metric", required=True, help="p@K, bpref, mrr, ndcg@K, err@K, kendall")
    p.add_argument("--compare-run", help="second run for --metric kendall")
    _add_common(p)
    p.set_defaults(func=_cmd_eval)

    p = subs.add_parser("weigh", help="graph-of-words term weights per document")
    p.add_argument("--corpus", required=True)
    p.add_argument("--window", type=int)
    p.add_argument("--damping", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--directed", action="store_const", const=True)
    p.add_argument("--annotations", help="directory of <doc_id>.tsv with mod records")
    p.add_argument("--centrality", choices=graphrank.CENTRALITIES)
    _add_common(p)
    p.set_defaults(func=_cmd_weigh)

    p = subs.add_parser("comp", help="compositionality scores for a phrase file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--phrases", required=True, help="one phrase per line, terms space-separated")
    p.add_argument("--synonyms", required=True)
    p.add_argument("--model", help="kl or rank")
    p.add_argument("--metric", choices=comp.ASSOCIATION_METRICS)
    p.add_argument("--k", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--window", type=int)
    p.add_argument("--weighting", choices=comp.WEIGHTINGS)
    p.add_argument("--aggregate", choices=comp.AGGREGATORS)
    p.add_argument("--stopwords")
    _add_common(p)
    p.set_defaults(func=_cmd_comp)

    p = subs.add_parser("rerank-rst", help="re-rank a run by rhetorical relation probabilities")
    p.add_argument("--run", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--per-query", action="store_const", const=True)
    p.add_argument("--corpus", help="optional, for span bounds validation")
    p.add_argument("--tag")
    _add_common(p)
    p.set_defaults(func=_cmd_rerank_rst)

    p = subs.add_parser("coherence", help="coherence scores and reordering accuracy")
    p.add_argument("--corpus", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--mode", help="entropy, transition, projection, or direct")
    p.add_argument("--shuffles", type=int)
    p.add_argument("--unweighted", action="store_const", const=True)
    _add_common(p)
    p.set_defaults(func=_cmd_coherence)

    p = subs.add_parser("fuse", help="evaluate a subjective-logic fusion tree")
    p.add_argument("--tree", required=True, help="JSON text or a path to it")
    _add_common(p)
    p.set_defaults(func=_cmd_fuse)

    p = subs.add_parser("difficulty", help="subjective-logic query difficulty")
    p.add_argument("--query", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--qid")
    p.add_argument("--base-rate", type=float)
    p.add_argument("--no-scale", action="store_const", const=True)
    _add_common(p)
    p.set_defaults(func=_cmd_difficulty)

    p = subs.add_parser("graph", help="graph inspection utilities")
    graph_subs = p.add_subparsers(dest="graph_command", required=True, parser_class=Parser)
    dump = graph_subs.add_parser("dump", help="emit sentence-entity graphs as Graphviz text")
    dump.add_argument("--corpus", required=True)
    dump.add_argument("--annotations", required=True)
    dump.add_argument("--format")
    dump.add_argument("--projection", choices=("none", "sentences", "entities"))
    _add_common(dump)
    dump.set_defaults(func=_cmd_graph_dump)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except ParameterError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except DataError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
