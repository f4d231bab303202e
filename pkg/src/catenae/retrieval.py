"""Minimal retrieval harness: inverted index, BM25 baseline, TREC-format
runs and qrels, and the effectiveness metrics used to evaluate the models.

All metrics follow their standard definitions; each has an independent
brute-force reference in the test suite that it must match exactly on
random small instances.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TextIO

from .errors import DataError, DomainError, ParameterError, ParseError, UndefinedMetricError
from .text import Document

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


@dataclass(frozen=True)
class InvertedIndex:
    """Postings per term plus document lengths.

    ``doc_lengths`` always counts every token of a document, regardless of
    any stopword filter applied to the postings, so BM25's length
    normalization stays standard while models choose their own filtering.
    """

    postings: Mapping[str, tuple[tuple[str, int], ...]]
    doc_lengths: Mapping[str, int]
    doc_count: int

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    @property
    def avg_doc_length(self) -> float:
        if self.doc_count == 0:
            return 0.0
        return sum(self.doc_lengths.values()) / self.doc_count

    def to_json(self) -> str:
        payload = {
            "doc_count": self.doc_count,
            "doc_lengths": dict(sorted(self.doc_lengths.items())),
            "postings": {t: list(map(list, p)) for t, p in sorted(self.postings.items())},
        }
        return json.dumps(payload, sort_keys=True, indent=None, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "InvertedIndex":
        payload = json.loads(text)
        postings = {
            term: tuple((doc, int(tf)) for doc, tf in plist)
            for term, plist in payload["postings"].items()
        }
        return cls(
            postings=postings,
            doc_lengths={d: int(n) for d, n in payload["doc_lengths"].items()},
            doc_count=int(payload["doc_count"]),
        )


@dataclass(frozen=True)
class RankedRun:
    """One query's ranking: (doc_id, score) pairs in emission order."""

    query_id: str
    entries: tuple[tuple[str, float], ...]
    tag: str = "catenae"

    def __post_init__(self) -> None:
        docs = [doc for doc, _ in self.entries]
        if len(docs) != len(set(docs)):
            raise ParameterError(f"duplicate doc_id in run for query {self.query_id!r}")

    @property
    def doc_ids(self) -> tuple[str, ...]:
        return tuple(doc for doc, _ in self.entries)

    def rank_of(self, doc_id: str) -> int | None:
        for rank, (doc, _) in enumerate(self.entries, start=1):
            if doc == doc_id:
                return rank
        return None


@dataclass(frozen=True)
class Qrels:
    """Graded relevance judgements keyed by (query_id, doc_id)."""

    grades: Mapping[tuple[str, str], int]

    def __post_init__(self) -> None:
        for (qid, doc), grade in self.grades.items():
            if grade < 0:
                raise ParameterError(f"negative grade for ({qid}, {doc})")

    def judged(self, query_id: str) -> dict[str, int]:
        return {doc: g for (qid, doc), g in self.grades.items() if qid == query_id}

    def query_ids(self) -> list[str]:
        return sorted({qid for qid, _ in self.grades})


def build_index(corpus: Iterable[Document], stopwords: frozenset[str] | None = None) -> InvertedIndex:
    """Single-pass index build; duplicate doc ids are an error."""
    postings: dict[str, list[tuple[str, int]]] = {}
    lengths: dict[str, int] = {}
    for doc in corpus:
        if doc.doc_id in lengths:
            raise DataError(f"duplicate doc_id {doc.doc_id!r}")
        lengths[doc.doc_id] = len(doc.tokens)
        counts = Counter(
            t.normalized
            for t in doc.tokens
            if stopwords is None or t.normalized not in stopwords
        )
        for term, tf in counts.items():
            postings.setdefault(term, []).append((doc.doc_id, tf))
    frozen = {term: tuple(sorted(plist)) for term, plist in postings.items()}
    return InvertedIndex(postings=frozen, doc_lengths=lengths, doc_count=len(lengths))


def score_baseline(
    query_terms: Sequence[str],
    index: InvertedIndex,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
    query_id: str = "q1",
    tag: str = "bm25",
) -> RankedRun:
    """BM25 ranking of the documents containing at least one query term.

    Uses idf = ln(1 + (N - df + 0.5)/(df + 0.5)), which never goes
    negative.  Ties are broken by ascending doc_id.
    """
    if index.doc_count == 0:
        raise DomainError("cannot score against an empty index")
    if k1 < 0 or not 0.0 <= b <= 1.0:
        raise ParameterError(f"bad BM25 parameters k1={k1}, b={b}")
    avg = index.avg_doc_length
    scores: dict[str, float] = {}
    for term in dict.fromkeys(query_terms):
        plist = index.postings.get(term)
        if not plist:
            continue
        df = len(plist)
        idf = math.log(1.0 + (index.doc_count - df + 0.5) / (df + 0.5))
        for doc_id, tf in plist:
            norm = k1 * (1.0 - b + b * index.doc_lengths[doc_id] / avg)
            scores[doc_id] = scores.get(doc_id, 0.0) + idf * tf * (k1 + 1.0) / (tf + norm)
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return RankedRun(query_id=query_id, entries=tuple(ordered), tag=tag)


def _binary_relevant(judged: Mapping[str, int]) -> set[str]:
    return {doc for doc, grade in judged.items() if grade > 0}


def _require_judged(run: RankedRun, qrels: Qrels) -> dict[str, int]:
    judged = qrels.judged(run.query_id)
    if not judged:
        raise UndefinedMetricError(f"no judgements for query {run.query_id!r}")
    return judged


def precision_at_k(run: RankedRun, qrels: Qrels, k: int) -> float:
    """Fraction of the top k that is relevant (grade > 0)."""
    if k <= 0:
        raise ParameterError(f"k must be positive, got {k}")
    judged = _require_judged(run, qrels)
    relevant = _binary_relevant(judged)
    hits = sum(1 for doc in run.doc_ids[:k] if doc in relevant)
    return hits / k


def mrr(run: RankedRun, qrels: Qrels) -> float:
    """Reciprocal rank of the first relevant document; 0 if none retrieved."""
    judged = _require_judged(run, qrels)
    relevant = _binary_relevant(judged)
    for rank, doc in enumerate(run.doc_ids, start=1):
        if doc in relevant:
            return 1.0 / rank
    return 0.0


def bpref(run: RankedRun, qrels: Qrels) -> float:
    """Binary preference over judged documents (the trec_eval formulation).

    Counts, for each retrieved judged-relevant document, the judged
    non-relevant documents ranked above it, capped at min(R, N); unjudged
    documents are invisible.  0 when the query has no judged relevant
    documents.
    """
    judged = _require_judged(run, qrels)
    relevant = _binary_relevant(judged)
    nonrelevant = set(judged) - relevant
    r_total, n_total = len(relevant), len(nonrelevant)
    if r_total == 0:
        return 0.0
    denom = min(r_total, n_total)
    nonrel_seen = 0
    total = 0.0
    for doc in run.doc_ids:
        if doc in nonrelevant:
            nonrel_seen += 1
        elif doc in relevant:
            if denom == 0:
                total += 1.0
            else:
                total += 1.0 - min(nonrel_seen, denom) / denom
    return total / r_total


def ndcg_at_k(run: RankedRun, qrels: Qrels, k: int) -> float:
    """Normalized DCG with 2^grade - 1 gains and log2 rank discount.

    0 when the ideal DCG is 0 (no relevant documents judged).
    """
    if k <= 0:
        raise ParameterError(f"k must be positive, got {k}")
    judged = _require_judged(run, qrels)
    dcg = 0.0
    for rank, doc in enumerate(run.doc_ids[:k], start=1):
        gain = (2 ** judged.get(doc, 0)) - 1
        dcg += gain / math.log2(rank + 1)
    ideal_gains = sorted(judged.values(), reverse=True)[:k]
    idcg = sum(((2 ** g) - 1) / math.log2(r + 1) for r, g in enumerate(ideal_gains, start=1))
    if idcg == 0.0:
        return 0.0
    return dcg / idcg


def err_at_k(run: RankedRun, qrels: Qrels, k: int) -> float:
    """Expected reciprocal rank with stopping probability (2^g - 1)/2^gmax.

    gmax is the highest grade judged for the query; all grades 0 gives 0.
    """
    if k <= 0:
        raise ParameterError(f"k must be positive, got {k}")
    judged = _require_judged(run, qrels)
    gmax = max(judged.values())
    if gmax == 0:
        return 0.0
    scale = 2 ** gmax
    err = 0.0
    continue_p = 1.0
    for rank, doc in enumerate(run.doc_ids[:k], start=1):
        stop = ((2 ** judged.get(doc, 0)) - 1) / scale
        err += continue_p * stop / rank
        continue_p *= 1.0 - stop
    return err


def kendall_tau(order_a: Sequence[str], order_b: Sequence[str]) -> float:
    """Kendall tau between two orderings of the same item set (no ties)."""
    if set(order_a) != set(order_b):
        raise ParameterError("orderings must cover the same item set")
    n = len(order_a)
    if len(set(order_a)) != n:
        raise ParameterError("orderings must not repeat items")
    if n < 2:
        raise UndefinedMetricError("kendall tau needs at least two items")
    position = {item: i for i, item in enumerate(order_b)}
    mapped = [position[item] for item in order_a]
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            if mapped[i] < mapped[j]:
                concordant += 1
            else:
                discordant += 1
    return (concordant - discordant) / (n * (n - 1) / 2)


# --- TREC interchange -------------------------------------------------------

def parse_run_file(path: str | Path) -> list[RankedRun]:
    """Parse a TREC run file into per-query runs, preserving within-query order."""
    path = Path(path)
    grouped: dict[str, list[tuple[str, float]]] = {}
    tags: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 6:
            raise ParseError("run line needs 6 whitespace-separated fields", str(path), lineno)
        qid, _, doc_id, _, score, tag = fields
        try:
            value = float(score)
        except ValueError:
            raise ParseError(f"bad score {score!r}", str(path), lineno) from None
        grouped.setdefault(qid, []).append((doc_id, value))
        tags[qid] = tag
    return [
        RankedRun(query_id=qid, entries=tuple(entries), tag=tags[qid])
        for qid, entries in grouped.items()
    ]


def write_run(runs: Iterable[RankedRun], out: TextIO) -> None:
    """Emit TREC run lines: ``qid Q0 docid rank score tag``."""
    for run in runs:
        for rank, (doc_id, score) in enumerate(run.entries, start=1):
            out.write(f"{run.query_id} Q0 {doc_id} {rank} {score:.6f} {run.tag}\n")


def parse_qrels_file(path: str | Path) -> Qrels:
    """Parse TREC qrels: ``qid 0 docid grade``."""
    path = Path(path)
    grades: dict[tuple[str, str], int] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 4:
            raise ParseError("qrels line needs 4 whitespace-separated fields", str(path), lineno)
        qid, _, doc_id, grade = fields
        try:
            grades[(qid, doc_id)] = int(grade)
        except ValueError:
            raise ParseError(f"bad grade {grade!r}", str(path), lineno) from None
    return Qrels(grades=grades)
