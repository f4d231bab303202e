"""Relation-aware re-ranking over pre-annotated rhetorical relations.

Some rhetorical relations (say, contrast or elaboration) turn out to be
retrieved far more often than others.  From a baseline run we estimate a
retrieval probability per relation label, then mix each document's mean
span probability into its baseline score.  Relations arrive from
annotation files; no discourse parsing happens here.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ParameterError
from .retrieval import RankedRun
from .text import AnnotationSet

logger = logging.getLogger(__name__)

DEFAULT_CUTOFF = 10


@dataclass(frozen=True)
class RelationStats:
    """Per-label retrieval probability and total span counts.

    Labels with no spans in the scored documents are absent from both
    maps.
    """

    p_retrieval: Mapping[str, float]
    total_spans: Mapping[str, int]

    @property
    def mean_probability(self) -> float:
        if not self.p_retrieval:
            return 0.0
        return sum(self.p_retrieval.values()) / len(self.p_retrieval)


def _as_runs(baseline: RankedRun | Iterable[RankedRun]) -> list[RankedRun]:
    if isinstance(baseline, RankedRun):
        return [baseline]
    return list(baseline)


def relation_stats(
    baseline_run: RankedRun | Iterable[RankedRun],
    annotations: Mapping[str, AnnotationSet],
    cutoff: int = DEFAULT_CUTOFF,
) -> RelationStats:
    """Estimate per-label retrieval probabilities from a baseline run.

    For each label: spans of that label in documents ranked within
    ``cutoff`` over spans of that label in all scored documents.  Multiple
    runs pool their counts (corpus-wide estimation).  Documents without an
    annotation file count as zero spans, with a warning.
    """
    if cutoff < 1:
        raise ParameterError(f"cutoff must be >= 1, got {cutoff}")
    retrieved: dict[str, int] = {}
    total: dict[str, int] = {}
    missing: set[str] = set()
    for run in _as_runs(baseline_run):
        for rank, (doc_id, _) in enumerate(run.entries, start=1):
            ann = annotations.get(doc_id)
            if ann is None:
                if doc_id not in missing:
                    missing.add(doc_id)
                    logger.warning("no annotations for doc %s; counting zero spans", doc_id)
                continue
            for label, _, _ in ann.relation_spans:
                total[label] = total.get(label, 0) + 1
                if rank <= cutoff:
                    retrieved[label] = retrieved.get(label, 0) + 1
    p = {label: retrieved.get(label, 0) / count for label, count in total.items() if count > 0}
    return RelationStats(p_retrieval=p, total_spans=total)


def _doc_relation_score(
    ann: AnnotationSet | None,
    stats: RelationStats,
) -> float:
    fallback = stats.mean_probability
    if ann is None or not ann.relation_spans:
        return fallback
    values = [stats.p_retrieval.get(label, fallback) for label, _, _ in ann.relation_spans]
    return sum(values) / len(values)


def rerank_rhetorical(
    baseline: RankedRun,
    annotations: Mapping[str, AnnotationSet],
    stats: RelationStats,
    lam: float,
    tag: str | None = None,
) -> RankedRun:
    """Interpolate relation probabilities into a baseline ranking.

    new = (1 - lam) * minmax(baseline) + lam * mean span probability.
    Documents without spans take the mean probability over observed
    labels, so unannotated text is not punished.  Ties keep the baseline
    order.  lam = 0 reproduces the baseline ordering exactly.
    """
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"lambda must be in [0, 1], got {lam}")
    if not baseline.entries:
        return RankedRun(query_id=baseline.query_id, entries=(), tag=tag or baseline.tag)
    scores = [score for _, score in baseline.entries]
    low, high = min(scores), max(scores)
    spread = high - low

    rescored = []
    for original_rank, (doc_id, score) in enumerate(baseline.entries):
        norm = (score - low) / spread if spread > 0 else 0.0
        relation = _doc_relation_score(annotations.get(doc_id), stats)
        rescored.append((doc_id, (1.0 - lam) * norm + lam * relation, original_rank))
    rescored.sort(key=lambda item: (-item[1], item[2]))
    entries = tuple((doc_id, score) for doc_id, score, _ in rescored)
    return RankedRun(query_id=baseline.query_id, entries=entries, tag=tag or f"{baseline.tag}-rst")
