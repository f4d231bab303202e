"""Compositionality detection through synonym perturbation.

A phrase that resists synonym substitution ("red tape" is not "crimson
tape") binds its words more strongly than co-occurrence counts suggest.
Two scorers quantify that resistance:

* the KL model compares the context-term probability distribution of the
  phrase against the distributions of its one-word-substituted variants;
* the ranked-list model compares only the top-k context terms by weight,
  using a distance or correlation between the two rankings.

Both emit scores where higher means stronger (less compositional) binding.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .errors import (
    DomainError,
    InsufficientEvidenceError,
    NoOccurrenceError,
    ParameterError,
    UndefinedMetricError,
)
from .text import Document, default_stopwords

DEFAULT_EPSILON = 1e-6
DEFAULT_TOP_K = 50

ASSOCIATION_METRICS = ("pearson", "spearman", "kendall", "jaccard", "overlap")
WEIGHTINGS = ("tf", "tf-idf")
AGGREGATORS = ("mean", "max")


@dataclass(frozen=True)
class DistProfile:
    """Probability distribution over the context terms of a phrase."""

    phrase: tuple[str, ...]
    dist: Mapping[str, float]
    support_count: int

    @classmethod
    def from_counts(cls, phrase: Sequence[str], counts: Mapping[str, int]) -> "DistProfile":
        total = sum(counts.values())
        dist = {t: c / total for t, c in counts.items()} if total else {}
        return cls(phrase=tuple(phrase), dist=dist, support_count=total)


@dataclass(frozen=True)
class RankedList:
    """Top context terms of a phrase, sorted weight-descending.

    Ties are broken lexicographically so identical inputs always produce
    identical lists.
    """

    phrase: tuple[str, ...]
    entries: tuple[tuple[str, float], ...]

    @property
    def terms(self) -> tuple[str, ...]:
        return tuple(term for term, _ in self.entries)


@dataclass(frozen=True)
class CompScore:
    """A phrase's compositionality score with its per-perturbation values."""

    phrase: tuple[str, ...]
    score: float
    per_perturbation: tuple[tuple[tuple[str, ...], float], ...]


def _context_counts(
    phrase: Sequence[str],
    corpus: Sequence[Document],
    window: int,
    stopwords: frozenset[str],
) -> Counter:
    """Count context terms within ``window`` tokens of each phrase occurrence.

    The phrase must occur as contiguous tokens.  Context excludes the
    phrase's own terms and stopwords; one count per (occurrence, slot).
    """
    if len(phrase) < 1:
        raise ParameterError("phrase must have at least one term")
    if window < 1:
        raise ParameterError(f"window must be >= 1, got {window}")
    phrase = tuple(phrase)
    excluded = set(phrase)
    counts: Counter = Counter()
    for doc in corpus:
        terms = doc.terms
        n = len(terms)
        span = len(phrase)
        for start in range(n - span + 1):
            if terms[start:start + span] != phrase:
                continue
            end = start + span - 1
            lo = max(0, start - window)
            for ctx in terms[lo:start]:
                if ctx not in excluded and ctx not in stopwords:
                    counts[ctx] += 1
            for ctx in terms[end + 1:end + 1 + window]:
                if ctx not in excluded and ctx not in stopwords:
                    counts[ctx] += 1
    return counts


def build_profile(
    phrase: Sequence[str],
    corpus: Sequence[Document],
    window: int,
    stopwords: frozenset[str] | None = None,
) -> DistProfile:
    """Distributional profile of a contiguous phrase over a corpus.

    A phrase with no occurrences yields an empty profile with
    ``support_count == 0``; callers decide whether that is an error.
    """
    if stopwords is None:
        stopwords = default_stopwords()
    counts = _context_counts(phrase, corpus, window, stopwords)
    return DistProfile.from_counts(phrase, counts)


def phrase_occurrences(phrase: Sequence[str], corpus: Sequence[Document]) -> int:
    """Number of contiguous occurrences of ``phrase`` across the corpus."""
    phrase = tuple(phrase)
    if not phrase:
        raise ParameterError("phrase must have at least one term")
    span = len(phrase)
    count = 0
    for doc in corpus:
        terms = doc.terms
        for start in range(len(terms) - span + 1):
            if terms[start:start + span] == phrase:
                count += 1
    return count


def perturb(
    phrase: Sequence[str],
    synonyms: Mapping[str, Sequence[str]],
) -> list[tuple[str, ...]]:
    """All single-position synonym substitutions of ``phrase``.

    Ordered by position, then by synonym file order.  An empty result
    means the phrase cannot be assessed with this lexicon.
    """
    phrase = tuple(phrase)
    out: list[tuple[str, ...]] = []
    for i, term in enumerate(phrase):
        for syn in synonyms.get(term, ()):
            out.append(phrase[:i] + (syn,) + phrase[i + 1:])
    return out


def kl_divergence(p: DistProfile, q: DistProfile, epsilon: float = DEFAULT_EPSILON) -> float:
    """KL divergence D(p || q) in bits, with additive smoothing on q.

    q gets ``epsilon`` added on the union vocabulary and is renormalized,
    so the result is finite even where q has no mass.  Exactly 0 when the
    two distributions are pointwise equal before smoothing.
    """
    if epsilon <= 0.0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    if p.support_count < 1 or not p.dist:
        raise DomainError("KL divergence needs a non-empty p distribution")
    if dict(p.dist) == dict(q.dist):
        return 0.0
    vocab = set(p.dist) | set(q.dist)
    z = 1.0 + epsilon * len(vocab)
    total = 0.0
    for term, p_t in p.dist.items():
        if p_t == 0.0:
            continue
        q_t = (q.dist.get(term, 0.0) + epsilon) / z
        total += p_t * math.log2(p_t / q_t)
    return max(total, 0.0)


def _aggregate(values: Sequence[float], aggregator: str) -> float:
    if aggregator not in AGGREGATORS:
        raise ParameterError(f"unknown aggregator {aggregator!r}")
    return max(values) if aggregator == "max" else sum(values) / len(values)


def compositionality_kl(
    phrase: Sequence[str],
    corpus: Sequence[Document],
    synonyms: Mapping[str, Sequence[str]],
    window: int,
    epsilon: float = DEFAULT_EPSILON,
    aggregator: str = "mean",
    stopwords: frozenset[str] | None = None,
) -> CompScore:
    """Mean KL divergence between a phrase's profile and its perturbations'.

    Perturbations without corpus support are skipped; if none has support
    the phrase cannot be assessed and an error is raised.
    """
    phrase = tuple(phrase)
    if phrase_occurrences(phrase, corpus) < 1:
        raise NoOccurrenceError(f"phrase {' '.join(phrase)!r} never occurs in the corpus")
    original = build_profile(phrase, corpus, window, stopwords)
    if original.support_count < 1:
        raise DomainError(f"phrase {' '.join(phrase)!r} occurs but has no context evidence")
    values: list[tuple[tuple[str, ...], float]] = []
    for variant in perturb(phrase, synonyms):
        profile = build_profile(variant, corpus, window, stopwords)
        if profile.support_count < 1:
            continue
        values.append((variant, kl_divergence(original, profile, epsilon)))
    if not values:
        raise InsufficientEvidenceError(
            f"no perturbation of {' '.join(phrase)!r} has corpus support"
        )
    score = _aggregate([v for _, v in values], aggregator)
    return CompScore(phrase=phrase, score=score, per_perturbation=tuple(values))


def ranked_profile(
    phrase: Sequence[str],
    corpus: Sequence[Document],
    window: int,
    k: int = DEFAULT_TOP_K,
    weighting: str = "tf",
    stopwords: frozenset[str] | None = None,
) -> RankedList:
    """Top-k context terms of a phrase by term weight.

    ``tf`` weighs by raw context count; ``tf-idf`` multiplies by
    ``ln((N+1)/(df+0.5))`` over the corpus document frequencies.
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if weighting not in WEIGHTINGS:
        raise ParameterError(f"unknown weighting {weighting!r}")
    if stopwords is None:
        stopwords = default_stopwords()
    counts = _context_counts(phrase, corpus, window, stopwords)
    if not counts:
        return RankedList(phrase=tuple(phrase), entries=())
    if weighting == "tf":
        weights = {t: float(c) for t, c in counts.items()}
    else:
        n_docs = len(corpus)
        df: Counter = Counter()
        for doc in corpus:
            for term in set(doc.terms):
                if term in counts:
                    df[term] += 1
        weights = {
            t: c * math.log((n_docs + 1) / (df[t] + 0.5)) for t, c in counts.items()
        }
    ordered = sorted(weights.items(), key=lambda item: (-item[1], item[0]))
    return RankedList(phrase=tuple(phrase), entries=tuple(ordered[:k]))


def _union_vectors(l1: RankedList, l2: RankedList) -> tuple[list[str], np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Align two ranked lists on their term union.

    Absent terms get rank ``|union| + 1`` and weight 0, so every list maps
    to comparable rank and weight vectors.
    """
    union = sorted(set(l1.terms) | set(l2.terms))
    sentinel = len(union) + 1
    rank1 = {term: i + 1 for i, term in enumerate(l1.terms)}
    rank2 = {term: i + 1 for i, term in enumerate(l2.terms)}
    w1 = dict(l1.entries)
    w2 = dict(l2.entries)
    r1 = np.array([rank1.get(t, sentinel) for t in union], dtype=float)
    r2 = np.array([rank2.get(t, sentinel) for t in union], dtype=float)
    v1 = np.array([w1.get(t, 0.0) for t in union], dtype=float)
    v2 = np.array([w2.get(t, 0.0) for t in union], dtype=float)
    return union, r1, r2, v1, v2


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xd = x - x.mean()
    yd = y - y.mean()
    denom = math.sqrt(float(xd @ xd)) * math.sqrt(float(yd @ yd))
    if denom == 0.0:
        raise UndefinedMetricError("correlation undefined for a zero-variance vector")
    return float(xd @ yd) / denom


def list_association(l1: RankedList, l2: RankedList, metric: str) -> float:
    """Association between two ranked lists.

    ``pearson`` correlates the aligned weight vectors; ``spearman`` and
    ``kendall`` the aligned rank vectors (kendall is tau-b, so the shared
    sentinel rank of absent terms is handled as ties); ``jaccard`` and
    ``overlap`` compare the raw term sets. ``overlap`` divides the
    intersection by the longer list's length so it stays symmetric.
    """
    if metric not in ASSOCIATION_METRICS:
        raise ParameterError(f"unknown association metric {metric!r}")
    if not l1.entries and not l2.entries:
        raise UndefinedMetricError("both ranked lists are empty")

    if metric == "jaccard":
        s1, s2 = set(l1.terms), set(l2.terms)
        return len(s1 & s2) / len(s1 | s2)
    if metric == "overlap":
        s1, s2 = set(l1.terms), set(l2.terms)
        return len(s1 & s2) / max(len(s1), len(s2))

    _, r1, r2, v1, v2 = _union_vectors(l1, l2)
    if metric == "pearson":
        return _pearson(v1, v2)
    if metric == "spearman":
        return _pearson(r1, r2)
    tau = stats.kendalltau(r1, r2).statistic
    if math.isnan(tau):
        raise UndefinedMetricError("kendall tau undefined (all pairs tied)")
    return float(tau)


def compositionality_rank(
    phrase: Sequence[str],
    corpus: Sequence[Document],
    synonyms: Mapping[str, Sequence[str]],
    window: int,
    k: int = DEFAULT_TOP_K,
    metric: str = "spearman",
    weighting: str = "tf",
    aggregator: str = "mean",
    stopwords: frozenset[str] | None = None,
) -> CompScore:
    """Ranked-list compositionality: per-perturbation distance = 1 - association.

    Shares the KL model's polarity (higher score = less compositional) and
    its handling of unsupported phrases and perturbations.
    """
    phrase = tuple(phrase)
    if phrase_occurrences(phrase, corpus) < 1:
        raise NoOccurrenceError(f"phrase {' '.join(phrase)!r} never occurs in the corpus")
    original = ranked_profile(phrase, corpus, window, k, weighting, stopwords)
    if not original.entries:
        raise DomainError(f"phrase {' '.join(phrase)!r} occurs but has no context evidence")
    values: list[tuple[tuple[str, ...], float]] = []
    for variant in perturb(phrase, synonyms):
        ranked = ranked_profile(variant, corpus, window, k, weighting, stopwords)
        if not ranked.entries:
            continue
        values.append((variant, 1.0 - list_association(original, ranked, metric)))
    if not values:
        raise InsufficientEvidenceError(
            f"no perturbation of {' '.join(phrase)!r} has corpus support"
        )
    score = _aggregate([v for _, v in values], aggregator)
    return CompScore(phrase=phrase, score=score, per_perturbation=tuple(values))
