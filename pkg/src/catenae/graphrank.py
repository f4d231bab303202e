"""Graph-of-words term weighting.

A document becomes a graph whose vertices are its unique terms and whose
edges carry co-occurrence counts within a fixed window.  Term weights come
from the stationary distribution of a damped random walk over this graph,
replacing raw frequency counts in retrieval scoring.  Because the graph of
a text and the graph of that text repeated are identical, the weights are
structurally free of document length bias and need no length normalization
in the scoring formula.

When modification annotations are available, edges are oriented from the
modifying term to the modified term; unannotated pairs stay bidirectional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse

from .errors import DomainError, ParameterError
from .text import AnnotationSet, Document, extract_windows

DEFAULT_DAMPING = 0.85
DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 100
DEFAULT_WINDOW = 10
DEFAULT_SATURATION = 1.0

CENTRALITIES = ("pagerank", "degree")


@dataclass(frozen=True)
class WordGraph:
    """Weighted graph over the unique terms of one document.

    Undirected graphs store each edge once under ``(min(u, v), max(u, v))``;
    directed graphs store ``(source, target)``.  A bidirectional link in a
    directed graph appears as two edges, each carrying the full folded
    co-occurrence count.  Self-loops are never stored.
    """

    vertices: frozenset[str]
    edges: Mapping[tuple[str, str], float]
    directed: bool

    def __post_init__(self) -> None:
        for (u, v), weight in self.edges.items():
            if u == v:
                raise ParameterError(f"self-loop on {u!r}")
            if weight <= 0:
                raise ParameterError(f"non-positive edge weight on ({u!r}, {v!r})")
            if u not in self.vertices or v not in self.vertices:
                raise ParameterError(f"edge ({u!r}, {v!r}) endpoint is not a vertex")
            if not self.directed and u > v:
                raise ParameterError(f"undirected edge ({u!r}, {v!r}) not in canonical order")


@dataclass(frozen=True)
class TermWeights:
    """Normalized centrality weights (they sum to 1) for every graph vertex."""

    weights: Mapping[str, float]
    iterations_used: int
    converged: bool


def build_word_graph(
    doc: Document,
    window_size: int = DEFAULT_WINDOW,
    mode: str = "undirected",
    annotations: AnnotationSet | None = None,
) -> WordGraph:
    """Build the co-occurrence graph of ``doc``.

    ``mode`` is ``"undirected"`` or ``"directed-by-annotation"``.  In the
    directed mode a pair covered by a ``mod`` annotation record gets a
    single edge from the dependent (modifier) to the head; all other pairs
    get edges in both directions.
    """
    if mode not in ("undirected", "directed-by-annotation"):
        raise ParameterError(f"unknown graph mode {mode!r}")
    directed = mode == "directed-by-annotation"
    if directed and annotations is None:
        raise ParameterError("directed-by-annotation mode requires annotations")

    pairs = extract_windows(doc, window_size)
    vertices = frozenset(t.normalized for t in doc.tokens)
    edges: dict[tuple[str, str], float] = {}

    # dependent -> head orientation for annotated pairs
    orientation: dict[tuple[str, str], tuple[str, str]] = {}
    if directed and annotations is not None:
        for head, dependent in annotations.modifications:
            key = (min(head, dependent), max(head, dependent))
            orientation[key] = (dependent, head)

    for (u, v), count in pairs.items():
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if not directed:
            edges[key] = edges.get(key, 0.0) + count
        elif key in orientation:
            edges[orientation[key]] = edges.get(orientation[key], 0.0) + count
        else:
            edges[(u, v)] = edges.get((u, v), 0.0) + count
            edges[(v, u)] = edges.get((v, u), 0.0) + count

    return WordGraph(vertices=vertices, edges=dict(edges), directed=directed)


def _transition_matrix(g: WordGraph, index: Mapping[str, int]) -> tuple[sparse.csr_matrix, np.ndarray]:
    """Row-stochastic transition matrix and the dangling-row indicator."""
    n = len(index)
    rows, cols, vals = [], [], []
    out_weight = np.zeros(n)
    directed_edges: list[tuple[int, int, float]] = []
    for (u, v), w in g.edges.items():
        ui, vi = index[u], index[v]
        directed_edges.append((ui, vi, w))
        out_weight[ui] += w
        if not g.directed:
            directed_edges.append((vi, ui, w))
            out_weight[vi] += w
    for ui, vi, w in directed_edges:
        rows.append(ui)
        cols.append(vi)
        vals.append(w / out_weight[ui])
    matrix = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    dangling = out_weight == 0.0
    return matrix, dangling


def rank_vertices(
    g: WordGraph,
    damping: float = DEFAULT_DAMPING,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    centrality: str = "pagerank",
) -> TermWeights:
    """Centrality weights for every vertex, normalized to sum 1.

    ``pagerank`` runs power iteration of the damped random walk over edge
    weights until the L1 change drops below ``tol``; mass at dangling
    vertices is redistributed uniformly.  ``degree`` returns normalized
    weighted degree (an alternative, cheaper connectivity measure).
    Non-convergence is reported through the ``converged`` flag.
    """
    if not g.vertices:
        raise DomainError("cannot rank an empty graph")
    if not 0.0 < damping < 1.0:
        raise ParameterError(f"damping must be in (0, 1), got {damping}")
    if tol <= 0.0:
        raise ParameterError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ParameterError(f"max_iter must be >= 1, got {max_iter}")
    if centrality not in CENTRALITIES:
        raise ParameterError(f"unknown centrality {centrality!r}")

    terms = sorted(g.vertices)
    n = len(terms)
    index = {t: i for i, t in enumerate(terms)}

    if centrality == "degree":
        degree = np.zeros(n)
        for (u, v), w in g.edges.items():
            degree[index[u]] += w
            degree[index[v]] += w
        total = degree.sum()
        if total == 0.0:
            degree = np.full(n, 1.0 / n)
        else:
            degree = degree / total
        weights = {t: float(degree[index[t]]) for t in terms}
        return TermWeights(weights=weights, iterations_used=0, converged=True)

    matrix, dangling = _transition_matrix(g, index)
    x = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        dangling_mass = x[dangling].sum()
        x_next = teleport + damping * (x @ matrix + dangling_mass / n)
        if np.abs(x_next - x).sum() < tol:
            x = x_next
            converged = True
            break
        x = x_next
    x = x / x.sum()
    weights = {t: float(x[index[t]]) for t in terms}
    return TermWeights(weights=weights, iterations_used=iterations, converged=converged)


def tw_score(
    query_terms: Sequence[str],
    doc_weights: TermWeights,
    doc_count: int,
    df: Mapping[str, int],
    k: float = DEFAULT_SATURATION,
) -> float:
    """Retrieval score of a document's term weights against a query.

    Each matched term contributes its saturated graph weight times a
    smoothed idf: ``tw/(tw + k/|V|) * ln((N+1)/(df+0.5))``.  Saturation is
    scaled by vocabulary size so that ``k`` means the same thing for large
    and small graphs.  No document length normalization is applied; the
    graph construction already removes length bias.
    """
    if k <= 0.0:
        raise ParameterError(f"saturation k must be positive, got {k}")
    vocab = len(doc_weights.weights)
    if vocab == 0:
        return 0.0
    pivot = k / vocab
    score = 0.0
    for term in dict.fromkeys(query_terms):
        tw = doc_weights.weights.get(term)
        if tw is None:
            continue
        term_df = df.get(term, 0)
        if term_df < 1:
            raise ParameterError(f"df for scored term {term!r} must be >= 1")
        idf = math.log((doc_count + 1) / (term_df + 0.5))
        score += (tw / (tw + pivot)) * idf
    return score
