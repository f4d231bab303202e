"""Semantic dependence models for information retrieval.

Nine models over three levels of analysis: graph-of-words term weighting
(lexical), compositionality detection by synonym perturbation (lexical),
rhetorical-relation re-ranking and entity-grid / bipartite coherence
(discourse), and subjective-logic query difficulty and polyrepresentation
(cognitive) — plus a small indexing, ranking and evaluation harness to
exercise them end to end.
"""

from .errors import (
    CatenaeError,
    DataError,
    DogmaticConflictError,
    DomainError,
    InsufficientEvidenceError,
    NoOccurrenceError,
    ParameterError,
    ParseError,
    UndefinedMetricError,
    ValidationError,
)
from .text import (
    AnnotationSet,
    Document,
    Token,
    TokenizeConfig,
    RELATION_LABELS,
    extract_windows,
    load_annotations,
    load_corpus,
    load_synonyms,
    make_document,
    segment_sentences,
    tokenize,
)
from .graphrank import TermWeights, WordGraph, build_word_graph, rank_vertices, tw_score
from .comp import (
    CompScore,
    DistProfile,
    RankedList,
    build_profile,
    compositionality_kl,
    compositionality_rank,
    kl_divergence,
    list_association,
    perturb,
    ranked_profile,
)
from .rhetoric import RelationStats, relation_stats, rerank_rhetorical
from .entitygrid import (
    CoherenceScore,
    EntityGrid,
    build_grid,
    catena_entropy,
    doc_coherence_entropy,
    reorder_eval,
)
from .bipartite import (
    BipartiteGraph,
    GraphMetrics,
    ProjectedGraph,
    bipartite_clustering,
    coherence_score_bipartite,
    graph_metrics,
    grid_to_bipartite,
    project,
)
from .slogic import (
    ConsensusNode,
    DiscountNode,
    Opinion,
    OpinionLeaf,
    consensus,
    discount,
    expectation,
    fuse,
    opinion_from_evidence,
    polyrep_rank,
    query_difficulty,
)
from .retrieval import (
    InvertedIndex,
    Qrels,
    RankedRun,
    bpref,
    build_index,
    err_at_k,
    kendall_tau,
    mrr,
    ndcg_at_k,
    precision_at_k,
    score_baseline,
)

__version__ = "0.1.0"
