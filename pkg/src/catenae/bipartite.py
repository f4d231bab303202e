"""Bipartite sentence-entity graphs and their coherence metrics.

The entity grid, read as a two-mode graph, connects a sentence to every
entity it mentions.  Coherence then becomes graph topology: sentences that
share entities are well connected.  Two routes to a score:

* projection: collapse onto the sentence side (edges between sentences
  sharing an entity, weighted by the shared count) and take the mean local
  clustering coefficient there;
* direct: stay on the bipartite graph and use a pairwise (squares-based)
  clustering coefficient, which needs no projection and loses none of the
  two-mode structure.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Mapping

from .errors import ParameterError
from .entitygrid import ABSENT, EntityGrid

ROLE_EDGE_WEIGHTS = {"s": 3.0, "o": 2.0, "x": 1.0}

Vertex = Hashable


@dataclass(frozen=True)
class BipartiteGraph:
    """Two-mode graph: sentence indices on the left, entity ids on the right.

    ``roles`` optionally records the grid role behind each edge for
    role-weighted variants.
    """

    left: frozenset[int]
    right: frozenset[str]
    edges: frozenset[tuple[int, str]]
    roles: Mapping[tuple[int, str], str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for sentence, entity in self.edges:
            if sentence not in self.left or entity not in self.right:
                raise ParameterError(f"edge ({sentence!r}, {entity!r}) endpoint missing")

    def neighbours_left(self, sentence: int) -> frozenset[str]:
        return frozenset(e for s, e in self.edges if s == sentence)

    def neighbours_right(self, entity: str) -> frozenset[int]:
        return frozenset(s for s, e in self.edges if e == entity)


@dataclass(frozen=True)
class ProjectedGraph:
    """One-mode projection; edge weight counts shared opposite-side neighbours."""

    vertices: tuple[Vertex, ...]
    edges: Mapping[tuple[Vertex, Vertex], float]

    def neighbours(self, v: Vertex) -> list[Vertex]:
        out = []
        for (a, b) in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return out


@dataclass(frozen=True)
class GraphMetrics:
    avg_degree: float
    clustering: float
    avg_path_length: float
    component_count: int


def grid_to_bipartite(grid: EntityGrid) -> BipartiteGraph:
    """Sentence-entity graph of a grid: an edge wherever a cell is non-absent."""
    edges = set()
    roles = {}
    for entity, row in zip(grid.entities, grid.cells):
        for sentence, cell in enumerate(row):
            if cell != ABSENT:
                edges.add((sentence, entity))
                roles[(sentence, entity)] = cell
    return BipartiteGraph(
        left=frozenset(range(grid.sentences)),
        right=frozenset(grid.entities),
        edges=frozenset(edges),
        roles=roles,
    )


def project(g: BipartiteGraph, side: str, role_weighted: bool = False) -> ProjectedGraph:
    """One-mode projection onto ``side`` ("sentences" or "entities").

    Two same-side vertices are adjacent iff they share at least one
    neighbour; the weight is the shared-neighbour count.  With
    ``role_weighted`` each shared neighbour contributes the smaller of the
    two role weights (s=3, o=2, x=1) instead of 1.
    """
    if side == "sentences":
        vertices = sorted(g.left)
        neighbour_sets = {v: g.neighbours_left(v) for v in vertices}
        edge_weight = lambda v, n: ROLE_EDGE_WEIGHTS[g.roles[(v, n)]]
    elif side == "entities":
        vertices = sorted(g.right)
        neighbour_sets = {v: g.neighbours_right(v) for v in vertices}
        edge_weight = lambda v, n: ROLE_EDGE_WEIGHTS[g.roles[(n, v)]]
    else:
        raise ParameterError(f"unknown projection side {side!r}")

    edges: dict[tuple[Vertex, Vertex], float] = {}
    for i, u in enumerate(vertices):
        for v in vertices[i + 1:]:
            shared = neighbour_sets[u] & neighbour_sets[v]
            if not shared:
                continue
            if role_weighted:
                weight = sum(min(edge_weight(u, n), edge_weight(v, n)) for n in sorted(shared))
            else:
                weight = float(len(shared))
            edges[(u, v)] = weight
    return ProjectedGraph(vertices=tuple(vertices), edges=edges)


def _adjacency(g: ProjectedGraph) -> dict[Vertex, set[Vertex]]:
    adj: dict[Vertex, set[Vertex]] = {v: set() for v in g.vertices}
    for (u, v) in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def _components(adj: dict[Vertex, set[Vertex]]) -> list[list[Vertex]]:
    seen: set[Vertex] = set()
    components = []
    for start in adj:
        if start in seen:
            continue
        queue = deque([start])
        seen.add(start)
        component = []
        while queue:
            v = queue.popleft()
            component.append(v)
            for w in sorted(adj[v], key=repr):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        components.append(component)
    return components


def local_clustering(adj: dict[Vertex, set[Vertex]], v: Vertex) -> float:
    """Fraction of a vertex's neighbour pairs that are themselves adjacent."""
    neighbours = sorted(adj[v], key=repr)
    k = len(neighbours)
    if k < 2:
        return 0.0
    links = 0
    for i, u in enumerate(neighbours):
        for w in neighbours[i + 1:]:
            if w in adj[u]:
                links += 1
    return links / (k * (k - 1) / 2)


def graph_metrics(g: ProjectedGraph) -> GraphMetrics:
    """Average degree, mean local clustering, and mean shortest path length.

    Clustering averages over vertices of degree >= 2 (0 if there are
    none); path length averages over reachable pairs in the largest
    connected component (0 for a singleton).
    """
    adj = _adjacency(g)
    n = len(g.vertices)
    if n == 0:
        return GraphMetrics(0.0, 0.0, 0.0, 0)
    avg_degree = 2.0 * len(g.edges) / n

    eligible = [v for v in g.vertices if len(adj[v]) >= 2]
    clustering = (
        sum(local_clustering(adj, v) for v in eligible) / len(eligible) if eligible else 0.0
    )

    components = _components(adj)
    largest = max(components, key=lambda c: (len(c), [repr(v) for v in c]))
    apl = _average_path_length(adj, largest)
    return GraphMetrics(
        avg_degree=avg_degree,
        clustering=clustering,
        avg_path_length=apl,
        component_count=len(components),
    )


def _average_path_length(adj: dict[Vertex, set[Vertex]], component: list[Vertex]) -> float:
    if len(component) < 2:
        return 0.0
    members = set(component)
    total = 0
    pairs = 0
    for source in component:
        dist = {source: 0}
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w in members and w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        total += sum(dist.values())
        pairs += len(dist) - 1
    # each unordered pair counted twice
    return total / pairs if pairs else 0.0


def bipartite_clustering(g: BipartiteGraph) -> dict[Vertex, float]:
    """Pairwise (squares-based) clustering coefficient on the two-mode graph.

    For vertex v, average over unordered pairs (u, w) of its neighbours of
    ``|N(u) & N(w) - {v}| / |N(u) | N(w) - {v}|``; a pair whose union is
    empty contributes 0.  Vertices with fewer than two neighbours get 0.
    """
    neighbours: dict[Vertex, frozenset] = {}
    for v in g.left:
        neighbours[v] = g.neighbours_left(v)
    for v in g.right:
        neighbours[v] = g.neighbours_right(v)

    result: dict[Vertex, float] = {}
    for v, own in neighbours.items():
        nbrs = sorted(own, key=repr)
        if len(nbrs) < 2:
            result[v] = 0.0
            continue
        total = 0.0
        pairs = 0
        for i, u in enumerate(nbrs):
            for w in nbrs[i + 1:]:
                union = (neighbours[u] | neighbours[w]) - {v}
                inter = (neighbours[u] & neighbours[w]) - {v}
                total += len(inter) / len(union) if union else 0.0
                pairs += 1
        result[v] = total / pairs
    return result


def coherence_score_bipartite(grid: EntityGrid, mode: str) -> float:
    """Document coherence from the grid's bipartite structure.

    ``projection`` scores the clustering of the sentence projection;
    ``direct`` averages the bipartite clustering coefficient over sentence
    vertices.  Higher is more coherent in both modes.
    """
    g = grid_to_bipartite(grid)
    if mode == "projection":
        return graph_metrics(project(g, "sentences")).clustering
    if mode == "direct":
        if not g.left:
            return 0.0
        cc = bipartite_clustering(g)
        return sum(cc[s] for s in sorted(g.left)) / len(g.left)
    raise ParameterError(f"unknown bipartite coherence mode {mode!r}")


def to_dot(g: BipartiteGraph, doc_id: str = "") -> str:
    """Graphviz text for a bipartite graph (sentences boxed, entities oval)."""
    name = doc_id.replace('"', "'") or "bipartite"
    lines = [f'graph "{name}" {{']
    for s in sorted(g.left):
        lines.append(f'  "s{s}" [shape=box];')
    for e in sorted(g.right):
        lines.append(f'  "{e}" [shape=ellipse];')
    for s, e in sorted(g.edges, key=lambda edge: (edge[0], edge[1])):
        role = g.roles.get((s, e))
        label = f' [label="{role}"]' if role else ""
        lines.append(f'  "s{s}" -- "{e}"{label};')
    lines.append("}")
    return "\n".join(lines)


def projection_to_dot(g: ProjectedGraph, name: str = "projection") -> str:
    """Graphviz text for a one-mode projection with shared-count labels."""
    lines = [f'graph "{name}" {{']
    for v in g.vertices:
        lines.append(f'  "{v}";')
    for (u, v), weight in sorted(g.edges.items(), key=lambda item: (repr(item[0][0]), repr(item[0][1]))):
        lines.append(f'  "{u}" -- "{v}" [label="{weight:g}"];')
    lines.append("}")
    return "\n".join(lines)
