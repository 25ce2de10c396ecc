"""Chordal extension and maximal-clique extraction for sparse PSD blocks.

Given the sparsity graph of a network, produce a chordal supergraph, a
perfect elimination ordering (PEO), and its maximal cliques. Already
chordal inputs are recognized with a maximum-cardinality search and
extended with zero fill; otherwise a greedy minimum-degree elimination
(ties broken by smallest vertex index) chooses the fill.
"""

from __future__ import annotations

from dataclasses import dataclass


class EmptyGraph(ValueError):
    """Graph has no vertices."""


@dataclass(frozen=True)
class SparsityGraph:
    """Undirected simple graph on vertices 0..n-1."""

    n: int
    edges: frozenset[tuple[int, int]]

    @staticmethod
    def from_edges(n: int, pairs) -> "SparsityGraph":
        edges = set()
        for a, b in pairs:
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a},{b}) outside 0..{n - 1}")
            edges.add((min(a, b), max(a, b)))
        return SparsityGraph(n, frozenset(edges))

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj


@dataclass(frozen=True)
class CliqueDecomposition:
    """PEO, fill edges and maximal cliques of the extended graph."""

    order: tuple[int, ...]
    fill_edges: tuple[tuple[int, int], ...]
    cliques: tuple[frozenset[int], ...]


def chordal_extension(graph: SparsityGraph) -> CliqueDecomposition:
    """Extend to a chordal graph and extract its maximal cliques.

    Chordal inputs get a zero-fill PEO from maximum-cardinality search;
    non-chordal inputs are filled by greedy minimum-degree elimination.
    Every maximal clique of the extended graph is an elimination
    neighborhood, so cliques are the inclusion-maximal sets
    {v} + later-neighbors(v).
    """
    if graph.n == 0:
        raise EmptyGraph("no vertices")

    order = _mcs_order(graph)
    if verify_chordal(graph, order):
        fill: tuple[tuple[int, int], ...] = ()
        extended = graph
    else:
        order, fill_list = _min_degree_fill(graph)
        fill = tuple(fill_list)
        extended = SparsityGraph(graph.n, frozenset(graph.edges) | set(fill))

    cliques = _elimination_cliques(extended, order)
    return CliqueDecomposition(order=tuple(order), fill_edges=fill, cliques=cliques)


def verify_chordal(graph: SparsityGraph, order) -> bool:
    """True iff `order` is a perfect elimination ordering of `graph`.

    Checks that every vertex's higher-ordered neighborhood is a clique.
    """
    adj = graph.adjacency()
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [u for u in adj[v] if pos[u] > pos[v]]
        for i, a in enumerate(later):
            for b in later[i + 1:]:
                if b not in adj[a]:
                    return False
    return True


def format_cliques(decomposition: CliqueDecomposition) -> str:
    """Debug dump: one clique per line, sorted indices."""
    lines = [" ".join(str(v) for v in sorted(c)) for c in decomposition.cliques]
    return "\n".join(lines) + "\n"


def _mcs_order(graph: SparsityGraph) -> list[int]:
    """Maximum cardinality search; reversed visit order is a PEO iff chordal."""
    adj = graph.adjacency()
    weight = [0] * graph.n
    visited = [False] * graph.n
    visit: list[int] = []
    for _ in range(graph.n):
        v = max((u for u in range(graph.n) if not visited[u]),
                key=lambda u: (weight[u], -u))
        visited[v] = True
        visit.append(v)
        for u in adj[v]:
            if not visited[u]:
                weight[u] += 1
    visit.reverse()
    return visit


def _min_degree_fill(graph: SparsityGraph) -> tuple[list[int], list[tuple[int, int]]]:
    adj = graph.adjacency()
    remaining = set(range(graph.n))
    order: list[int] = []
    fill: list[tuple[int, int]] = []
    full_adj = [set(a) for a in adj]  # extended-graph adjacency, grown as filled

    while remaining:
        v = min(remaining, key=lambda u: (len(adj[u]), u))
        neighbors = list(adj[v])
        for i, a in enumerate(neighbors):
            for b in neighbors[i + 1:]:
                if b not in adj[a]:
                    adj[a].add(b)
                    adj[b].add(a)
                    full_adj[a].add(b)
                    full_adj[b].add(a)
                    fill.append((min(a, b), max(a, b)))
        for u in neighbors:
            adj[u].discard(v)
        adj[v].clear()
        remaining.remove(v)
        order.append(v)

    return order, fill


def _elimination_cliques(extended: SparsityGraph, order) -> tuple[frozenset[int], ...]:
    adj = extended.adjacency()
    pos = {v: i for i, v in enumerate(order)}
    candidates = []
    for v in order:
        clique = frozenset({v} | {u for u in adj[v] if pos[u] > pos[v]})
        candidates.append(clique)

    # keep inclusion-maximal candidates only
    candidates.sort(key=len, reverse=True)
    maximal: list[frozenset[int]] = []
    for cand in candidates:
        if not any(cand <= kept for kept in maximal):
            maximal.append(cand)
    maximal.sort(key=lambda c: tuple(sorted(c)))
    return tuple(maximal)
