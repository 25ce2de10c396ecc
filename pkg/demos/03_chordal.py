"""Chordal extension of a real network's sparsity graph.

Extends the 30-bus network graph, prints the fill edges and the maximal
cliques, and shows why the clique-based PSD blocks are so much smaller
than the full matrix.
"""

from conicopf import build_network, parse_case_file
from conicopf.chordal import SparsityGraph, chordal_extension, format_cliques, verify_chordal
from conicopf.data import bundled_case

net = build_network(parse_case_file(bundled_case("case30_ieee")))
graph = SparsityGraph.from_edges(net.n_bus, net.edge_set)
print(f"network graph: {graph.n} vertices, {len(graph.edges)} edges")

decomposition = chordal_extension(graph)
extended = SparsityGraph(graph.n, frozenset(graph.edges) | set(decomposition.fill_edges))
print(f"fill edges added: {len(decomposition.fill_edges)}")
print(f"elimination order is a perfect elimination ordering: "
      f"{verify_chordal(extended, decomposition.order)}")

sizes = sorted((len(c) for c in decomposition.cliques), reverse=True)
print(f"maximal cliques: {len(sizes)}, sizes {sizes}")
full = graph.n * (graph.n + 1) // 2
split = sum(s * (s + 1) // 2 for s in sizes)
print(f"scalarized PSD entries: full matrix {full} vs clique blocks {split}")

print("\ncliques (one per line, sorted indices):")
print(format_cliques(decomposition), end="")
