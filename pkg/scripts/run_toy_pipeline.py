"""Walk the worked example through every pipeline stage, printing as it goes.

Useful as an executable sanity check and as a narrated tour: term
counts, pair counts, equivalence indices, the thresholded graph, the
greedy clustering and the diagram coordinates all appear with the exact
values the test suite pins down.

    python3 scripts/run_toy_pipeline.py
    python3 scripts/run_toy_pipeline.py --threshold 0.2
"""

from __future__ import annotations

import argparse
from fractions import Fraction

from meshlink.cluster import ClusterConfig, build_clusters
from meshlink.cooccur import build_graph
from meshlink.diagram import CdrUndefined, build_diagram, cdr
from meshlink.medline import Corpus, Document

TOY_DOCS = [
    ("T1", ("A", "B", "C")),
    ("T2", ("A", "B")),
    ("T3", ("A", "B", "D")),
    ("T4", ("C", "D")),
    ("T5", ("A", "C")),
]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--threshold", type=float, default=0.05)
    parser.add_argument("--min-doc-freq", type=int, default=1)
    args = parser.parse_args(argv)

    corpus = Corpus(
        corpus_id="toy",
        label="worked example",
        documents=tuple(
            Document(pmid=pmid, title=f"toy document {pmid}", mesh_terms=terms)
            for pmid, terms in TOY_DOCS
        ),
    )
    print(f"corpus: {len(corpus.documents)} documents, vocabulary {sorted(corpus.vocabulary())}")

    graph = build_graph(corpus, threshold=args.threshold, min_doc_freq=args.min_doc_freq)
    print(f"\nterm counts ({len(graph.terms)} admitted):")
    for term in sorted(graph.terms.counts):
        print(f"  C({term}) = {graph.terms[term]}")

    print(f"\nedges at threshold {args.threshold} ({len(graph.edges)}):")
    for edge in graph.edges:
        exact = Fraction(edge.c_ij * edge.c_ij, graph.terms[edge.term_i] * graph.terms[edge.term_j])
        print(
            f"  e({edge.term_i},{edge.term_j}) = {edge.c_ij}^2/({graph.terms[edge.term_i]}"
            f"*{graph.terms[edge.term_j]}) = {exact} = {edge.e_ij:.6f}"
        )

    clusters = build_clusters(graph, ClusterConfig())
    print(f"\nclusters ({len(clusters)}):")
    for cluster in clusters:
        print(
            f"  [{cluster.cluster_id}] label={cluster.label!r} members={cluster.members}"
            f" density={cluster.density:.6f} centrality={cluster.centrality:.6f}"
        )
        try:
            print(f"       cdr = {cdr(cluster):.6f}")
        except CdrUndefined:
            print("       cdr undefined (no external links)")

    if clusters:
        diagram = build_diagram(corpus.corpus_id, clusters)
        print(
            f"\ndiagram medians: density={diagram.median_density:.6f}"
            f" centrality={diagram.median_centrality:.6f}"
        )
        for cluster in clusters:
            print(f"  [{cluster.cluster_id}] quadrant: {diagram.quadrant(cluster)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
