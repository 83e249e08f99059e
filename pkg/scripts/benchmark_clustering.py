"""Time graph construction and clustering on synthetic topic-block corpora.

Documents are organized as topic blocks (every document carries its
topic's terms plus a couple of terms from the next topic, producing
bridge edges), which mirrors the structure that makes greedy clustering
interesting while keeping the expected output predictable.

    python3 scripts/benchmark_clustering.py
    python3 scripts/benchmark_clustering.py --docs 10000 --topics 200 --repeat 5
"""

from __future__ import annotations

import argparse
import statistics
import time

from meshlink.cluster import ClusterConfig, build_clusters
from meshlink.cooccur import build_graph
from meshlink.medline import Corpus, Document


def synthetic_corpus(docs: int, topics: int, terms_per_topic: int, overlap: int) -> Corpus:
    blocks = [
        [f"T{topic:03d}_{i}" for i in range(terms_per_topic)] for topic in range(topics)
    ]
    documents = []
    for doc_index in range(docs):
        topic = doc_index % topics
        terms = list(blocks[topic]) + blocks[(topic + 1) % topics][:overlap]
        documents.append(
            Document(
                pmid=str(doc_index + 1),
                title=f"synthetic document {doc_index + 1}",
                mesh_terms=tuple(terms),
            )
        )
    return Corpus(corpus_id="synthetic", label="synthetic", documents=tuple(documents))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--docs", type=int, default=10_000)
    parser.add_argument("--topics", type=int, default=200)
    parser.add_argument("--terms-per-topic", type=int, default=10)
    parser.add_argument("--overlap", type=int, default=2,
                        help="terms borrowed from the next topic per document")
    parser.add_argument("--threshold", type=float, default=0.05)
    parser.add_argument("--min-doc-freq", type=int, default=2)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    corpus = synthetic_corpus(args.docs, args.topics, args.terms_per_topic, args.overlap)
    mean_terms = sum(len(d.mesh_terms) for d in corpus.documents) / len(corpus.documents)
    print(
        f"corpus: {len(corpus.documents)} documents, "
        f"{len(corpus.vocabulary())} terms, {mean_terms:.1f} terms/doc"
    )

    graph_times, cluster_times = [], []
    for run in range(args.repeat):
        started = time.perf_counter()
        graph = build_graph(
            corpus, threshold=args.threshold, min_doc_freq=args.min_doc_freq
        )
        graph_done = time.perf_counter()
        clusters = build_clusters(graph, ClusterConfig())
        finished = time.perf_counter()
        graph_times.append(graph_done - started)
        cluster_times.append(finished - graph_done)
        print(
            f"  run {run + 1}: graph {graph_times[-1]:.3f}s "
            f"({len(graph.edges)} edges), clustering {cluster_times[-1]:.3f}s "
            f"({len(clusters)} clusters)"
        )

    print(
        f"medians over {args.repeat} runs: graph {statistics.median(graph_times):.3f}s, "
        f"clustering {statistics.median(cluster_times):.3f}s, "
        f"total {statistics.median(g + c for g, c in zip(graph_times, cluster_times)):.3f}s"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
