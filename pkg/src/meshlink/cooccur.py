"""Term counts, pair co-occurrence counts and the equivalence graph.

The association measure between two descriptors is the equivalence
index e_ij = c_ij^2 / (c_i * c_j), where c_i and c_j are document
frequencies and c_ij the number of documents containing both.  Pairs at
or above a threshold (default 0.05) become edges of the graph.

Vocabulary admission happens before edge thresholding: terms below the
minimum document frequency or on the stoplist never enter the pair
scan.  Counting is exact integer arithmetic; the index is evaluated in
double precision as ``c_ij * c_ij / (c_i * c_j)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

from .medline import Corpus, EmptyCorpus

__all__ = [
    "TermStats",
    "PairStat",
    "EquivalenceGraph",
    "DomainError",
    "term_counts",
    "pair_counts",
    "equivalence_index",
    "build_graph",
    "graph_to_table",
]


class DomainError(ValueError):
    """Counts passed to the index formula violate its preconditions."""


@dataclass(frozen=True)
class TermStats:
    """Document frequency per descriptor."""

    counts: Mapping[str, int]

    def __getitem__(self, term: str) -> int:
        return self.counts[term]

    def __contains__(self, term: str) -> bool:
        return term in self.counts

    def __len__(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class PairStat:
    """One stored co-occurrence pair in canonical order (term_i < term_j)."""

    term_i: str
    term_j: str
    c_ij: int
    e_ij: float

    def __post_init__(self):
        if self.term_i >= self.term_j:
            raise ValueError(f"pair not in canonical order: {self.term_i!r}, {self.term_j!r}")
        if self.c_ij < 1:
            raise ValueError("stored pairs require c_ij >= 1")


@dataclass(frozen=True)
class EquivalenceGraph:
    """Admitted vocabulary plus thresholded equivalence-index edges.

    Edges are stored once, in canonical lexicographic order, sorted by
    (term_i, term_j).  The construction parameters travel with the graph
    for provenance.
    """

    terms: TermStats
    edges: tuple[PairStat, ...]
    threshold: float
    min_doc_freq: int
    stoplist: frozenset[str]

    @cached_property
    def _edge_map(self) -> dict[tuple[str, str], PairStat]:
        return {(e.term_i, e.term_j): e for e in self.edges}

    @cached_property
    def adjacency(self) -> dict[str, dict[str, float]]:
        """term -> neighbor -> edge strength, covering every admitted term."""
        adj: dict[str, dict[str, float]] = {t: {} for t in self.terms.counts}
        for e in self.edges:
            adj[e.term_i][e.term_j] = e.e_ij
            adj[e.term_j][e.term_i] = e.e_ij
        return adj

    def edge(self, term_a: str, term_b: str) -> PairStat | None:
        if term_a > term_b:
            term_a, term_b = term_b, term_a
        return self._edge_map.get((term_a, term_b))

    def strength(self, term_a: str, term_b: str) -> float:
        pair = self.edge(term_a, term_b)
        return pair.e_ij if pair is not None else 0.0

    def vocabulary(self) -> set[str]:
        return set(self.terms.counts)


def term_counts(corpus: Corpus) -> TermStats:
    """Document frequency C_i for every descriptor in the corpus."""
    if not corpus.documents:
        raise EmptyCorpus("corpus has no documents")
    counts: Counter[str] = Counter()
    for doc in corpus.documents:
        counts.update(doc.mesh_terms)
    return TermStats(counts=dict(counts))


def pair_counts(corpus: Corpus, admitted: Iterable[str]) -> dict[tuple[str, str], int]:
    """Co-document counts for every admitted pair that co-occurs at least once.

    Keys are canonical (term_i < term_j).  The scan is quadratic in the
    per-document admitted term count, not in vocabulary size.
    """
    admitted_set = set(admitted)
    counts: Counter[tuple[str, str]] = Counter()
    for doc in corpus.documents:
        present = sorted(t for t in doc.mesh_terms if t in admitted_set)
        counts.update(combinations(present, 2))
    return dict(counts)


def equivalence_index(c_ij: int, c_i: int, c_j: int) -> float:
    """e = c_ij^2 / (c_i * c_j), in [0, 1] for valid counts."""
    if c_i < 1 or c_j < 1:
        raise DomainError(f"occurrence counts must be >= 1, got {c_i}, {c_j}")
    if c_ij < 0 or c_ij > min(c_i, c_j):
        raise DomainError(f"co-occurrence count {c_ij} outside [0, min({c_i}, {c_j})]")
    return c_ij * c_ij / (c_i * c_j)


def build_graph(
    corpus: Corpus,
    threshold: float = 0.05,
    min_doc_freq: int = 2,
    stoplist: frozenset[str] | set[str] = frozenset(),
) -> EquivalenceGraph:
    """Count, admit vocabulary, and keep pairs with e_ij >= threshold."""
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    if min_doc_freq < 1:
        raise ValueError(f"min_doc_freq must be >= 1, got {min_doc_freq}")
    stop = frozenset(stoplist)
    all_counts = term_counts(corpus)
    admitted = {
        term: count
        for term, count in all_counts.counts.items()
        if count >= min_doc_freq and term not in stop
    }
    edges = []
    for (term_i, term_j), c_ij in pair_counts(corpus, admitted).items():
        e_ij = equivalence_index(c_ij, admitted[term_i], admitted[term_j])
        if e_ij >= threshold:
            edges.append(PairStat(term_i=term_i, term_j=term_j, c_ij=c_ij, e_ij=e_ij))
    edges.sort(key=lambda e: (e.term_i, e.term_j))
    return EquivalenceGraph(
        terms=TermStats(counts=admitted),
        edges=tuple(edges),
        threshold=threshold,
        min_doc_freq=min_doc_freq,
        stoplist=stop,
    )


def graph_to_table(graph: EquivalenceGraph) -> str:
    """Canonical tabular text export: header block, then one edge per line.

    Edge lines are ``term_i TAB term_j TAB c_ij TAB e_ij`` in lexicographic
    order; floats use shortest round-trip representation.  Byte-identical
    for equal graphs.
    """
    lines = [
        "# equivalence-graph v1",
        f"# threshold={graph.threshold!r}",
        f"# min_doc_freq={graph.min_doc_freq}",
        f"# stoplist_size={len(graph.stoplist)}",
        f"# terms={len(graph.terms)}",
        f"# edges={len(graph.edges)}",
    ]
    for e in graph.edges:
        lines.append(f"{e.term_i}\t{e.term_j}\t{e.c_ij}\t{e.e_ij!r}")
    return "\n".join(lines) + "\n"
