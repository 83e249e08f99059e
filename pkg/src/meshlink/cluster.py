"""Greedy term clustering over the equivalence graph.

The procedure is seed-and-grow: take the strongest remaining edge whose
endpoints are both unconsumed as the seed pair, then repeatedly attach
the unconsumed term with the strongest link to the current members until
the size cap is reached or no linked candidate remains.  Groups reaching
the minimum size are emitted; either way all touched terms are consumed,
so clustering is hard (each term lands in at most one cluster) and the
loop terminates.

Attachment strength defaults to the candidate's maximum edge strength
into the group ("max"); "sum" is available as an alternative reading.
Ties break on the other aggregate, then higher document frequency, then
lexicographic order, making the output fully deterministic.

Density is the mean strength over internal edges present in the graph
(pairs below the threshold contribute nothing, they simply are not
edges).  Centrality is the summed strength of edges leaving the cluster,
whether or not the outside endpoint belongs to another cluster.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .cooccur import EquivalenceGraph

__all__ = [
    "Cluster",
    "ClusterConfig",
    "build_clusters",
    "cluster_density",
    "cluster_centrality",
    "label_cluster",
    "clusters_to_table",
]


@dataclass(frozen=True)
class Cluster:
    """An emitted term group with its diagram coordinates.

    ``cluster_id`` is the 1-based ordinal in creation order; ``seed_e``
    the equivalence index of the founding pair; ``members`` a sorted
    tuple.
    """

    cluster_id: int
    members: tuple[str, ...]
    label: str
    density: float
    centrality: float
    seed_e: float


@dataclass(frozen=True)
class ClusterConfig:
    min_size: int = 3
    max_size: int = 10
    attachment: str = "max"  # or "sum"

    def __post_init__(self):
        if self.min_size < 2:
            raise ValueError("min_size must be >= 2")
        if self.max_size < self.min_size:
            raise ValueError("max_size must be >= min_size")
        if self.attachment not in ("max", "sum"):
            raise ValueError(f"unknown attachment mode {self.attachment!r}")


def cluster_density(members: Iterable[str], graph: EquivalenceGraph) -> float:
    """Mean strength over graph edges with both endpoints in ``members``."""
    member_list = sorted(members)
    strengths = []
    for term_a, term_b in combinations(member_list, 2):
        pair = graph.edge(term_a, term_b)
        if pair is not None:
            strengths.append(pair.e_ij)
    return sum(strengths) / len(strengths) if strengths else 0.0


def cluster_centrality(members: Iterable[str], graph: EquivalenceGraph) -> float:
    """Summed strength over graph edges with exactly one endpoint inside.

    Summation follows the graph's canonical edge order so the result is
    bit-for-bit reproducible regardless of how the member set was built.
    """
    member_set = set(members)
    total = 0.0
    for edge in graph.edges:
        if (edge.term_i in member_set) != (edge.term_j in member_set):
            total += edge.e_ij
    return total


def label_cluster(members: Iterable[str], graph: EquivalenceGraph) -> str:
    """Representative member: highest document frequency, ties lexicographic."""
    counts = graph.terms.counts
    return min(members, key=lambda m: (-counts.get(m, 0), m))


def build_clusters(graph: EquivalenceGraph, config: ClusterConfig = ClusterConfig()) -> list[Cluster]:
    """Run the seed-and-grow procedure to exhaustion.

    An edgeless graph yields an empty list.  Emitted clusters are pairwise
    disjoint and their seed strengths are non-increasing.
    """
    adjacency = graph.adjacency
    counts = graph.terms.counts
    # strongest first; equal strengths resolved by lexicographically
    # smallest canonical pair
    pending = sorted(graph.edges, key=lambda e: (-e.e_ij, e.term_i, e.term_j))
    consumed: set[str] = set()
    clusters: list[Cluster] = []
    index = 0
    next_id = 1

    while True:
        while index < len(pending) and (
            pending[index].term_i in consumed or pending[index].term_j in consumed
        ):
            index += 1
        if index >= len(pending):
            break
        seed = pending[index]
        group: set[str] = {seed.term_i, seed.term_j}
        # candidate -> [max strength into group, summed strength into group]
        candidates: dict[str, list[float]] = {}

        def absorb(member: str):
            for neighbor, strength in adjacency[member].items():
                if neighbor in consumed or neighbor in group:
                    continue
                entry = candidates.get(neighbor)
                if entry is None:
                    candidates[neighbor] = [strength, strength]
                else:
                    if strength > entry[0]:
                        entry[0] = strength
                    entry[1] += strength

        absorb(seed.term_i)
        absorb(seed.term_j)
        while len(group) < config.max_size and candidates:
            if config.attachment == "max":
                best = min(
                    candidates.items(),
                    key=lambda kv: (-kv[1][0], -kv[1][1], -counts[kv[0]], kv[0]),
                )[0]
            else:
                best = min(
                    candidates.items(),
                    key=lambda kv: (-kv[1][1], -kv[1][0], -counts[kv[0]], kv[0]),
                )[0]
            del candidates[best]
            group.add(best)
            absorb(best)

        consumed |= group
        if len(group) >= config.min_size:
            members = tuple(sorted(group))
            clusters.append(
                Cluster(
                    cluster_id=next_id,
                    members=members,
                    label=label_cluster(members, graph),
                    density=cluster_density(members, graph),
                    centrality=cluster_centrality(members, graph),
                    seed_e=seed.e_ij,
                )
            )
            next_id += 1
    return clusters


def clusters_to_table(clusters: Iterable[Cluster]) -> str:
    """Canonical tabular export, one row per cluster sorted by id."""
    lines = ["cluster_id\tlabel\tsize\tdensity\tcentrality\tseed_e\tmembers"]
    for c in sorted(clusters, key=lambda c: c.cluster_id):
        members = ";".join(c.members)
        lines.append(
            f"{c.cluster_id}\t{c.label}\t{len(c.members)}\t{c.density!r}\t{c.centrality!r}\t{c.seed_e!r}\t{members}"
        )
    return "\n".join(lines) + "\n"
