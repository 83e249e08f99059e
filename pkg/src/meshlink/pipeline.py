"""End-to-end analysis: corpus -> graph -> clusters -> diagram."""

from __future__ import annotations

from dataclasses import dataclass

from .cluster import Cluster, ClusterConfig, build_clusters
from .cooccur import EquivalenceGraph, build_graph
from .diagram import DEFAULT_BAND, StrategicalDiagram, build_diagram
from .medline import Corpus

__all__ = ["AnalysisConfig", "AnalysisResult", "analyze", "config_to_params", "config_from_params"]


@dataclass(frozen=True)
class AnalysisConfig:
    """Every knob of the pipeline, with the shipped defaults."""

    threshold: float = 0.05
    min_doc_freq: int = 2
    stoplist: frozenset[str] = frozenset()
    min_cluster_size: int = 3
    max_cluster_size: int = 10
    attachment: str = "max"
    band_low: float = DEFAULT_BAND[0]
    band_high: float = DEFAULT_BAND[1]

    @property
    def band(self) -> tuple[float, float]:
        return (self.band_low, self.band_high)

    def cluster_config(self) -> ClusterConfig:
        return ClusterConfig(
            min_size=self.min_cluster_size,
            max_size=self.max_cluster_size,
            attachment=self.attachment,
        )


@dataclass(frozen=True)
class AnalysisResult:
    corpus: Corpus
    graph: EquivalenceGraph
    clusters: tuple[Cluster, ...]
    diagram: StrategicalDiagram | None  # None when no cluster was emitted


def config_to_params(config: AnalysisConfig) -> dict:
    """JSON-safe echo of the configuration, stored on diagrams."""
    return {
        "threshold": config.threshold,
        "min_doc_freq": config.min_doc_freq,
        "stoplist": sorted(config.stoplist),
        "min_cluster_size": config.min_cluster_size,
        "max_cluster_size": config.max_cluster_size,
        "attachment": config.attachment,
        "band": [config.band_low, config.band_high],
    }


def config_from_params(params: dict) -> AnalysisConfig:
    return AnalysisConfig(
        threshold=params["threshold"],
        min_doc_freq=params["min_doc_freq"],
        stoplist=frozenset(params.get("stoplist", ())),
        min_cluster_size=params["min_cluster_size"],
        max_cluster_size=params["max_cluster_size"],
        attachment=params["attachment"],
        band_low=params["band"][0],
        band_high=params["band"][1],
    )


def analyze(corpus: Corpus, config: AnalysisConfig = AnalysisConfig()) -> AnalysisResult:
    """Run the full pipeline on one corpus.

    ``diagram`` is None when clustering emits nothing (sparse corpora);
    callers decide whether that is an error for them.
    """
    graph = build_graph(
        corpus,
        threshold=config.threshold,
        min_doc_freq=config.min_doc_freq,
        stoplist=config.stoplist,
    )
    clusters = tuple(build_clusters(graph, config.cluster_config()))
    diagram = None
    if clusters:
        diagram = build_diagram(corpus.corpus_id, clusters, parameters=config_to_params(config))
    return AnalysisResult(corpus=corpus, graph=graph, clusters=clusters, diagram=diagram)
