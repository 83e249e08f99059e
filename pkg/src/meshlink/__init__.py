"""meshlink: MeSH co-occurrence clustering and transitive literature linking.

Pipeline: MEDLINE text -> corpus -> equivalence graph -> clusters ->
strategical diagram -> guided discovery sessions.  See the cli and
server modules for the batch and HTTP frontends.
"""

from .cluster import Cluster, ClusterConfig, build_clusters
from .cooccur import EquivalenceGraph, build_graph, equivalence_index
from .diagram import (
    RatioReport,
    StrategicalDiagram,
    build_diagram,
    cdr,
    export_diagram,
    import_diagram,
    locate_term,
    ratio,
    suggest_intermediates,
)
from .discovery import (
    DiscoverySession,
    attach_intermediate_corpus,
    bind_corpus,
    candidate_targets,
    check_disjoint,
    create_session,
    load_session,
    mark_intermediate,
    save_session,
)
from .medline import Corpus, Document, load_corpus, normalize_mesh_heading, parse_medline
from .pipeline import AnalysisConfig, AnalysisResult, analyze
from .pubmed import EntrezClient, FetchSpec

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "AnalysisResult",
    "Cluster",
    "ClusterConfig",
    "Corpus",
    "DiscoverySession",
    "Document",
    "EntrezClient",
    "EquivalenceGraph",
    "FetchSpec",
    "RatioReport",
    "StrategicalDiagram",
    "analyze",
    "attach_intermediate_corpus",
    "bind_corpus",
    "build_clusters",
    "build_diagram",
    "build_graph",
    "candidate_targets",
    "cdr",
    "check_disjoint",
    "create_session",
    "equivalence_index",
    "export_diagram",
    "import_diagram",
    "load_corpus",
    "load_session",
    "locate_term",
    "mark_intermediate",
    "normalize_mesh_heading",
    "parse_medline",
    "ratio",
    "save_session",
    "suggest_intermediates",
]
