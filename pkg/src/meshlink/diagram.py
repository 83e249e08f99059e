"""Strategical diagrams: cluster medians, quadrants, ratios, suggestions.

A diagram places every cluster of a corpus at (density, centrality) and
draws the two median lines.  High centrality marks clusters important to
the whole domain; high density marks tightly coherent local themes.
Clusters sitting on a median count as "above" it, so "below both
medians" always means strictly below.

For any cluster with positive centrality, the centrality/density ratio
(cdr) is defined, and dividing the source cluster's cdr by another
cluster's gives the screening ratio used in transitive linking: SIR when
the other cluster is a candidate intermediate, STR when it is a
candidate target.  Ratios near 1 and positions below both medians are
the screening signals; the suggestion score combines them.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Mapping

from .cluster import Cluster

__all__ = [
    "StrategicalDiagram",
    "RatioReport",
    "Suggestion",
    "NoClusters",
    "CdrUndefined",
    "UnknownFormat",
    "DEFAULT_BAND",
    "FLAG_BELOW_MEDIANS",
    "FLAG_SIR_NEAR_ONE",
    "FLAG_STR_NEAR_ONE",
    "FLAG_NO_CDR",
    "FLAG_HIGHLIGHTED",
    "build_diagram",
    "cdr",
    "ratio",
    "locate_term",
    "suggest_intermediates",
    "export_diagram",
    "import_diagram",
    "diagram_to_dict",
    "diagram_from_dict",
]

SCHEMA_NAME = "strategical-diagram"
SCHEMA_VERSION = 1

DEFAULT_BAND = (0.5, 2.0)
SUGGESTION_FLAG_BONUS = 0.5

FLAG_BELOW_MEDIANS = "BELOW_MEDIANS"
FLAG_SIR_NEAR_ONE = "SIR_NEAR_ONE"
FLAG_STR_NEAR_ONE = "STR_NEAR_ONE"
FLAG_NO_CDR = "NO_CDR"
FLAG_HIGHLIGHTED = "HIGHLIGHTED"

_QUADRANTS = {
    (True, True): "both-above",
    (True, False): "density-only",
    (False, True): "centrality-only",
    (False, False): "both-below",
}

EXPORT_FORMATS = ("canonical-table", "structured-document", "vector-image")


class NoClusters(ValueError):
    """A diagram needs at least one cluster."""


class CdrUndefined(ValueError):
    """centrality/density is only defined for clusters with centrality > 0."""

    def __init__(self, cluster_id: int):
        super().__init__(f"cluster {cluster_id} has centrality 0, cdr undefined")
        self.cluster_id = cluster_id


class UnknownFormat(ValueError):
    """Unsupported export format or incompatible document schema."""


@dataclass(frozen=True)
class RatioReport:
    """cdr quotient of two clusters; kind records the discovery role of a."""

    cluster_a: int
    cluster_b: int
    cdr_a: float
    cdr_b: float
    ratio: float
    kind: str  # "SIR" or "STR"


@dataclass(frozen=True)
class Suggestion:
    """One ranked entry from intermediate screening."""

    cluster: Cluster
    score: float | None
    flags: tuple[str, ...]
    sir: RatioReport | None


@dataclass(frozen=True)
class StrategicalDiagram:
    corpus_ref: str
    clusters: tuple[Cluster, ...]
    median_density: float
    median_centrality: float
    parameters: dict

    def cluster_by_id(self, cluster_id: int) -> Cluster | None:
        for c in self.clusters:
            if c.cluster_id == cluster_id:
                return c
        return None

    def quadrant(self, cluster: Cluster) -> str:
        """Quadrant token, density axis named first; ties count as above."""
        return _QUADRANTS[
            (cluster.density >= self.median_density, cluster.centrality >= self.median_centrality)
        ]

    def below_both_medians(self, cluster: Cluster) -> bool:
        return cluster.density < self.median_density and cluster.centrality < self.median_centrality


def build_diagram(
    corpus_ref: str,
    clusters: Iterable[Cluster],
    parameters: Mapping[str, object] | None = None,
) -> StrategicalDiagram:
    """Compute medians over the cluster coordinates and assemble the diagram.

    Even cluster counts use the arithmetic mean of the two middle values.
    """
    cluster_tuple = tuple(sorted(clusters, key=lambda c: c.cluster_id))
    if not cluster_tuple:
        raise NoClusters("cannot build a diagram from zero clusters")
    return StrategicalDiagram(
        corpus_ref=corpus_ref,
        clusters=cluster_tuple,
        median_density=statistics.median(c.density for c in cluster_tuple),
        median_centrality=statistics.median(c.centrality for c in cluster_tuple),
        parameters=dict(parameters or {}),
    )


def cdr(cluster: Cluster) -> float:
    """centrality / density; raises CdrUndefined when centrality is 0."""
    if cluster.centrality <= 0:
        raise CdrUndefined(cluster.cluster_id)
    return cluster.centrality / cluster.density


def ratio(cluster_a: Cluster, cluster_b: Cluster, kind: str) -> RatioReport:
    """cdr(a) / cdr(b) with the failing cluster identified on error."""
    if kind not in ("SIR", "STR"):
        raise ValueError(f"ratio kind must be SIR or STR, got {kind!r}")
    cdr_a = cdr(cluster_a)
    cdr_b = cdr(cluster_b)
    return RatioReport(
        cluster_a=cluster_a.cluster_id,
        cluster_b=cluster_b.cluster_id,
        cdr_a=cdr_a,
        cdr_b=cdr_b,
        ratio=cdr_a / cdr_b,
        kind=kind,
    )


def locate_term(diagram: StrategicalDiagram, descriptor: str) -> Cluster | None:
    """The unique cluster containing the descriptor, if any.

    Terms consumed during clustering but never emitted belong to no
    cluster and yield None.
    """
    for cluster in diagram.clusters:
        if descriptor in cluster.members:
            return cluster
    return None


def suggest_intermediates(
    diagram: StrategicalDiagram,
    source_cluster: Cluster,
    band: tuple[float, float] = DEFAULT_BAND,
    highlight: Iterable[str] | None = None,
) -> list[Suggestion]:
    """Rank every other cluster as a candidate intermediate.

    Score is |ln SIR| minus a 0.5 bonus per screening flag (below both
    medians; SIR inside the band), ascending.  Clusters without a cdr
    cannot be scored and are appended last in id order with the NO_CDR
    flag.  A highlight descriptor set adds a display-only flag that does
    not affect the score.

    Raises CdrUndefined when the source cluster has centrality 0 and
    there is at least one other cluster to score; with no other clusters
    the empty ranking is returned regardless.
    """
    others = [c for c in diagram.clusters if c.cluster_id != source_cluster.cluster_id]
    if not others:
        return []
    if source_cluster.centrality <= 0:
        raise CdrUndefined(source_cluster.cluster_id)
    band_low, band_high = band
    if not 0 < band_low <= band_high:
        raise ValueError(f"invalid ratio band {band!r}")
    highlighted = set(highlight or ())

    scored: list[Suggestion] = []
    no_cdr: list[Suggestion] = []
    for cluster in others:
        flags = []
        if diagram.below_both_medians(cluster):
            flags.append(FLAG_BELOW_MEDIANS)
        if highlighted and highlighted.intersection(cluster.members):
            flags.append(FLAG_HIGHLIGHTED)
        if cluster.centrality <= 0:
            flags.append(FLAG_NO_CDR)
            no_cdr.append(Suggestion(cluster=cluster, score=None, flags=tuple(sorted(flags)), sir=None))
            continue
        report = ratio(source_cluster, cluster, "SIR")
        if band_low <= report.ratio <= band_high:
            flags.append(FLAG_SIR_NEAR_ONE)
        bonus_flags = sum(1 for f in flags if f in (FLAG_BELOW_MEDIANS, FLAG_SIR_NEAR_ONE))
        score = abs(math.log(report.ratio)) - SUGGESTION_FLAG_BONUS * bonus_flags
        scored.append(Suggestion(cluster=cluster, score=score, flags=tuple(sorted(flags)), sir=report))

    scored.sort(key=lambda s: (s.score, s.cluster.cluster_id))
    no_cdr.sort(key=lambda s: s.cluster.cluster_id)
    return scored + no_cdr


# ---------------------------------------------------------------------------
# exports

def diagram_to_dict(diagram: StrategicalDiagram) -> dict:
    """Structured-document form with stable field order."""
    return {
        "schema": SCHEMA_NAME,
        "schema_version": SCHEMA_VERSION,
        "corpus_ref": diagram.corpus_ref,
        "median_density": diagram.median_density,
        "median_centrality": diagram.median_centrality,
        "parameters": diagram.parameters,
        "clusters": [
            {
                "cluster_id": c.cluster_id,
                "label": c.label,
                "members": list(c.members),
                "density": c.density,
                "centrality": c.centrality,
                "seed_e": c.seed_e,
                "quadrant": diagram.quadrant(c),
            }
            for c in diagram.clusters
        ],
    }


def diagram_from_dict(data: dict) -> StrategicalDiagram:
    if data.get("schema") != SCHEMA_NAME or data.get("schema_version") != SCHEMA_VERSION:
        raise UnknownFormat(
            f"expected {SCHEMA_NAME} v{SCHEMA_VERSION}, "
            f"got {data.get('schema')!r} v{data.get('schema_version')!r}"
        )
    clusters = tuple(
        Cluster(
            cluster_id=c["cluster_id"],
            members=tuple(c["members"]),
            label=c["label"],
            density=c["density"],
            centrality=c["centrality"],
            seed_e=c["seed_e"],
        )
        for c in data["clusters"]
    )
    return StrategicalDiagram(
        corpus_ref=data["corpus_ref"],
        clusters=clusters,
        median_density=data["median_density"],
        median_centrality=data["median_centrality"],
        parameters=dict(data.get("parameters") or {}),
    )


def _table_export(diagram: StrategicalDiagram) -> str:
    lines = [
        f"# corpus_ref={diagram.corpus_ref}",
        f"# median_density={diagram.median_density!r}",
        f"# median_centrality={diagram.median_centrality!r}",
        "cluster_id\tlabel\tdensity\tcentrality\tquadrant",
    ]
    for c in diagram.clusters:
        lines.append(
            f"{c.cluster_id}\t{c.label}\t{c.density!r}\t{c.centrality!r}\t{diagram.quadrant(c)}"
        )
    return "\n".join(lines) + "\n"


def _svg_export(diagram: StrategicalDiagram, highlight: Iterable[str] | None = None) -> str:
    """Scatter plot: one marker per cluster, two dashed median lines.

    Hand-rolled so the bytes depend on nothing but the diagram.  Labels
    are drawn for clusters below both medians (the screening region) and
    for clusters containing a highlighted descriptor.
    """
    width, height = 640, 480
    margin = 60
    highlighted = set(highlight or ())

    densities = [c.density for c in diagram.clusters]
    centralities = [c.centrality for c in diagram.clusters]
    d_min, d_max = min(densities), max(densities)
    c_min, c_max = min(centralities), max(centralities)
    d_span = (d_max - d_min) or 1.0
    c_span = (c_max - c_min) or 1.0
    # pad 10% so markers never sit on the frame
    d_min, d_span = d_min - 0.1 * d_span, 1.2 * d_span
    c_min, c_span = c_min - 0.1 * c_span, 1.2 * c_span

    def x_of(density: float) -> float:
        return margin + (density - d_min) / d_span * (width - 2 * margin)

    def y_of(centrality: float) -> float:
        return height - margin - (centrality - c_min) / c_span * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 16}" text-anchor="middle" '
        f'font-size="14">density</text>',
        f'<text x="18" y="{height // 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 18 {height // 2})">centrality</text>',
    ]
    mx = x_of(diagram.median_density)
    my = y_of(diagram.median_centrality)
    parts.append(
        f'<line id="median-density" x1="{mx:.2f}" y1="{margin}" x2="{mx:.2f}" '
        f'y2="{height - margin}" stroke="gray" stroke-dasharray="4 3"/>'
    )
    parts.append(
        f'<line id="median-centrality" x1="{margin}" y1="{my:.2f}" '
        f'x2="{width - margin}" y2="{my:.2f}" stroke="gray" stroke-dasharray="4 3"/>'
    )
    for c in diagram.clusters:
        x, y = x_of(c.density), y_of(c.centrality)
        flagged = diagram.below_both_medians(c) or bool(highlighted.intersection(c.members))
        fill = "crimson" if flagged else "steelblue"
        parts.append(
            f'<circle id="cluster-{c.cluster_id}" cx="{x:.2f}" cy="{y:.2f}" r="5" '
            f'fill="{fill}"/>'
        )
        if flagged:
            parts.append(
                f'<text x="{x + 7:.2f}" y="{y - 7:.2f}" font-size="11">{_xml_escape(c.label)}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _xml_escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def export_diagram(
    diagram: StrategicalDiagram,
    fmt: str = "structured-document",
    highlight: Iterable[str] | None = None,
) -> bytes:
    """Byte-deterministic export in one of the canonical formats."""
    if fmt == "canonical-table":
        return _table_export(diagram).encode("utf-8")
    if fmt == "structured-document":
        return (json.dumps(diagram_to_dict(diagram), indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    if fmt == "vector-image":
        return _svg_export(diagram, highlight=highlight).encode("utf-8")
    raise UnknownFormat(f"unknown export format {fmt!r}; expected one of {EXPORT_FORMATS}")


def import_diagram(data: bytes) -> StrategicalDiagram:
    """Load a structured-document export back into a diagram."""
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise UnknownFormat(f"not a structured diagram document: {exc}") from exc
    return diagram_from_dict(payload)
