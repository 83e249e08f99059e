from __future__ import annotations

import json
import math

import pytest
from hypothesis import given, strategies as st

from meshlink.cluster import Cluster, build_clusters
from meshlink.cooccur import build_graph
from meshlink.diagram import (
    FLAG_BELOW_MEDIANS,
    FLAG_HIGHLIGHTED,
    FLAG_NO_CDR,
    FLAG_SIR_NEAR_ONE,
    CdrUndefined,
    NoClusters,
    UnknownFormat,
    build_diagram,
    cdr,
    diagram_from_dict,
    diagram_to_dict,
    export_diagram,
    import_diagram,
    locate_term,
    ratio,
    suggest_intermediates,
)


def mk(cluster_id: int, density: float, centrality: float, members=None, seed_e=0.5) -> Cluster:
    members = tuple(sorted(members or (f"T{cluster_id}A", f"T{cluster_id}B", f"T{cluster_id}C")))
    return Cluster(
        cluster_id=cluster_id,
        members=members,
        label=members[0],
        density=density,
        centrality=centrality,
        seed_e=seed_e,
    )


@pytest.fixture
def toy_diagram(toy_corpus):
    graph = build_graph(toy_corpus, threshold=0.05, min_doc_freq=1)
    return build_diagram(toy_corpus.corpus_id, build_clusters(graph))


@pytest.fixture
def screening_diagram():
    """Source cluster plus one near-one intermediate and one far one."""
    return build_diagram(
        "demo",
        [
            mk(1, 0.4, 1.2),   # cdr 3.0 (source)
            mk(2, 0.3, 0.9),   # cdr 3.0 -> SIR 1.0
            mk(3, 0.2, 1.6),   # cdr 8.0 -> SIR 0.375
        ],
    )


class TestBuildDiagram:
    def test_median_odd_count(self, screening_diagram):
        assert screening_diagram.median_density == pytest.approx(0.3)
        assert screening_diagram.median_centrality == pytest.approx(1.2)

    def test_median_even_count(self):
        diagram = build_diagram(
            "d", [mk(1, 0.1, 4.0), mk(2, 0.2, 3.0), mk(3, 0.3, 2.0), mk(4, 0.5, 1.0)]
        )
        assert diagram.median_density == pytest.approx(0.25)
        assert diagram.median_centrality == pytest.approx(2.5)

    def test_clusters_sorted_by_id(self):
        diagram = build_diagram("d", [mk(2, 0.2, 1.0), mk(1, 0.1, 2.0)])
        assert [c.cluster_id for c in diagram.clusters] == [1, 2]

    def test_zero_clusters_rejected(self):
        with pytest.raises(NoClusters):
            build_diagram("d", [])

    def test_parameters_echoed(self):
        diagram = build_diagram("d", [mk(1, 0.1, 1.0)], {"threshold": 0.05})
        assert diagram.parameters == {"threshold": 0.05}

    def test_toy_medians_match_single_cluster(self, toy_diagram):
        only = toy_diagram.clusters[0]
        assert toy_diagram.median_density == only.density
        assert toy_diagram.median_centrality == only.centrality


class TestQuadrants:
    @pytest.fixture
    def diagram(self):
        # medians: density 0.2, centrality 2.0
        return build_diagram(
            "d", [mk(1, 0.1, 1.0), mk(2, 0.2, 2.0), mk(3, 0.4, 3.0)]
        )

    def test_on_median_counts_as_above(self, diagram):
        assert diagram.quadrant(diagram.cluster_by_id(2)) == "both-above"

    def test_all_tokens(self, diagram):
        assert diagram.quadrant(mk(9, 0.4, 3.0)) == "both-above"
        assert diagram.quadrant(mk(9, 0.4, 1.0)) == "density-only"
        assert diagram.quadrant(mk(9, 0.1, 3.0)) == "centrality-only"
        assert diagram.quadrant(mk(9, 0.1, 1.0)) == "both-below"

    def test_below_both_is_strict(self, diagram):
        assert diagram.below_both_medians(mk(9, 0.1, 1.0))
        assert not diagram.below_both_medians(mk(9, 0.2, 1.0))
        assert not diagram.below_both_medians(mk(9, 0.1, 2.0))

    def test_cluster_by_id_missing(self, diagram):
        assert diagram.cluster_by_id(99) is None


class TestRatios:
    def test_cdr_value(self):
        assert cdr(mk(1, 0.4, 1.2)) == pytest.approx(3.0)

    def test_cdr_undefined_carries_cluster_id(self, toy_diagram):
        only = toy_diagram.clusters[0]
        assert only.centrality == 0.0
        with pytest.raises(CdrUndefined) as excinfo:
            cdr(only)
        assert excinfo.value.cluster_id == 1

    def test_ratio_report(self):
        report = ratio(mk(1, 0.4, 1.2), mk(2, 0.2, 1.6), "SIR")
        assert report.cdr_a == pytest.approx(3.0)
        assert report.cdr_b == pytest.approx(8.0)
        assert report.ratio == pytest.approx(0.375)
        assert (report.cluster_a, report.cluster_b, report.kind) == (1, 2, "SIR")

    def test_ratio_kind_validated(self):
        with pytest.raises(ValueError):
            ratio(mk(1, 0.4, 1.2), mk(2, 0.2, 1.6), "XYZ")

    def test_ratio_propagates_undefined_side(self):
        with pytest.raises(CdrUndefined) as excinfo:
            ratio(mk(1, 0.4, 1.2), mk(2, 0.2, 0.0), "STR")
        assert excinfo.value.cluster_id == 2

    @given(
        st.tuples(
            st.floats(min_value=0.01, max_value=1.0),
            st.floats(min_value=0.01, max_value=50.0),
            st.floats(min_value=0.01, max_value=1.0),
            st.floats(min_value=0.01, max_value=50.0),
        )
    )
    def test_reciprocity(self, values):
        d_a, c_a, d_b, c_b = values
        a, b = mk(1, d_a, c_a), mk(2, d_b, c_b)
        forward = ratio(a, b, "SIR").ratio
        backward = ratio(b, a, "SIR").ratio
        assert forward * backward == pytest.approx(1.0, abs=1e-9)


class TestLocateTerm:
    def test_member_found(self, toy_diagram):
        assert locate_term(toy_diagram, "A").cluster_id == 1

    def test_absent_term(self, toy_diagram):
        assert locate_term(toy_diagram, "Z") is None


class TestSuggestIntermediates:
    def test_ranking_and_scores(self, screening_diagram):
        source = screening_diagram.cluster_by_id(1)
        suggestions = suggest_intermediates(screening_diagram, source)
        assert [s.cluster.cluster_id for s in suggestions] == [2, 3]
        near, far = suggestions
        # SIR exactly 1: |ln 1| = 0, in-band bonus only (density sits on
        # the median, so not below both)
        assert near.flags == (FLAG_SIR_NEAR_ONE,)
        assert near.score == pytest.approx(-0.5)
        assert near.sir.ratio == pytest.approx(1.0)
        # SIR 0.375 outside [0.5, 2]: bare distance
        assert far.flags == ()
        assert far.score == pytest.approx(abs(math.log(0.375)))

    def test_below_medians_bonus(self):
        diagram = build_diagram(
            "d",
            [
                mk(1, 0.4, 1.2),   # source, cdr 3
                mk(2, 0.3, 0.9),   # cdr 3, below both medians (0.35, 1.05)
                mk(3, 0.2, 1.6),   # cdr 8
                mk(4, 0.5, 0.0),   # no cdr
            ],
        )
        suggestions = suggest_intermediates(diagram, diagram.cluster_by_id(1))
        assert [s.cluster.cluster_id for s in suggestions] == [2, 3, 4]
        assert suggestions[0].flags == (FLAG_BELOW_MEDIANS, FLAG_SIR_NEAR_ONE)
        assert suggestions[0].score == pytest.approx(-1.0)
        assert suggestions[1].flags == ()

    def test_no_cdr_appended_in_id_order(self):
        diagram = build_diagram(
            "d",
            [
                mk(1, 0.4, 1.2),
                mk(2, 0.5, 0.0),
                mk(3, 0.3, 0.9),
                mk(4, 0.6, 0.0),
            ],
        )
        suggestions = suggest_intermediates(diagram, diagram.cluster_by_id(1))
        assert [s.cluster.cluster_id for s in suggestions] == [3, 2, 4]
        for s in suggestions[1:]:
            assert FLAG_NO_CDR in s.flags
            assert s.score is None and s.sir is None

    def test_highlight_flag_does_not_reorder(self, screening_diagram):
        source = screening_diagram.cluster_by_id(1)
        plain = suggest_intermediates(screening_diagram, source)
        marked = suggest_intermediates(
            screening_diagram, source, highlight={"T3A"}
        )
        assert [s.cluster.cluster_id for s in marked] == [
            s.cluster.cluster_id for s in plain
        ]
        by_id = {s.cluster.cluster_id: s for s in marked}
        assert FLAG_HIGHLIGHTED in by_id[3].flags
        assert by_id[3].score == plain[1].score

    def test_custom_band_widens_bonus(self, screening_diagram):
        source = screening_diagram.cluster_by_id(1)
        suggestions = suggest_intermediates(screening_diagram, source, band=(0.3, 3.0))
        by_id = {s.cluster.cluster_id: s for s in suggestions}
        assert FLAG_SIR_NEAR_ONE in by_id[3].flags
        assert by_id[3].score == pytest.approx(abs(math.log(0.375)) - 0.5)

    def test_invalid_band(self, screening_diagram):
        source = screening_diagram.cluster_by_id(1)
        with pytest.raises(ValueError):
            suggest_intermediates(screening_diagram, source, band=(0.0, 2.0))
        with pytest.raises(ValueError):
            suggest_intermediates(screening_diagram, source, band=(2.0, 0.5))

    def test_single_cluster_returns_empty(self, toy_diagram):
        source = toy_diagram.clusters[0]
        assert suggest_intermediates(toy_diagram, source) == []

    def test_source_without_cdr_raises_when_scoring_needed(self):
        diagram = build_diagram("d", [mk(1, 0.4, 0.0), mk(2, 0.3, 0.9)])
        with pytest.raises(CdrUndefined) as excinfo:
            suggest_intermediates(diagram, diagram.cluster_by_id(1))
        assert excinfo.value.cluster_id == 1

    @pytest.mark.parametrize("k", [0.5, 2.0, 10.0])
    def test_scale_covariance(self, k):
        base = [mk(1, 0.4, 1.2), mk(2, 0.3, 0.9), mk(3, 0.2, 1.6)]
        scaled = [
            Cluster(
                cluster_id=c.cluster_id,
                members=c.members,
                label=c.label,
                density=c.density * k,
                centrality=c.centrality * k,
                seed_e=c.seed_e,
            )
            for c in base
        ]
        d1 = build_diagram("d", base)
        d2 = build_diagram("d", scaled)
        s1 = suggest_intermediates(d1, d1.cluster_by_id(1))
        s2 = suggest_intermediates(d2, d2.cluster_by_id(1))
        assert [s.cluster.cluster_id for s in s1] == [s.cluster.cluster_id for s in s2]
        for a, b in zip(s1, s2):
            assert b.sir.ratio == pytest.approx(a.sir.ratio, rel=1e-12)
            assert b.score == pytest.approx(a.score, rel=1e-9)


class TestExports:
    def test_canonical_table_layout(self, toy_diagram):
        text = export_diagram(toy_diagram, "canonical-table").decode()
        lines = text.strip().split("\n")
        assert lines[0] == f"# corpus_ref={toy_diagram.corpus_ref}"
        assert lines[3] == "cluster_id\tlabel\tdensity\tcentrality\tquadrant"
        assert len(lines) == 5  # single data row for the single cluster
        fields = lines[4].split("\t")
        assert fields[0] == "1"
        assert fields[1] == "A"
        assert fields[4] == "both-above"
        assert float(fields[2]) == toy_diagram.clusters[0].density

    def test_structured_document_round_trip(self, screening_diagram):
        blob = export_diagram(screening_diagram, "structured-document")
        assert import_diagram(blob) == screening_diagram

    def test_structured_document_schema_fields(self, screening_diagram):
        payload = json.loads(export_diagram(screening_diagram, "structured-document"))
        assert payload["schema"] == "strategical-diagram"
        assert payload["schema_version"] == 1
        assert len(payload["clusters"]) == 3
        assert payload["clusters"][0]["quadrant"] in (
            "both-above", "density-only", "centrality-only", "both-below"
        )

    def test_exports_are_byte_deterministic(self, screening_diagram):
        for fmt in ("canonical-table", "structured-document", "vector-image"):
            assert export_diagram(screening_diagram, fmt) == export_diagram(
                screening_diagram, fmt
            )

    def test_vector_image_marker_and_median_counts(self, screening_diagram):
        svg = export_diagram(screening_diagram, "vector-image").decode()
        assert svg.count("<circle") == 3
        assert svg.count('id="median-density"') == 1
        assert svg.count('id="median-centrality"') == 1
        for cid in (1, 2, 3):
            assert f'id="cluster-{cid}"' in svg
        assert 'stroke-dasharray' in svg

    def test_vector_image_labels_screening_region(self):
        diagram = build_diagram(
            "d",
            [mk(1, 0.4, 1.2), mk(2, 0.1, 0.2), mk(3, 0.3, 0.9)],
        )
        # medians 0.3 / 0.9: cluster 2 is strictly below both
        svg = export_diagram(diagram, "vector-image").decode()
        assert "<text" in svg and "T2A" in svg
        assert "T1A" not in svg

    def test_vector_image_highlight(self, screening_diagram):
        plain = export_diagram(screening_diagram, "vector-image").decode()
        marked = export_diagram(
            screening_diagram, "vector-image", highlight={"T2B"}
        ).decode()
        assert "T2A" not in plain
        assert "T2A" in marked  # label of the highlighted cluster

    def test_vector_image_escapes_labels(self):
        cluster = mk(1, 0.1, 0.0, members=("A&B", "C<D", "E"))
        diagram = build_diagram("d", [cluster, mk(2, 0.4, 1.0)])
        svg = export_diagram(diagram, "vector-image", highlight={"E"}).decode()
        assert "A&amp;B" in svg

    def test_unknown_export_format(self, toy_diagram):
        with pytest.raises(UnknownFormat):
            export_diagram(toy_diagram, "png")

    def test_import_rejects_non_json(self):
        with pytest.raises(UnknownFormat):
            import_diagram(b"\x00\x01 not a document")

    def test_import_rejects_wrong_schema(self, screening_diagram):
        payload = diagram_to_dict(screening_diagram)
        payload["schema"] = "something-else"
        with pytest.raises(UnknownFormat):
            diagram_from_dict(payload)
        payload = diagram_to_dict(screening_diagram)
        payload["schema_version"] = 99
        with pytest.raises(UnknownFormat):
            diagram_from_dict(payload)

    def test_dict_round_trip(self, screening_diagram):
        assert diagram_from_dict(diagram_to_dict(screening_diagram)) == screening_diagram
