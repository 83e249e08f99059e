"""Acceptance gate: one test per criterion, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the verdict lines
in order.  The criteria rest on exact oracles, the two bundled MEDLINE
fixtures, and cross-interface equivalence runs -- not on reproducing
any historical corpus statistics.
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from meshlink.cli import main
from meshlink.cluster import ClusterConfig, build_clusters, Cluster
from meshlink.cooccur import build_graph
from meshlink.diagram import (
    CdrUndefined,
    FLAG_STR_NEAR_ONE,
    build_diagram,
    cdr,
    ratio,
    suggest_intermediates,
)
from meshlink.discovery import (
    attach_intermediate_corpus,
    candidate_targets,
    create_session,
    mark_intermediate,
)
from meshlink.medline import Corpus, Document, load_corpus, read_medline_file
from meshlink.pipeline import AnalysisConfig, analyze
from meshlink.server import ServerConfig, create_app
from meshlink.store import MemoryStore

from conftest import make_corpus
from oracles import (
    oracle_clusters,
    oracle_edges,
    oracle_term_counts,
    random_corpus_documents,
)

DATA = Path(__file__).parent / "data"
RAYNAUD = DATA / "raynaud_50.txt"
VISCOSITY = DATA / "viscosity_30.txt"
REFERENCE = DATA / "reference" / "raynaud_50"


@contextmanager
def verdict(name: str):
    try:
        yield
    except BaseException:
        print(f"[acceptance] {name}: FAIL")
        raise
    print(f"[acceptance] {name}: PASS")


def corpus_from_tuples(tuples, corpus_id="random") -> Corpus:
    documents = tuple(
        Document(pmid=pmid, title=title, mesh_terms=terms) for pmid, title, terms in tuples
    )
    return Corpus(corpus_id=corpus_id, label=corpus_id, documents=documents)


# ---------------------------------------------------------------------------

def test_toy_corpus_exactness(toy_corpus):
    with verdict("toy-corpus exactness"):
        config = AnalysisConfig(threshold=0.05, min_doc_freq=1)
        result = analyze(toy_corpus, config)
        assert result.graph.terms["A"] == 4
        assert result.graph.strength("A", "B") == 0.75
        assert len(result.graph.edges) == 6
        assert len(result.clusters) == 1
        only = result.clusters[0]
        assert only.members == ("A", "B", "C", "D")
        assert abs(only.density - 0.275463) < 1e-6          # quoted value
        assert abs(only.density - 119 / 432) < 1e-9         # exact fraction
        assert only.centrality == 0.0
        with pytest.raises(CdrUndefined):
            cdr(only)


def test_oracle_equivalence_100_random_corpora():
    with verdict("oracle equivalence (100 random corpora)"):
        started = time.perf_counter()
        for seed in range(100):
            rng = random.Random(seed)
            corpus = corpus_from_tuples(random_corpus_documents(rng), f"random-{seed}")
            threshold = rng.choice([0.02, 0.05, 0.1, 0.25])
            min_doc_freq = rng.choice([1, 2, 3])
            graph = build_graph(corpus, threshold=threshold, min_doc_freq=min_doc_freq)

            counts = oracle_term_counts(corpus.documents)
            admitted, edges = oracle_edges(corpus.documents, threshold, min_doc_freq)
            assert dict(graph.terms.counts) == admitted
            assert {(e.term_i, e.term_j): (e.c_ij, e.e_ij) for e in graph.edges} == edges
            assert all(counts[t] >= min_doc_freq for t in admitted)

            clusters = build_clusters(graph, ClusterConfig())
            expected = oracle_clusters(edges, admitted)
            assert [c.members for c in clusters] == [c["members"] for c in expected]
            assert [c.cluster_id for c in clusters] == [c["cluster_id"] for c in expected]
            assert [c.density for c in clusters] == [c["density"] for c in expected]
            assert [c.centrality for c in clusters] == [c["centrality"] for c in expected]
        elapsed = time.perf_counter() - started
        assert elapsed < 60.0, f"oracle equivalence took {elapsed:.1f}s"


def test_invariant_suite():
    with verdict("invariant suite"):
        for seed in range(25):
            rng = random.Random(1000 + seed)
            corpus = corpus_from_tuples(random_corpus_documents(rng), f"inv-{seed}")
            graph = build_graph(corpus, threshold=0.05, min_doc_freq=2)
            clusters = build_clusters(graph, ClusterConfig())

            seen: set[str] = set()
            previous_seed = None
            for cluster in clusters:
                assert 3 <= len(cluster.members) <= 10
                assert not (set(cluster.members) & seen)  # disjoint membership
                seen.update(cluster.members)
                if previous_seed is not None:
                    assert cluster.seed_e <= previous_seed  # non-increasing seeds
                previous_seed = cluster.seed_e
                assert cluster.density > 0
                assert cluster.centrality >= 0

            # threshold monotonicity: raising the threshold only removes edges
            tighter = build_graph(corpus, threshold=0.1, min_doc_freq=2)
            loose_edges = {(e.term_i, e.term_j) for e in graph.edges}
            tight_edges = {(e.term_i, e.term_j) for e in tighter.edges}
            assert tight_edges <= loose_edges

            # frequency monotonicity: raising min_doc_freq only shrinks vocabulary
            rarer = build_graph(corpus, threshold=0.05, min_doc_freq=3)
            assert rarer.vocabulary() <= graph.vocabulary()

            # document order is immaterial
            shuffled_docs = list(corpus.documents)
            rng.shuffle(shuffled_docs)
            shuffled = Corpus(
                corpus_id=corpus.corpus_id, label=corpus.label,
                documents=tuple(shuffled_docs),
            )
            regraph = build_graph(shuffled, threshold=0.05, min_doc_freq=2)
            assert [c.members for c in build_clusters(regraph, ClusterConfig())] == [
                c.members for c in clusters
            ]

        # uniform scaling of both coordinates leaves every screening
        # quantity unchanged (powers of two keep the check exact)
        base = analyze(
            load_corpus([read_medline_file(VISCOSITY)], label="v"), AnalysisConfig()
        )
        diagram = base.diagram
        source = diagram.cluster_by_id(1)
        baseline = [
            (s.cluster.cluster_id, s.flags) for s in
            suggest_intermediates(diagram, source)
        ]
        for k in (0.5, 2.0, 8.0):
            scaled_clusters = [
                Cluster(
                    cluster_id=c.cluster_id, members=c.members, label=c.label,
                    density=c.density * k, centrality=c.centrality * k,
                    seed_e=c.seed_e,
                )
                for c in diagram.clusters
            ]
            scaled = build_diagram(diagram.corpus_ref, scaled_clusters)
            for original, double in zip(diagram.clusters, scaled.clusters):
                assert scaled.quadrant(double) == diagram.quadrant(original)
                if original.centrality > 0:
                    assert cdr(double) == pytest.approx(cdr(original), rel=1e-12)
            for kind in ("SIR", "STR"):
                want = ratio(diagram.cluster_by_id(1), diagram.cluster_by_id(3), kind=kind)
                got = ratio(scaled.cluster_by_id(1), scaled.cluster_by_id(3), kind=kind)
                assert got.ratio == pytest.approx(want.ratio, rel=1e-12)
            rescored = [
                (s.cluster.cluster_id, s.flags) for s in
                suggest_intermediates(scaled, scaled.cluster_by_id(1))
            ]
            assert rescored == baseline


def test_ratio_algebra():
    with verdict("ratio algebra (reciprocity and CdrUndefined)"):
        rng = random.Random(7)
        for _ in range(200):
            a = Cluster(
                cluster_id=1, members=("A", "B", "C"), label="A",
                density=rng.uniform(0.05, 1.0), centrality=rng.uniform(0.01, 3.0),
                seed_e=1.0,
            )
            b = Cluster(
                cluster_id=2, members=("D", "E", "F"), label="D",
                density=rng.uniform(0.05, 1.0), centrality=rng.uniform(0.01, 3.0),
                seed_e=1.0,
            )
            forward = ratio(a, b, kind="SIR").ratio
            backward = ratio(b, a, kind="SIR").ratio
            assert abs(forward * backward - 1.0) < 1e-9

        grounded = Cluster(
            cluster_id=3, members=("G", "H", "I"), label="G",
            density=0.4, centrality=0.0, seed_e=1.0,
        )
        with pytest.raises(CdrUndefined):
            cdr(grounded)
        with pytest.raises(CdrUndefined):
            ratio(grounded, a, kind="STR")
        with pytest.raises(CdrUndefined):
            ratio(a, grounded, kind="STR")
        # centrality just above zero is defined
        assert cdr(Cluster(
            cluster_id=4, members=("J", "K", "L"), label="J",
            density=0.4, centrality=1e-12, seed_e=1.0,
        )) > 0


def test_fixture_determinism(tmp_path, capsys):
    with verdict("fixture determinism (5 runs vs committed reference)"):
        artifacts = []
        summaries = []
        for i in range(5):
            out = tmp_path / f"run{i}"
            assert main(["analyze", str(RAYNAUD), "--out", str(out)]) == 0
            summaries.append(capsys.readouterr().out)
            artifacts.append(
                (
                    (out / "clusters.tsv").read_bytes(),
                    (out / "diagram.json").read_bytes(),
                )
            )
        assert len(set(artifacts)) == 1
        assert len(set(summaries)) == 1
        table, document = artifacts[0]
        assert table == (REFERENCE / "clusters.tsv").read_bytes()
        assert document == (REFERENCE / "diagram.json").read_bytes()
        assert summaries[0] == (REFERENCE / "summary.txt").read_text()


def test_cross_interface_equivalence(tmp_path, capsys):
    with verdict("cross-interface equivalence (CLI vs HTTP)"):
        # CLI side
        session_file = tmp_path / "session.json"
        assert main(["session", "create", str(RAYNAUD),
                     "--term", "Raynaud Disease", "--session", str(session_file)]) == 0
        capsys.readouterr()
        assert main(["session", "mark", "Blood Viscosity",
                     "--session", str(session_file)]) == 0
        capsys.readouterr()
        assert main(["session", "attach", "Blood Viscosity", str(VISCOSITY),
                     "--session", str(session_file)]) == 0
        capsys.readouterr()
        assert main(["session", "targets", "Blood Viscosity",
                     "--session", str(session_file), "--corpus", str(RAYNAUD)]) == 0
        cli_lines = [
            line.split("\t") for line in capsys.readouterr().out.splitlines()
        ]
        cli_ranking = [
            (f[0], int(f[1]), f[3], f[4] == "yes") for f in cli_lines
        ]

        # HTTP side
        client = TestClient(
            create_app(store=MemoryStore(), config=ServerConfig(analysis_mode="inline"))
        )
        ids = {}
        for path in (RAYNAUD, VISCOSITY):
            response = client.post(
                "/corpora", files={"file": (path.name, path.read_bytes())}
            )
            assert response.status_code == 201
            ids[path.name] = response.json()["corpus_id"]
        response = client.post(
            "/sessions",
            json={"corpus_id": ids[RAYNAUD.name], "term": "Raynaud Disease"},
        )
        session_id = response.json()["session_id"]
        for body in (
            {"action": "mark", "descriptor": "Blood Viscosity"},
            {"action": "attach", "descriptor": "Blood Viscosity",
             "corpus_id": ids[VISCOSITY.name]},
        ):
            assert client.post(
                f"/sessions/{session_id}/actions", json=body
            ).status_code == 200
        response = client.post(
            f"/sessions/{session_id}/actions",
            json={"action": "targets", "descriptor": "Blood Viscosity"},
        )
        http_ranking = [
            (
                t["descriptor"],
                t["cluster_id"],
                ",".join(t["flags"]) if t["flags"] else "-",
                t["disjoint"],
            )
            for t in response.json()["targets"]
        ]
        assert cli_ranking == http_ranking
        # ratio values agree bit for bit (CLI prints repr of the float)
        cli_ratios = [f[2] for f in cli_lines]
        http_ratios = [
            "-" if t["report"] is None else repr(t["report"]["ratio"])
            for t in response.json()["targets"]
        ]
        assert cli_ratios == http_ratios


def test_performance_synthetic_corpus():
    with verdict("performance (10k docs x 2k terms < 5s)"):
        topics = [
            [f"T{topic:03d}_{i}" for i in range(10)] for topic in range(200)
        ]
        documents = []
        for doc_index in range(10_000):
            topic = doc_index % 200
            terms = list(topics[topic]) + topics[(topic + 1) % 200][:2]
            documents.append(
                Document(
                    pmid=str(doc_index + 1),
                    title=f"synthetic document {doc_index + 1}",
                    mesh_terms=tuple(terms),
                )
            )
        corpus = Corpus(corpus_id="synthetic-10k", label="synthetic", documents=tuple(documents))

        started = time.perf_counter()
        graph = build_graph(corpus, threshold=0.05, min_doc_freq=2)
        clusters = build_clusters(graph, ClusterConfig())
        elapsed = time.perf_counter() - started

        assert len(graph.terms) == 2000
        assert sum(len(d.mesh_terms) for d in documents) / len(documents) == 12.0
        assert clusters, "synthetic corpus must produce clusters"
        assert elapsed < 5.0, f"graph + clustering took {elapsed:.2f}s"
        print(f"[acceptance]   (graph + clustering: {elapsed:.2f}s, "
              f"{len(clusters)} clusters)")


def test_workflow_fidelity():
    with verdict("workflow fidelity (STR in band ranks first, STR_NEAR_ONE)"):
        source = load_corpus([read_medline_file(RAYNAUD)], label="source")
        inter = load_corpus([read_medline_file(VISCOSITY)], label="intermediate")
        session = create_session(source, "Raynaud Disease", AnalysisConfig())
        session = mark_intermediate(session, "Blood Viscosity")
        session = attach_intermediate_corpus(session, "Blood Viscosity", inter)
        session, targets = candidate_targets(session, "Blood Viscosity")

        entry = session.intermediate("Blood Viscosity")
        diagram = entry.diagram
        source_cluster = next(
            c for c in diagram.clusters if "Raynaud Disease" in c.members
        )
        candidate_cluster = next(
            c for c in diagram.clusters if "Fish Oils" in c.members
        )
        report = ratio(source_cluster, candidate_cluster, kind="STR")
        assert 0.5 <= report.ratio <= 2.0  # the fixture's whole point

        leading = targets[: len(candidate_cluster.members)]
        assert tuple(t.descriptor for t in leading) == candidate_cluster.members
        for target in leading:
            assert FLAG_STR_NEAR_ONE in target.flags
        trailing = targets[len(candidate_cluster.members):]
        assert all("NO_CDR" in t.flags for t in trailing)
