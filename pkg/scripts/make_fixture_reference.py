"""Regenerate the committed reference artifacts for the bundled corpora.

The reference directory (tests/data/reference/<name>/) holds the exact
bytes the ``analyze`` command must reproduce: clusters.tsv, diagram.json
and the one-line stdout summary.  To keep the reference independent of
the library's counting and clustering code, the cluster structure is
recomputed here with the naive reference implementations from
tests/oracles.py and cross-checked field by field -- exact float
equality, not approximate -- against the library pipeline before
anything is written.  Only the serialization layer is shared, which is
deliberate: the reference pins rendering as well as arithmetic.

Usage:

    python3 scripts/make_fixture_reference.py
    python3 scripts/make_fixture_reference.py --fixture tests/data/raynaud_50.txt \
        --out tests/data/reference/raynaud_50
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "tests"))

from oracles import oracle_clusters, oracle_edges  # noqa: E402

from meshlink.cluster import clusters_to_table  # noqa: E402
from meshlink.diagram import export_diagram  # noqa: E402
from meshlink.medline import load_corpus, read_medline_file  # noqa: E402
from meshlink.pipeline import AnalysisConfig, analyze  # noqa: E402


def check_against_reference(corpus, result, config: AnalysisConfig) -> None:
    """Assert the library result matches the naive implementations exactly."""
    admitted, edges = oracle_edges(
        corpus.documents, config.threshold, config.min_doc_freq, config.stoplist
    )
    reference = oracle_clusters(
        edges, admitted, min_size=config.min_cluster_size, max_size=config.max_cluster_size
    )
    if len(reference) != len(result.clusters):
        raise AssertionError(
            f"cluster count mismatch: reference {len(reference)}, "
            f"library {len(result.clusters)}"
        )
    for ref, got in zip(reference, result.clusters):
        for field in ("cluster_id", "members", "label"):
            if ref[field] != getattr(got, field):
                raise AssertionError(
                    f"cluster {ref['cluster_id']}: {field} mismatch: "
                    f"{ref[field]!r} != {getattr(got, field)!r}"
                )
        for field in ("density", "centrality", "seed_e"):
            if ref[field] != getattr(got, field):  # exact, not approximate
                raise AssertionError(
                    f"cluster {ref['cluster_id']}: {field} differs in the last bit: "
                    f"{ref[field]!r} != {getattr(got, field)!r}"
                )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--fixture",
        default=str(REPO_ROOT / "tests" / "data" / "raynaud_50.txt"),
        help="MEDLINE fixture to analyze",
    )
    parser.add_argument(
        "--out",
        default=str(REPO_ROOT / "tests" / "data" / "reference" / "raynaud_50"),
        help="directory for the reference artifacts",
    )
    parser.add_argument("--threshold", type=float, default=0.05)
    parser.add_argument("--min-doc-freq", type=int, default=2)
    args = parser.parse_args(argv)

    config = AnalysisConfig(threshold=args.threshold, min_doc_freq=args.min_doc_freq)
    fixture = Path(args.fixture)
    corpus = load_corpus([read_medline_file(fixture)], label=fixture.stem)
    result = analyze(corpus, config)
    check_against_reference(corpus, result, config)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "clusters.tsv").write_bytes(clusters_to_table(result.clusters).encode("utf-8"))
    if result.diagram is not None:
        (out / "diagram.json").write_bytes(
            export_diagram(result.diagram, "structured-document")
        )
    summary = (
        f"documents={len(corpus.documents)} "
        f"terms={len(corpus.vocabulary())} "
        f"clusters={len(result.clusters)}\n"
    )
    (out / "summary.txt").write_text(summary)
    print(f"wrote {out}/clusters.tsv, diagram.json, summary.txt")
    print(summary, end="")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
