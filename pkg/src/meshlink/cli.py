"""Batch front end: analyze corpora, rank suggestions, drive sessions.

Every subcommand is a thin adapter over the library; outputs are
byte-identical across repeated runs on identical inputs.  The exit-code
map is part of the interface and scripts may rely on it:

    0  success
    1  usage error (bad flags or values; nothing was read or written)
    2  I/O error (missing or unreadable files, corrupt artifacts,
       network failure)
    3  empty corpus, or a corpus that yields no clusters
    4  unknown or ineligible descriptor
    5  workflow-order violation (operation needs an earlier step)

Numeric options are validated before any file is opened.  Session files
are written to a temporary file and atomically renamed, so an
interrupted run never leaves a corrupt session behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .cluster import clusters_to_table
from .diagram import (
    CdrUndefined,
    NoClusters,
    UnknownFormat,
    export_diagram,
    import_diagram,
    locate_term,
    suggest_intermediates,
)
from .discovery import (
    CorruptSession,
    InvalidIntermediate,
    MissingCorpus,
    SourceTermAbsent,
    UnknownIntermediate,
    UnknownTerm,
    attach_intermediate_corpus,
    bind_corpus,
    candidate_targets,
    create_session,
    load_session,
    mark_intermediate,
    save_session,
)
from .medline import EmptyCorpus, load_corpus, read_medline_file
from .pipeline import AnalysisConfig, analyze
from .pubmed import (
    EntrezClient,
    FetchSpec,
    NetworkError,
    RecordedTransport,
    ServiceError,
)

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_EMPTY = 3
EXIT_UNKNOWN_TERM = 4
EXIT_WORKFLOW = 5

FORMAT_EXTENSIONS = {
    "structured-document": "json",
    "canonical-table": "tsv",
    "vector-image": "svg",
}


class _CliError(Exception):
    """Terminate the command with a specific exit code and message."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit 2 by default; we reserve 2 for I/O."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# shared plumbing

def _add_config_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--threshold", type=float, default=0.05,
                        help="minimum equivalence index for an edge (default 0.05)")
    parser.add_argument("--min-doc-freq", type=int, default=2,
                        help="minimum documents per admitted term (default 2)")
    parser.add_argument("--stoplist", type=Path, default=None,
                        help="file of descriptors to exclude, one per line")
    parser.add_argument("--min-cluster", type=int, default=3,
                        help="smallest emitted cluster (default 3)")
    parser.add_argument("--max-cluster", type=int, default=10,
                        help="largest emitted cluster (default 10)")
    _add_band_flags(parser)


def _add_band_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--band-low", type=float, default=0.5,
                        help="lower edge of the near-one ratio band (default 0.5)")
    parser.add_argument("--band-high", type=float, default=2.0,
                        help="upper edge of the near-one ratio band (default 2.0)")


def _validate_band(args):
    if not 0 < args.band_low <= args.band_high:
        raise _CliError(
            EXIT_USAGE,
            f"ratio band [{args.band_low}, {args.band_high}] must satisfy 0 < low <= high",
        )


def _build_config(args) -> AnalysisConfig:
    """Validate every numeric option, then (and only then) read the stoplist."""
    if not 0 < args.threshold <= 1:
        raise _CliError(EXIT_USAGE, f"--threshold must be in (0, 1], got {args.threshold}")
    if args.min_doc_freq < 1:
        raise _CliError(EXIT_USAGE, f"--min-doc-freq must be >= 1, got {args.min_doc_freq}")
    if args.min_cluster < 2:
        raise _CliError(EXIT_USAGE, f"--min-cluster must be >= 2, got {args.min_cluster}")
    if args.max_cluster < args.min_cluster:
        raise _CliError(
            EXIT_USAGE,
            f"--max-cluster ({args.max_cluster}) must be >= --min-cluster ({args.min_cluster})",
        )
    _validate_band(args)
    stoplist = _read_stoplist(args.stoplist) if args.stoplist else frozenset()
    return AnalysisConfig(
        threshold=args.threshold,
        min_doc_freq=args.min_doc_freq,
        stoplist=stoplist,
        min_cluster_size=args.min_cluster,
        max_cluster_size=args.max_cluster,
        band_low=args.band_low,
        band_high=args.band_high,
    )


def _read_stoplist(path: Path) -> frozenset[str]:
    entries = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.add(line)
    return frozenset(entries)


def _load_corpus_from_paths(paths, label: str | None) -> "Corpus":
    sources = [read_medline_file(path) for path in paths]
    return load_corpus(
        sources,
        label=label or Path(paths[0]).stem,
        provenance={"paths": [str(p) for p in paths]},
    )


def _write_atomic(path, data: bytes):
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent or "."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _read_session(path) -> "DiscoverySession":
    return load_session(Path(path).read_bytes())


# ---------------------------------------------------------------------------
# subcommands

def cmd_analyze(args) -> int:
    config = _build_config(args)
    corpus = _load_corpus_from_paths(args.inputs, args.label)
    result = analyze(corpus, config)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "clusters.tsv").write_bytes(clusters_to_table(result.clusters).encode("utf-8"))
        if result.diagram is not None:
            extension = FORMAT_EXTENSIONS[args.format]
            (out / f"diagram.{extension}").write_bytes(
                export_diagram(result.diagram, args.format)
            )
    print(
        f"documents={len(corpus.documents)} "
        f"terms={len(corpus.vocabulary())} "
        f"clusters={len(result.clusters)}"
    )
    return EXIT_OK


def cmd_suggest(args) -> int:
    _validate_band(args)
    diagram = import_diagram(Path(args.diagram).read_bytes())
    cluster = locate_term(diagram, args.descriptor)
    if cluster is None:
        raise _CliError(
            EXIT_UNKNOWN_TERM,
            f"descriptor {args.descriptor!r} is not a member of any cluster",
        )
    suggestions = suggest_intermediates(
        diagram, cluster, band=(args.band_low, args.band_high)
    )
    for s in suggestions:
        score = repr(s.score) if s.score is not None else "-"
        sir = repr(s.sir.ratio) if s.sir is not None else "-"
        flags = ",".join(s.flags) if s.flags else "-"
        print(f"{s.cluster.cluster_id}\t{s.cluster.label}\t{score}\t{sir}\t{flags}")
    return EXIT_OK


def cmd_session_create(args) -> int:
    config = _build_config(args)
    corpus = _load_corpus_from_paths(args.inputs, args.label)
    try:
        session = create_session(corpus, args.term, config)
    except UnknownTerm:
        raise
    except ValueError as exc:  # corpus produced no clusters
        raise _CliError(EXIT_EMPTY, str(exc))
    _write_atomic(args.session, save_session(session))
    print(
        f"session={session.session_id} "
        f"corpus={corpus.corpus_id} "
        f"clusters={len(session.source.diagram.clusters)}"
    )
    return EXIT_OK


def cmd_session_mark(args) -> int:
    session = _read_session(args.session)
    session = mark_intermediate(session, args.descriptor)
    _write_atomic(args.session, save_session(session))
    entry = session.intermediate(args.descriptor)
    cluster = entry.cluster_id if entry.cluster_id is not None else "-"
    print(f"marked={args.descriptor} cluster={cluster}")
    return EXIT_OK


def cmd_session_attach(args) -> int:
    session = _read_session(args.session)
    corpus = _load_corpus_from_paths(args.inputs, args.label)
    try:
        session = attach_intermediate_corpus(session, args.descriptor, corpus)
    except UnknownIntermediate:
        raise
    except ValueError as exc:  # corpus produced no clusters
        raise _CliError(EXIT_EMPTY, str(exc))
    _write_atomic(args.session, save_session(session))
    entry = session.intermediate(args.descriptor)
    print(
        f"attached={args.descriptor} "
        f"corpus={corpus.corpus_id} "
        f"clusters={len(entry.diagram.clusters)}"
    )
    return EXIT_OK


def cmd_session_targets(args) -> int:
    session = _read_session(args.session)
    if args.corpus:
        corpus = _load_corpus_from_paths(args.corpus, None)
        try:
            session = bind_corpus(session, corpus)
        except ValueError as exc:
            raise _CliError(EXIT_IO, str(exc))
    session, candidates = candidate_targets(session, args.descriptor, strict=args.strict)
    _write_atomic(args.session, save_session(session))
    for c in candidates:
        str_ratio = repr(c.report.ratio) if c.report is not None else "-"
        flags = ",".join(c.flags) if c.flags else "-"
        evidence = ";".join(c.evidence) if c.evidence else "-"
        disjoint = "yes" if c.disjoint else "no"
        print(f"{c.descriptor}\t{c.cluster_id}\t{str_ratio}\t{flags}\t{disjoint}\t{evidence}")
    return EXIT_OK


def cmd_session_show(args) -> int:
    session = _read_session(args.session)
    print(f"session={session.session_id}")
    print(f"source={session.source.descriptor} corpus={session.source.corpus_id}")
    print(
        f"intermediates={len(session.intermediates)} "
        f"candidates={len(session.target_candidates)}"
    )
    for entry in session.audit_log:
        detail = json.dumps(entry.detail, sort_keys=True)
        print(f"#{entry.seq} {entry.timestamp} {entry.action} {detail}")
    return EXIT_OK


def cmd_fetch(args) -> int:
    try:
        spec = FetchSpec(
            query=args.query,
            date_from=args.date_from,
            date_to=args.date_to,
            batch_size=args.batch_size,
            polite_delay=args.polite_delay,
        )
    except ValueError as exc:
        raise _CliError(EXIT_USAGE, str(exc))
    transport = RecordedTransport(args.replay) if args.replay else None
    client = EntrezClient(
        base_url=args.base_url, api_key=args.api_key, transport=transport
    )
    try:
        ids = client.search_ids(spec)
        text = client.fetch_medline(ids, spec)
    except NetworkError as exc:
        raise _CliError(EXIT_IO, f"{exc} (progress before failure: {exc.partial})")
    except ServiceError as exc:
        raise _CliError(EXIT_IO, str(exc))
    except LookupError as exc:  # replay directory has no matching recording
        raise _CliError(EXIT_IO, str(exc))
    summary = f"pmids={len(ids)} records={text.count('PMID-')}"
    if args.out is not None:
        _write_atomic(args.out, text.encode("utf-8"))
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="meshlink",
        description="Co-word analysis and transitive discovery over MEDLINE records.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser(
        "analyze", help="build the equivalence graph, clusters and diagram"
    )
    p_analyze.add_argument("inputs", nargs="+", help="MEDLINE files (optionally .gz)")
    p_analyze.add_argument("--label", default=None, help="corpus label")
    _add_config_flags(p_analyze)
    p_analyze.add_argument(
        "--format",
        choices=sorted(FORMAT_EXTENSIONS),
        default="structured-document",
        help="diagram export format (default structured-document)",
    )
    p_analyze.add_argument("--out", default=None, help="directory for artifacts")
    p_analyze.set_defaults(func=cmd_analyze)

    p_suggest = sub.add_parser(
        "suggest", help="rank candidate intermediate clusters from a diagram artifact"
    )
    p_suggest.add_argument("diagram", help="structured-document diagram file")
    p_suggest.add_argument("descriptor", help="source descriptor")
    _add_band_flags(p_suggest)
    p_suggest.set_defaults(func=cmd_suggest)

    p_session = sub.add_parser("session", help="drive a discovery session file")
    session_sub = p_session.add_subparsers(dest="session_command", required=True)

    p_create = session_sub.add_parser("create", help="open a session from a source corpus")
    p_create.add_argument("inputs", nargs="+", help="MEDLINE files for the source corpus")
    p_create.add_argument("--term", required=True, help="source descriptor")
    p_create.add_argument("--label", default=None)
    p_create.add_argument("--session", required=True, help="session file to write")
    _add_config_flags(p_create)
    p_create.set_defaults(func=cmd_session_create)

    p_mark = session_sub.add_parser("mark", help="mark an intermediate descriptor")
    p_mark.add_argument("descriptor")
    p_mark.add_argument("--session", required=True)
    p_mark.set_defaults(func=cmd_session_mark)

    p_attach = session_sub.add_parser(
        "attach", help="attach the literature for a marked intermediate"
    )
    p_attach.add_argument("descriptor")
    p_attach.add_argument("inputs", nargs="+", help="MEDLINE files for the intermediate corpus")
    p_attach.add_argument("--label", default=None)
    p_attach.add_argument("--session", required=True)
    p_attach.set_defaults(func=cmd_session_attach)

    p_targets = session_sub.add_parser(
        "targets", help="rank target candidates from an attached intermediate"
    )
    p_targets.add_argument("descriptor")
    p_targets.add_argument("--session", required=True)
    p_targets.add_argument(
        "--corpus",
        nargs="+",
        default=None,
        help="re-supply the source corpus files (required after reloading a session)",
    )
    p_targets.add_argument(
        "--strict", action="store_true", help="also scan titles for advisory warnings"
    )
    p_targets.set_defaults(func=cmd_session_targets)

    p_show = session_sub.add_parser("show", help="print the session summary and audit log")
    p_show.add_argument("--session", required=True)
    p_show.set_defaults(func=cmd_session_show)

    p_fetch = sub.add_parser("fetch", help="retrieve MEDLINE records from E-utilities")
    p_fetch.add_argument("--query", required=True)
    p_fetch.add_argument("--date-from", type=int, default=None)
    p_fetch.add_argument("--date-to", type=int, default=None)
    p_fetch.add_argument("--batch-size", type=int, default=200)
    p_fetch.add_argument("--polite-delay", type=int, default=350,
                         help="milliseconds between requests (default 350)")
    p_fetch.add_argument("--api-key", default=None)
    p_fetch.add_argument("--base-url", default="https://eutils.ncbi.nlm.nih.gov/entrez/eutils")
    p_fetch.add_argument("--replay", default=None,
                         help="replay recorded responses from this fixture directory")
    p_fetch.add_argument("--out", default=None, help="write records to this file")
    p_fetch.set_defaults(func=cmd_fetch)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"meshlink: error: {exc.message}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"meshlink: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CorruptSession, UnknownFormat) as exc:
        print(f"meshlink: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (EmptyCorpus, NoClusters) as exc:
        print(f"meshlink: error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (UnknownTerm, InvalidIntermediate) as exc:
        print(f"meshlink: error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_TERM
    except (UnknownIntermediate, SourceTermAbsent, MissingCorpus, CdrUndefined) as exc:
        print(f"meshlink: error: {exc}", file=sys.stderr)
        return EXIT_WORKFLOW


if __name__ == "__main__":
    raise SystemExit(main())
