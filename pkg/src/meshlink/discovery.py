"""Transitive discovery sessions: source -> intermediate -> target.

A session starts from a source corpus and a source descriptor, carries
the source diagram, the marked intermediate descriptors with their
attached literatures, and the ranked target candidates.  Sessions are
immutable: every operation returns a new session with an audit entry
appended, which keeps undo trivial and makes concurrent readers safe.

Corpus contents are deliberately not part of the persisted session;
files embed corpus ids only.  A loaded session must be re-bound to its
source corpus (``bind_corpus``) before disjointness evidence can be
computed again.  Already-computed candidates survive persistence.
"""

from __future__ import annotations

import hashlib
import json
import math
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Mapping

from .diagram import (
    CdrUndefined,
    FLAG_NO_CDR,
    FLAG_STR_NEAR_ONE,
    RatioReport,
    StrategicalDiagram,
    diagram_from_dict,
    diagram_to_dict,
    locate_term,
    ratio,
)
from .medline import Corpus
from .pipeline import AnalysisConfig, analyze, config_from_params, config_to_params

__all__ = [
    "DiscoverySession",
    "SourceRef",
    "IntermediateEntry",
    "TargetCandidate",
    "AuditEntry",
    "DisjointReport",
    "UnknownTerm",
    "InvalidIntermediate",
    "UnknownIntermediate",
    "SourceTermAbsent",
    "MissingCorpus",
    "CorruptSession",
    "create_session",
    "mark_intermediate",
    "attach_intermediate_corpus",
    "candidate_targets",
    "check_disjoint",
    "save_session",
    "load_session",
    "bind_corpus",
]

SESSION_FORMAT = "discovery-session"
SESSION_VERSION = 1

EVIDENCE_LIMIT = 10


class UnknownTerm(ValueError):
    """The source descriptor appears in no document of the corpus."""


class InvalidIntermediate(ValueError):
    """Marked descriptor equals the source term or is outside the vocabulary."""


class UnknownIntermediate(ValueError):
    """The descriptor was never marked as an intermediate."""


class SourceTermAbsent(ValueError):
    """The intermediate diagram does not contain the source descriptor."""


class MissingCorpus(RuntimeError):
    """A corpus referenced by id is not bound; call bind_corpus after loading."""


class CorruptSession(ValueError):
    """Session bytes failed checksum, format or version validation."""


@dataclass(frozen=True)
class SourceRef:
    corpus_id: str
    descriptor: str
    diagram: StrategicalDiagram
    vocabulary: tuple[str, ...]  # admitted graph vocabulary, sorted


@dataclass(frozen=True)
class IntermediateEntry:
    descriptor: str
    cluster_id: int | None
    corpus_id: str | None = None
    diagram: StrategicalDiagram | None = None


@dataclass(frozen=True)
class TargetCandidate:
    descriptor: str
    intermediate: str
    cluster_id: int
    report: RatioReport | None  # None for NO_CDR clusters
    flags: tuple[str, ...]
    disjoint: bool
    evidence: tuple[str, ...]
    title_warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class AuditEntry:
    seq: int
    timestamp: str  # ISO 8601, UTC
    action: str
    detail: dict


@dataclass(frozen=True)
class DisjointReport:
    disjoint: bool
    evidence: tuple[str, ...]
    title_warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class DiscoverySession:
    session_id: str
    config: AnalysisConfig
    source: SourceRef
    intermediates: tuple[IntermediateEntry, ...] = ()
    target_candidates: tuple[TargetCandidate, ...] = ()
    audit_log: tuple[AuditEntry, ...] = ()
    # in-memory only; never persisted, never compared
    corpora: Mapping[str, Corpus] = field(default_factory=dict, compare=False, repr=False)

    def intermediate(self, descriptor: str) -> IntermediateEntry | None:
        for entry in self.intermediates:
            if entry.descriptor == descriptor:
                return entry
        return None


def _audit(session: DiscoverySession, action: str, detail: dict) -> tuple[AuditEntry, ...]:
    entry = AuditEntry(
        seq=len(session.audit_log) + 1,
        timestamp=datetime.now(timezone.utc).isoformat(),
        action=action,
        detail=detail,
    )
    return session.audit_log + (entry,)


def create_session(
    source_corpus: Corpus,
    source_descriptor: str,
    config: AnalysisConfig = AnalysisConfig(),
    session_id: str | None = None,
) -> DiscoverySession:
    """Open a session: run the pipeline on the source corpus.

    Raises UnknownTerm when the descriptor occurs in no document.  Any
    coherent literature can serve as the source; the roles are labels,
    not directions baked into the operations.
    """
    if not any(source_descriptor in doc.mesh_terms for doc in source_corpus.documents):
        raise UnknownTerm(f"{source_descriptor!r} appears in no document of the corpus")
    result = analyze(source_corpus, config)
    if result.diagram is None:
        raise ValueError("source corpus produced no clusters; nothing to explore")
    session = DiscoverySession(
        session_id=session_id or uuid.uuid4().hex,
        config=config,
        source=SourceRef(
            corpus_id=source_corpus.corpus_id,
            descriptor=source_descriptor,
            diagram=result.diagram,
            vocabulary=tuple(sorted(result.graph.vocabulary())),
        ),
        corpora={source_corpus.corpus_id: source_corpus},
    )
    return replace(
        session,
        audit_log=_audit(
            session,
            "create",
            {"corpus_id": source_corpus.corpus_id, "descriptor": source_descriptor},
        ),
    )


def bind_corpus(session: DiscoverySession, corpus: Corpus) -> DiscoverySession:
    """Attach corpus content to a loaded session (by matching id)."""
    referenced = {session.source.corpus_id} | {
        e.corpus_id for e in session.intermediates if e.corpus_id
    }
    if corpus.corpus_id not in referenced:
        raise ValueError(f"corpus {corpus.corpus_id!r} is not referenced by this session")
    return replace(session, corpora={**session.corpora, corpus.corpus_id: corpus})


def mark_intermediate(session: DiscoverySession, descriptor: str) -> DiscoverySession:
    """Record a candidate intermediate picked from the source diagram.

    Marking the same descriptor again is a no-op that still logs.
    """
    if descriptor == session.source.descriptor:
        raise InvalidIntermediate("intermediate cannot equal the source descriptor")
    if descriptor not in session.source.vocabulary:
        raise InvalidIntermediate(f"{descriptor!r} is not in the source diagram vocabulary")
    existing = session.intermediate(descriptor)
    if existing is not None:
        return replace(
            session,
            audit_log=_audit(session, "mark", {"descriptor": descriptor, "noop": True}),
        )
    cluster = locate_term(session.source.diagram, descriptor)
    entry = IntermediateEntry(
        descriptor=descriptor,
        cluster_id=cluster.cluster_id if cluster else None,
    )
    return replace(
        session,
        intermediates=session.intermediates + (entry,),
        audit_log=_audit(
            session,
            "mark",
            {"descriptor": descriptor, "cluster_id": entry.cluster_id},
        ),
    )


def attach_intermediate_corpus(
    session: DiscoverySession, descriptor: str, corpus: Corpus
) -> DiscoverySession:
    """Analyze the intermediate literature and store its diagram.

    Re-attaching replaces the previous diagram (last write wins).  The
    corpus is taken at face value as the literature for the descriptor;
    only provenance records what was actually retrieved.
    """
    entry = session.intermediate(descriptor)
    if entry is None:
        raise UnknownIntermediate(f"{descriptor!r} was never marked as an intermediate")
    result = analyze(corpus, session.config)
    if result.diagram is None:
        raise ValueError("intermediate corpus produced no clusters")
    replaced = entry.diagram is not None
    updated = replace(entry, corpus_id=corpus.corpus_id, diagram=result.diagram)
    return replace(
        session,
        intermediates=tuple(
            updated if e.descriptor == descriptor else e for e in session.intermediates
        ),
        corpora={**session.corpora, corpus.corpus_id: corpus},
        audit_log=_audit(
            session,
            "attach",
            {"descriptor": descriptor, "corpus_id": corpus.corpus_id, "replaced": replaced},
        ),
    )


def check_disjoint(corpus: Corpus, descriptor: str, strict: bool = False) -> DisjointReport:
    """Does the corpus avoid the descriptor entirely (by MeSH assignment)?

    Evidence lists up to 10 offending pmids.  Strict mode additionally
    scans titles case-insensitively; title hits are advisory warnings
    and never flip the boolean, because titles and descriptors are
    different evidence levels.
    """
    evidence = []
    title_hits = []
    needle = descriptor.lower()
    for doc in corpus.documents:
        if descriptor in doc.mesh_terms and len(evidence) < EVIDENCE_LIMIT:
            evidence.append(doc.pmid)
        if strict and needle in doc.title.lower() and len(title_hits) < EVIDENCE_LIMIT:
            title_hits.append(doc.pmid)
    return DisjointReport(
        disjoint=not evidence,
        evidence=tuple(evidence),
        title_warnings=tuple(title_hits),
    )


def _normalized_distance(diagram: StrategicalDiagram, a, b) -> float:
    """L1 distance between clusters on median-normalized coordinates.

    A zero median (possible for centrality) falls back to an unscaled
    axis rather than dividing by zero.
    """
    d_scale = diagram.median_density if diagram.median_density > 0 else 1.0
    c_scale = diagram.median_centrality if diagram.median_centrality > 0 else 1.0
    return abs(a.density - b.density) / d_scale + abs(a.centrality - b.centrality) / c_scale


def candidate_targets(
    session: DiscoverySession, descriptor: str, strict: bool = False
) -> tuple[DiscoverySession, list[TargetCandidate]]:
    """Rank the intermediate literature's cluster members as targets.

    The source descriptor's cluster in the intermediate diagram anchors
    the STR; every other cluster with a cdr is ranked by |ln STR|
    ascending, then proximity to the source cluster, then cluster id.
    Clusters without a cdr are appended last, flagged NO_CDR.  Each
    candidate carries its disjointness verdict against the source
    corpus.  Returns the updated session together with the ranking.
    """
    entry = session.intermediate(descriptor)
    if entry is None:
        raise UnknownIntermediate(f"{descriptor!r} was never marked as an intermediate")
    if entry.diagram is None:
        raise SourceTermAbsent(
            f"no literature attached for {descriptor!r}; attach a corpus first"
        )
    inter_diagram = entry.diagram
    source_descriptor = session.source.descriptor
    source_cluster = locate_term(inter_diagram, source_descriptor)
    if source_cluster is None:
        raise SourceTermAbsent(
            f"intermediate diagram has no cluster containing {source_descriptor!r}"
        )
    source_corpus = session.corpora.get(session.source.corpus_id)
    if source_corpus is None:
        raise MissingCorpus(
            f"source corpus {session.source.corpus_id!r} is not bound; call bind_corpus"
        )

    others = [c for c in inter_diagram.clusters if c.cluster_id != source_cluster.cluster_id]
    scorable = [c for c in others if c.centrality > 0]
    if source_cluster.centrality <= 0 and scorable:
        raise CdrUndefined(source_cluster.cluster_id)

    ranked_clusters = sorted(
        scorable,
        key=lambda c: (
            abs(math.log(ratio(source_cluster, c, "STR").ratio)),
            _normalized_distance(inter_diagram, source_cluster, c),
            c.cluster_id,
        ),
    )
    band_low, band_high = session.config.band

    candidates: list[TargetCandidate] = []

    def emit(cluster, report: RatioReport | None, flags: tuple[str, ...]):
        for member in cluster.members:  # members are stored sorted
            if member == source_descriptor:
                continue
            verdict = check_disjoint(source_corpus, member, strict=strict)
            candidates.append(
                TargetCandidate(
                    descriptor=member,
                    intermediate=descriptor,
                    cluster_id=cluster.cluster_id,
                    report=report,
                    flags=flags,
                    disjoint=verdict.disjoint,
                    evidence=verdict.evidence,
                    title_warnings=verdict.title_warnings,
                )
            )

    for cluster in ranked_clusters:
        report = ratio(source_cluster, cluster, "STR")
        flags = (FLAG_STR_NEAR_ONE,) if band_low <= report.ratio <= band_high else ()
        emit(cluster, report, flags)
    for cluster in sorted((c for c in others if c.centrality <= 0), key=lambda c: c.cluster_id):
        emit(cluster, None, (FLAG_NO_CDR,))

    updated = replace(
        session,
        target_candidates=tuple(candidates),
        audit_log=_audit(
            session,
            "targets",
            {"descriptor": descriptor, "candidates": len(candidates)},
        ),
    )
    return updated, candidates


# ---------------------------------------------------------------------------
# persistence

def _ratio_to_dict(report: RatioReport | None) -> dict | None:
    if report is None:
        return None
    return {
        "cluster_a": report.cluster_a,
        "cluster_b": report.cluster_b,
        "cdr_a": report.cdr_a,
        "cdr_b": report.cdr_b,
        "ratio": report.ratio,
        "kind": report.kind,
    }


def _ratio_from_dict(data: dict | None) -> RatioReport | None:
    if data is None:
        return None
    return RatioReport(**data)


def _session_payload(session: DiscoverySession) -> dict:
    return {
        "session_id": session.session_id,
        "config": config_to_params(session.config),
        "source": {
            "corpus_id": session.source.corpus_id,
            "descriptor": session.source.descriptor,
            "vocabulary": list(session.source.vocabulary),
            "diagram": diagram_to_dict(session.source.diagram),
        },
        "intermediates": [
            {
                "descriptor": e.descriptor,
                "cluster_id": e.cluster_id,
                "corpus_id": e.corpus_id,
                "diagram": diagram_to_dict(e.diagram) if e.diagram else None,
            }
            for e in session.intermediates
        ],
        "target_candidates": [
            {
                "descriptor": t.descriptor,
                "intermediate": t.intermediate,
                "cluster_id": t.cluster_id,
                "report": _ratio_to_dict(t.report),
                "flags": list(t.flags),
                "disjoint": t.disjoint,
                "evidence": list(t.evidence),
                "title_warnings": list(t.title_warnings),
            }
            for t in session.target_candidates
        ],
        "audit_log": [
            {"seq": a.seq, "timestamp": a.timestamp, "action": a.action, "detail": a.detail}
            for a in session.audit_log
        ],
    }


def _checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(canonical).hexdigest()


def save_session(session: DiscoverySession) -> bytes:
    """Versioned, checksummed JSON.  Corpora are referenced by id only."""
    payload = _session_payload(session)
    envelope = {
        "format": SESSION_FORMAT,
        "version": SESSION_VERSION,
        "checksum": _checksum(payload),
        "payload": payload,
    }
    return (json.dumps(envelope, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def load_session(data: bytes) -> DiscoverySession:
    """Inverse of save_session; raises CorruptSession on any damage."""
    try:
        envelope = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptSession(f"unreadable session bytes: {exc}") from exc
    if not isinstance(envelope, dict) or envelope.get("format") != SESSION_FORMAT:
        raise CorruptSession("not a discovery-session file")
    if envelope.get("version") != SESSION_VERSION:
        raise CorruptSession(f"unsupported session version {envelope.get('version')!r}")
    payload = envelope.get("payload")
    if not isinstance(payload, dict) or envelope.get("checksum") != _checksum(payload):
        raise CorruptSession("session checksum mismatch")
    source = payload["source"]
    return DiscoverySession(
        session_id=payload["session_id"],
        config=config_from_params(payload["config"]),
        source=SourceRef(
            corpus_id=source["corpus_id"],
            descriptor=source["descriptor"],
            vocabulary=tuple(source["vocabulary"]),
            diagram=diagram_from_dict(source["diagram"]),
        ),
        intermediates=tuple(
            IntermediateEntry(
                descriptor=e["descriptor"],
                cluster_id=e["cluster_id"],
                corpus_id=e["corpus_id"],
                diagram=diagram_from_dict(e["diagram"]) if e["diagram"] else None,
            )
            for e in payload["intermediates"]
        ),
        target_candidates=tuple(
            TargetCandidate(
                descriptor=t["descriptor"],
                intermediate=t["intermediate"],
                cluster_id=t["cluster_id"],
                report=_ratio_from_dict(t["report"]),
                flags=tuple(t["flags"]),
                disjoint=t["disjoint"],
                evidence=tuple(t["evidence"]),
                title_warnings=tuple(t["title_warnings"]),
            )
            for t in payload["target_candidates"]
        ),
        audit_log=tuple(
            AuditEntry(seq=a["seq"], timestamp=a["timestamp"], action=a["action"], detail=a["detail"])
            for a in payload["audit_log"]
        ),
    )
