"""MEDLINE tagged-format parsing and corpus assembly.

MEDLINE format (the plain-text export offered by PubMed):

  - Records are separated by one or more blank lines.
  - Each field line is ``TAG - value`` where TAG is left-justified and
    padded to 4 characters (``PMID- 123``, ``TI  - Some title``,
    ``MH  - Raynaud Disease/drug therapy``).
  - Long values continue on indented lines; continuations are joined to
    the field value with a single space.
  - Multi-value fields (MH among them) repeat the tag, one value per line.

Only PMID, TI and MH are of interest here.  MH values carry optional
major-topic markers (leading ``*``) and subheadings (``/qualifier``
suffixes); both are stripped because descriptors, not qualified headings,
are the unit of analysis.  Repeats of the same descriptor within one
record (e.g. with different subheadings) collapse to a single entry.
"""

from __future__ import annotations

import gzip
import hashlib
import re
from dataclasses import dataclass, field

__all__ = [
    "Document",
    "Corpus",
    "ParseReport",
    "EmptyHeading",
    "EmptyCorpus",
    "normalize_mesh_heading",
    "parse_medline",
    "format_medline",
    "load_corpus",
    "decode_source",
    "read_medline_file",
    "corpus_to_dict",
    "corpus_from_dict",
]


class EmptyHeading(ValueError):
    """An MH value that is blank or reduces to nothing after stripping."""


class EmptyCorpus(ValueError):
    """No usable documents were found in the given sources."""


# Field line: tag of 1-4 uppercase letters/digits, space padding, dash,
# optional single space, then the value.
_TAG_LINE = re.compile(r"^([A-Z0-9]{1,4}) {0,3}-\s?(.*)$")

_GZIP_MAGIC = b"\x1f\x8b"


@dataclass(frozen=True)
class Document:
    """One MEDLINE record reduced to identifier, title and descriptor set.

    ``mesh_terms`` preserves first-occurrence order and contains bare
    descriptors only: no duplicates, no subheadings, no major-topic
    markers.
    """

    pmid: str
    title: str
    mesh_terms: tuple[str, ...]

    def __post_init__(self):
        if not self.pmid:
            raise ValueError("Document requires a non-empty pmid")


@dataclass(frozen=True)
class Corpus:
    """A labeled, pmid-deduplicated document collection."""

    corpus_id: str
    label: str
    documents: tuple[Document, ...]
    provenance: dict | None = None

    def vocabulary(self) -> set[str]:
        """All distinct descriptors appearing in the corpus."""
        terms: set[str] = set()
        for doc in self.documents:
            terms.update(doc.mesh_terms)
        return terms

    def __len__(self) -> int:
        return len(self.documents)


@dataclass
class ParseReport:
    """Counts of what a parse run accepted and skipped."""

    records: int = 0
    skipped_no_pmid: int = 0
    malformed_lines: int = 0
    notes: list[str] = field(default_factory=list)


def normalize_mesh_heading(raw: str) -> str:
    """Reduce an MH field value to its bare descriptor.

    Strips the leading major-topic marker (``*``) and everything from the
    first ``/`` onward, then trims whitespace.  Casing is preserved.

    Raises EmptyHeading when the value is blank or nothing remains.
    """
    heading = raw.strip()
    if not heading:
        raise EmptyHeading("blank MeSH heading")
    if heading.startswith("*"):
        heading = heading[1:]
    descriptor = heading.split("/", 1)[0].strip()
    if not descriptor:
        raise EmptyHeading(f"no descriptor in heading {raw!r}")
    return descriptor


def _finish_record(fields: list[tuple[str, str]], report: ParseReport) -> Document | None:
    """Assemble a Document from accumulated (tag, value) pairs."""
    if not fields:
        return None
    pmid = ""
    title = ""
    terms: list[str] = []
    seen: set[str] = set()
    for tag, value in fields:
        if tag == "PMID" and not pmid:
            pmid = value.strip()
        elif tag == "TI" and not title:
            title = value.strip()
        elif tag == "MH":
            try:
                descriptor = normalize_mesh_heading(value)
            except EmptyHeading:
                report.malformed_lines += 1
                continue
            if descriptor not in seen:
                seen.add(descriptor)
                terms.append(descriptor)
    if not pmid:
        report.skipped_no_pmid += 1
        return None
    report.records += 1
    return Document(pmid=pmid, title=title, mesh_terms=tuple(terms))


def parse_medline(text: str) -> tuple[list[Document], ParseReport]:
    """Parse MEDLINE-format text into documents plus a parse report.

    Nothing is fatal: records without a PMID are skipped and counted,
    lines that are neither tagged fields, continuations nor blanks are
    counted as malformed.
    """
    report = ParseReport()
    documents: list[Document] = []
    fields: list[tuple[str, str]] = []

    def flush():
        doc = _finish_record(fields, report)
        if doc is not None:
            documents.append(doc)
        fields.clear()

    for line in text.splitlines():
        if not line.strip():
            flush()
            continue
        if line[0].isspace():
            # continuation of the previous field value
            if fields:
                tag, value = fields[-1]
                fields[-1] = (tag, value + " " + line.strip())
            else:
                report.malformed_lines += 1
            continue
        match = _TAG_LINE.match(line)
        if match is None:
            report.malformed_lines += 1
            continue
        fields.append((match.group(1), match.group(2)))
    flush()
    return documents, report


def format_medline(documents: list[Document] | tuple[Document, ...]) -> str:
    """Serialize documents back to canonical MEDLINE text.

    The counterpart of parse_medline: parsing the output yields the same
    documents.  Used for fixtures and round-trip checks.
    """
    blocks = []
    for doc in documents:
        lines = [f"PMID- {doc.pmid}"]
        if doc.title:
            lines.append(f"TI  - {doc.title}")
        for term in doc.mesh_terms:
            lines.append(f"MH  - {term}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def _content_id(documents: list[Document]) -> str:
    digest = hashlib.sha256()
    for doc in documents:
        digest.update(doc.pmid.encode("utf-8"))
        digest.update(b"\x1f")
        digest.update(doc.title.encode("utf-8"))
        for term in doc.mesh_terms:
            digest.update(b"\x1e")
            digest.update(term.encode("utf-8"))
        digest.update(b"\x1d")
    return digest.hexdigest()[:12]


def load_corpus(
    sources: list[str],
    label: str,
    provenance: dict | None = None,
    corpus_id: str | None = None,
) -> Corpus:
    """Merge MEDLINE text blobs into one corpus.

    Duplicate pmids collapse to their first occurrence.  The corpus id
    defaults to a content hash, so identical inputs always produce the
    same id.  Raises EmptyCorpus when no document survives.
    """
    if not sources:
        raise EmptyCorpus("no sources given")
    merged: list[Document] = []
    seen: set[str] = set()
    total_records = 0
    duplicates = 0
    for source in sources:
        docs, report = parse_medline(source)
        total_records += report.records
        for doc in docs:
            if doc.pmid in seen:
                duplicates += 1
                continue
            seen.add(doc.pmid)
            merged.append(doc)
    if not merged:
        raise EmptyCorpus(f"no parseable documents in {len(sources)} source(s)")
    meta = dict(provenance) if provenance else {}
    meta.setdefault("sources", len(sources))
    meta.setdefault("duplicates_collapsed", duplicates)
    return Corpus(
        corpus_id=corpus_id or _content_id(merged),
        label=label,
        documents=tuple(merged),
        provenance=meta,
    )


def decode_source(data: bytes) -> str:
    """Decode raw (optionally gzip-compressed) bytes into MEDLINE text.

    Gzip is recognised by magic bytes; text is treated as UTF-8 with
    lossy replacement of invalid byte sequences.
    """
    if data[:2] == _GZIP_MAGIC:
        data = gzip.decompress(data)
    return data.decode("utf-8", errors="replace")


def read_medline_file(path) -> str:
    """Read a MEDLINE file from disk, transparently handling gzip."""
    with open(path, "rb") as handle:
        return decode_source(handle.read())


def corpus_to_dict(corpus: Corpus) -> dict:
    """Plain-dict form of a corpus, for JSON persistence."""
    return {
        "corpus_id": corpus.corpus_id,
        "label": corpus.label,
        "provenance": corpus.provenance,
        "documents": [
            {"pmid": d.pmid, "title": d.title, "mesh_terms": list(d.mesh_terms)}
            for d in corpus.documents
        ],
    }


def corpus_from_dict(data: dict) -> Corpus:
    return Corpus(
        corpus_id=data["corpus_id"],
        label=data["label"],
        provenance=data.get("provenance"),
        documents=tuple(
            Document(pmid=d["pmid"], title=d["title"], mesh_terms=tuple(d["mesh_terms"]))
            for d in data["documents"]
        ),
    )
