from __future__ import annotations

import gzip

import pytest
from hypothesis import given, strategies as st

from meshlink.medline import (
    Document,
    EmptyCorpus,
    EmptyHeading,
    corpus_from_dict,
    corpus_to_dict,
    decode_source,
    format_medline,
    load_corpus,
    normalize_mesh_heading,
    parse_medline,
)

SAMPLE_RECORD = """\
PMID- 123
TI  - Raynaud study
MH  - *Raynaud Disease/therapy
MH  - Blood Viscosity
"""

TWO_RECORDS = """\
PMID- 1
TI  - First
MH  - Magnesium/blood
MH  - Magnesium/therapeutic use

PMID- 2
TI  - Second
MH  - Migraine Disorders
"""


class TestNormalizeMeshHeading:
    def test_marker_and_subheading_stripped(self):
        assert normalize_mesh_heading("*Raynaud Disease/drug therapy") == "Raynaud Disease"

    def test_identity_for_bare_descriptor(self):
        assert normalize_mesh_heading("Magnesium") == "Magnesium"

    def test_whitespace_tolerant(self):
        assert normalize_mesh_heading("Blood Viscosity/ drug effects ") == "Blood Viscosity"

    def test_blank_raises(self):
        with pytest.raises(EmptyHeading):
            normalize_mesh_heading("   ")

    def test_marker_only_raises(self):
        with pytest.raises(EmptyHeading):
            normalize_mesh_heading("*/blood")

    @given(st.text(min_size=1).filter(lambda s: s.strip()))
    def test_output_never_carries_markers_or_subheadings(self, raw):
        try:
            descriptor = normalize_mesh_heading(raw)
        except EmptyHeading:
            return
        assert "/" not in descriptor
        assert not descriptor.startswith("*")
        assert descriptor == descriptor.strip()


class TestParseMedline:
    def test_single_record(self):
        docs, report = parse_medline(SAMPLE_RECORD)
        assert len(docs) == 1
        doc = docs[0]
        assert doc.pmid == "123"
        assert doc.title == "Raynaud study"
        assert doc.mesh_terms == ("Raynaud Disease", "Blood Viscosity")
        assert report.records == 1
        assert report.malformed_lines == 0

    def test_subheading_variants_collapse(self):
        docs, _ = parse_medline(TWO_RECORDS)
        assert docs[0].mesh_terms == ("Magnesium",)

    def test_empty_input(self):
        docs, report = parse_medline("")
        assert docs == []
        assert report.records == 0
        assert report.malformed_lines == 0

    def test_record_without_pmid_skipped_and_reported(self):
        text = "TI  - orphan record\nMH  - Something\n\n" + SAMPLE_RECORD
        docs, report = parse_medline(text)
        assert [d.pmid for d in docs] == ["123"]
        assert report.skipped_no_pmid == 1

    def test_record_without_mh_yields_empty_terms(self):
        docs, _ = parse_medline("PMID- 7\nTI  - No headings here\n")
        assert docs[0].mesh_terms == ()

    def test_continuation_lines_joined(self):
        text = "PMID- 9\nTI  - A very long title that\n      continues on the next line\n"
        docs, _ = parse_medline(text)
        assert docs[0].title == "A very long title that continues on the next line"

    def test_malformed_lines_counted_not_fatal(self):
        text = "garbage without a tag\n" + SAMPLE_RECORD
        docs, report = parse_medline(text)
        assert len(docs) == 1
        assert report.malformed_lines == 1

    def test_other_tags_ignored(self):
        text = "PMID- 5\nAB  - Some abstract text.\nAU  - Someone\nMH  - Migraine Disorders\n"
        docs, _ = parse_medline(text)
        assert docs[0].mesh_terms == ("Migraine Disorders",)

    def test_document_count_bounded_by_pmid_tags(self):
        docs, _ = parse_medline(TWO_RECORDS)
        assert len(docs) <= TWO_RECORDS.count("PMID-")

    def test_roundtrip_through_canonical_serialization(self):
        docs, _ = parse_medline(TWO_RECORDS)
        again, report = parse_medline(format_medline(docs))
        assert again == docs
        assert report.malformed_lines == 0


# documents whose fields survive canonical serialization unchanged
_descriptor = st.text(
    alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Nd"), whitelist_characters=" -,"),
    min_size=1,
    max_size=30,
).map(lambda s: s.strip()).filter(lambda s: s and "/" not in s and not s.startswith("*"))

_document = st.builds(
    Document,
    pmid=st.integers(min_value=1, max_value=10**8).map(str),
    title=_descriptor | st.just(""),
    mesh_terms=st.lists(_descriptor, max_size=6, unique=True).map(tuple),
)


@given(st.lists(_document, max_size=8, unique_by=lambda d: d.pmid))
def test_parse_is_idempotent_on_canonical_form(documents):
    text = format_medline(documents)
    parsed, _ = parse_medline(text)
    assert parsed == list(documents)
    assert format_medline(parsed) == text


class TestLoadCorpus:
    def test_duplicate_pmids_collapse_across_sources(self):
        blob_a = format_medline(
            [
                Document("1", "one", ("A",)),
                Document("2", "two", ("B",)),
                Document("3", "three", ("C",)),
            ]
        )
        blob_b = format_medline(
            [
                Document("3", "three again", ("C", "D")),
                Document("4", "four", ("D",)),
            ]
        )
        corpus = load_corpus([blob_a, blob_b], label="merged")
        assert len(corpus) == 4
        assert corpus.provenance["duplicates_collapsed"] == 1
        # first occurrence wins
        assert next(d for d in corpus.documents if d.pmid == "3").title == "three"

    def test_single_blob_counts(self):
        corpus = load_corpus([TWO_RECORDS], label="pair")
        assert len(corpus) == 2

    def test_only_malformed_records_raises(self):
        with pytest.raises(EmptyCorpus):
            load_corpus(["TI  - no pmid anywhere\n"], label="broken")

    def test_no_sources_raises(self):
        with pytest.raises(EmptyCorpus):
            load_corpus([], label="empty")

    def test_content_hash_id_is_stable(self):
        a = load_corpus([SAMPLE_RECORD], label="x")
        b = load_corpus([SAMPLE_RECORD], label="y")
        assert a.corpus_id == b.corpus_id  # label-independent

    def test_corpus_dict_roundtrip(self):
        corpus = load_corpus([TWO_RECORDS], label="pair")
        assert corpus_from_dict(corpus_to_dict(corpus)) == corpus


class TestDecodeSource:
    def test_gzip_by_magic_bytes(self):
        raw = SAMPLE_RECORD.encode("utf-8")
        assert decode_source(gzip.compress(raw)) == SAMPLE_RECORD
        assert decode_source(raw) == SAMPLE_RECORD

    def test_invalid_utf8_replaced(self):
        assert "PMID" in decode_source(b"PMID- 1\nTI  - caf\xe9\n")
