from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from meshlink.medline import Corpus, Document

DATA_DIR = Path(__file__).parent / "data"


def make_corpus(term_sets, corpus_id="toy", label="toy corpus"):
    """Corpus from bare term tuples; pmids D1, D2, ..."""
    documents = tuple(
        Document(pmid=f"D{i}", title=f"document {i}", mesh_terms=tuple(terms))
        for i, terms in enumerate(term_sets, start=1)
    )
    return Corpus(corpus_id=corpus_id, label=label, documents=documents)


@pytest.fixture
def toy_corpus():
    """The 5-document worked example: all expected values derive from it."""
    return make_corpus(
        [
            ("A", "B", "C"),
            ("A", "B"),
            ("A", "B", "D"),
            ("C", "D"),
            ("A", "C"),
        ]
    )


@pytest.fixture
def data_dir():
    return DATA_DIR
