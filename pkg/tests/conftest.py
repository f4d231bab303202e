from pathlib import Path

import pytest

from catenae.text import Document, TokenizeConfig, load_corpus, make_document

DATA = Path(__file__).parent / "data"
CORPUS30 = DATA / "corpus30"


def doc_from(text: str, doc_id: str = "d1", **config) -> Document:
    return make_document(doc_id, text, TokenizeConfig(**config) if config else None)


@pytest.fixture(scope="session")
def corpus30():
    return load_corpus(CORPUS30 / "docs")


@pytest.fixture(scope="session")
def corpus30_paths():
    return {
        "docs": CORPUS30 / "docs",
        "annotations": CORPUS30 / "annotations",
        "synonyms": CORPUS30 / "synonyms.tsv",
        "identity_synonyms": CORPUS30 / "identity_synonyms.tsv",
        "phrases": CORPUS30 / "phrases.txt",
        "queries": CORPUS30 / "queries.tsv",
        "qrels": CORPUS30 / "qrels.txt",
    }
