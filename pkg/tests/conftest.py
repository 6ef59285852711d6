from pathlib import Path

import pytest

from notedistill.corpus import Document
from notedistill.spanlab import Token, TokenLabelSequence

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def make_seq(doc_id: str, pairs) -> TokenLabelSequence:
    """Build a sequence from (text, label) pairs with canonical offsets,
    matching what read_token_file reconstructs."""
    tokens = []
    labels = []
    pos = 0
    for text, label in pairs:
        tokens.append(Token(text, pos, pos + len(text)))
        labels.append(label)
        pos += len(text) + 1
    return TokenLabelSequence(doc_id, tuple(tokens), tuple(labels))


def make_doc(doc_id: str, text: str = "some note text", category: str = "progress",
             dataset: str = "toy", split: str = "unsplit") -> Document:
    return Document(id=doc_id, text=text, category=category, dataset=dataset, split=split)


@pytest.fixture
def fixtures_dir() -> Path:
    assert FIXTURES.is_dir(), "run scripts/build_fixtures.py first"
    return FIXTURES
