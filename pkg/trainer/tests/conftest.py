import json
import random

import pytest

from tagtrainer.iofmt import LabeledDoc, write_token_file

# Fixed 20-term entity lexicon for the synthetic corpus.
TERMS = (
    "nausea", "vomiting", "fever", "headache", "dizziness",
    "fatigue", "cough", "chills", "rash", "pruritus",
    "wheezing", "myalgia", "vertigo", "tinnitus", "palpitations",
    "photophobia", "dyspnea", "diarrhea", "insomnia", "anorexia",
)

FILLER = (
    "patient", "reports", "denies", "overnight", "stable", "plan",
    "continue", "monitor", "today", "mild", "moderate", "severe",
    "no", "new", "onset", "since", "admission", "exam", "unremarkable",
    "tolerating", "diet", "ambulating", "wound", "clean", "dry",
    "intact", "follow", "up", "with", "clinic", "daily", "vitals",
    "within", "normal", "limits", "alert", "oriented", ",", ".",
)

CATEGORIES = ("progress", "nursing", "discharge", "radiology")


def build_corpus(n_docs=50, seed=2024):
    """Synthetic docs where every word is one evaluator token, so the gold
    labels follow mechanically from lexicon membership. The last three
    documents are long enough to need several prediction windows."""
    rng = random.Random(seed)
    docs = []
    for i in range(n_docs):
        n = rng.randrange(280, 340) if i >= n_docs - 3 else rng.randrange(8, 41)
        words = [rng.choice(FILLER) for _ in range(n)]
        for _ in range(rng.randrange(2, 7)):
            words[rng.randrange(n)] = rng.choice(TERMS)
        labels = ["I-SYM" if w in TERMS else "O" for w in words]
        docs.append((f"syn-{i:03d}", words, labels))
    return docs


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    """Materialized synthetic corpus: train.tsv (teacher labels, also the
    gold) and docs.jsonl (raw documents for prediction)."""
    root = tmp_path_factory.mktemp("corpus")
    docs = build_corpus()
    write_token_file(
        [LabeledDoc(doc_id, tuple(words), tuple(labels)) for doc_id, words, labels in docs],
        root / "train.tsv",
    )
    with open(root / "docs.jsonl", "w", encoding="utf-8") as fh:
        for idx, (doc_id, words, _labels) in enumerate(docs):
            fh.write(
                json.dumps(
                    {
                        "id": doc_id,
                        "category": CATEGORIES[idx % len(CATEGORIES)],
                        "split": "unsplit",
                        "dataset": "trainer-synthetic",
                        "text": " ".join(words),
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    return root
