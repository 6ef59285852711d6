"""Tag documents with a trained artifact, emitting the evaluator's formats.

Each word takes the prediction of its first subword; when windows overlap,
the window where that subword sits farthest from an edge wins, earlier
window on ties. Output tokenization is exactly the evaluator's, so offsets
line up by construction; a count mismatch aborts naming the document.
"""

from __future__ import annotations

import time
from pathlib import Path

import torch

from .errors import AlignmentError
from .iofmt import InputDoc, LabeledDoc, read_documents, write_token_file, write_usage
from .tokening import tokenize
from .training import encode_words, load_artifact, window_spans

DEFAULT_SYSTEM = "distilled-tagger"


def _predict_doc(doc: InputDoc, encoder, model, labels, budget) -> LabeledDoc:
    words = [t.text for t in tokenize(doc.text)]
    if not words:
        return LabeledDoc(doc.doc_id, (), ())
    pieces, firsts = encode_words(encoder, words)
    spans = window_spans(len(pieces), budget)

    # best prediction per first-subword position: (interior margin, -order)
    best: dict[int, tuple[int, int, int]] = {}
    with torch.no_grad():
        for order, (start, end) in enumerate(spans):
            ids = [encoder.cls_id] + pieces[start:end] + [encoder.sep_id]
            logits = model(
                input_ids=torch.tensor([ids], dtype=torch.long),
                attention_mask=torch.ones((1, len(ids)), dtype=torch.long),
            ).logits[0]
            predicted = logits.argmax(dim=-1).tolist()
            for p in range(start, end):
                margin = min(p - start, end - 1 - p)
                candidate = (margin, -order, predicted[1 + p - start])
                if p not in best or candidate[:2] > best[p][:2]:
                    best[p] = candidate

    word_labels = []
    for first in firsts:
        if first not in best:
            raise AlignmentError(
                f"doc {doc.doc_id!r}: no prediction for token at subword {first}"
            )
        word_labels.append(labels[best[first][2]])
    if len(word_labels) != len(words):
        raise AlignmentError(
            f"doc {doc.doc_id!r}: {len(words)} tokens but {len(word_labels)} predictions"
        )
    return LabeledDoc(doc.doc_id, tuple(words), tuple(word_labels))


def predict_tags(
    artifact_dir,
    documents_file,
    out_path,
    usage_path=None,
    system: str = DEFAULT_SYSTEM,
) -> Path:
    """Label every document in the file; write the token TSV and, optionally,
    per-note usage rows with measured inference seconds."""
    meta, encoder, model = load_artifact(artifact_dir)
    labels = meta["labels"]
    budget = meta["max_seq_len"] - 2
    docs = read_documents(documents_file)

    tagged = []
    usage_rows = []
    for doc in docs:
        started = time.perf_counter()
        tagged.append(_predict_doc(doc, encoder, model, labels, budget))
        elapsed = time.perf_counter() - started
        usage_rows.append(
            {
                "system": system,
                "doc_id": doc.doc_id,
                "latency_s": round(elapsed, 6),
                "inference_seconds": round(elapsed, 6),
            }
        )

    out_path = Path(out_path)
    write_token_file(tagged, out_path, header={"config_hash": meta["config_hash"]})
    if usage_path is not None:
        write_usage(usage_rows, usage_path)
    return out_path
