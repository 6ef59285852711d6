"""Readers and writers for the pipeline's file interfaces.

The trainer talks to the labeling pipeline only through these formats: the
token-label TSV (training input and prediction output), the documents JSONL
(prediction input), and the usage JSONL (cost accounting output).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DocumentsError, TrainFileError

KNOWN_LABELS = ("O", "I-MED", "I-DIS", "I-SYM")
_DOC_HEADER = "# doc_id = "
_DOC_FIELDS = ("id", "category", "split", "dataset", "text")


@dataclass(frozen=True, slots=True)
class LabeledDoc:
    doc_id: str
    tokens: tuple[str, ...]
    labels: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class InputDoc:
    doc_id: str
    text: str


def read_train_file(path) -> list[LabeledDoc]:
    """Parse a token-label TSV; any format or label problem names its line."""
    docs: list[LabeledDoc] = []
    seen: set[str] = set()
    doc_id: str | None = None
    tokens: list[str] = []
    labels: list[str] = []

    def close():
        nonlocal doc_id, tokens, labels
        if doc_id is not None:
            docs.append(LabeledDoc(doc_id, tuple(tokens), tuple(labels)))
            doc_id, tokens, labels = None, [], []

    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if line.startswith(_DOC_HEADER):
                close()
                doc_id = line[len(_DOC_HEADER):]
                if not doc_id:
                    raise TrainFileError(f"{path} line {line_no}: empty doc_id")
                if doc_id in seen:
                    raise TrainFileError(f"{path} line {line_no}: duplicate doc_id {doc_id!r}")
                seen.add(doc_id)
                continue
            if line.startswith("# "):
                continue
            if not line.strip():
                close()
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise TrainFileError(
                    f"{path} line {line_no}: expected token<TAB>label, got {len(parts)} fields"
                )
            token, label = parts
            if doc_id is None:
                raise TrainFileError(f"{path} line {line_no}: token line before any doc header")
            if not token or token != token.strip():
                raise TrainFileError(f"{path} line {line_no}: bad token {token!r}")
            if label not in KNOWN_LABELS:
                raise TrainFileError(f"{path} line {line_no}: unknown label {label!r}")
            tokens.append(token)
            labels.append(label)
    close()
    return docs


def single_task_labels(docs: Sequence[LabeledDoc], path="") -> list[str]:
    """The label inventory ["O", "I-<task>"] demanded of a training file."""
    entity_labels = sorted(
        {label for doc in docs for label in doc.labels if label != "O"}
    )
    if not docs:
        raise TrainFileError(f"{path}: training file has no documents")
    if not entity_labels:
        raise TrainFileError(f"{path}: no entity labels to learn from")
    if len(entity_labels) > 1:
        raise TrainFileError(
            f"{path}: expected a single task, found labels {entity_labels}"
        )
    return ["O", entity_labels[0]]


def write_token_file(
    docs: Iterable[LabeledDoc], path, header: Mapping[str, str] | None = None
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            for key, value in header.items():
                fh.write(f"# {key} = {value}\n")
        for doc in docs:
            fh.write(f"{_DOC_HEADER}{doc.doc_id}\n")
            for token, label in zip(doc.tokens, doc.labels):
                fh.write(f"{token}\t{label}\n")
            fh.write("\n")


def read_documents(path) -> list[InputDoc]:
    docs: list[InputDoc] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip() or line.startswith("# "):
                continue
            try:
                obj = json.loads(line)
            except ValueError:
                raise DocumentsError(f"{path} line {line_no}: not valid JSON") from None
            if not isinstance(obj, dict):
                raise DocumentsError(f"{path} line {line_no}: expected an object")
            missing = [f for f in _DOC_FIELDS if f not in obj]
            if missing:
                raise DocumentsError(f"{path} line {line_no}: missing fields {missing}")
            if not all(isinstance(obj[f], str) for f in _DOC_FIELDS):
                raise DocumentsError(f"{path} line {line_no}: all fields must be strings")
            if obj["id"] in seen:
                raise DocumentsError(f"{path} line {line_no}: duplicate id {obj['id']!r}")
            seen.add(obj["id"])
            docs.append(InputDoc(doc_id=obj["id"], text=obj["text"]))
    return docs


def write_usage(rows: Sequence[dict], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
