"""Document corpus: loading, deterministic sampling, and summary statistics."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .errors import CorpusError
from .spanlab import tokenize

SPLITS = ("train", "dev", "test", "unsplit")
_FIELDS = ("id", "text", "category", "dataset", "split")
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True, slots=True)
class Document:
    id: str
    text: str
    category: str
    dataset: str
    split: str = "unsplit"

    def __post_init__(self):
        if not self.id:
            raise CorpusError("document id must be non-empty")
        if not self.text:
            raise CorpusError(f"document {self.id!r}: text must be non-empty")
        if self.split not in SPLITS:
            raise CorpusError(f"document {self.id!r}: unknown split {self.split!r}")


@dataclass(frozen=True, slots=True)
class CorpusManifest:
    """Corpus summary. Both median conventions are kept: ``token_median_low``
    is the lower middle value, ``token_median`` the mean of the two middles."""

    dataset: str
    total: int
    counts: dict[str, int]
    token_min: int
    token_median_low: int
    token_median: float
    token_max: int


def load_corpus(path) -> list[Document]:
    """Read a line-delimited document file.

    Each non-blank line is one JSON object with exactly the fields
    id/text/category/dataset and optional split. Lines starting with "# "
    are comment headers and skipped.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip() or line.startswith("# "):
                continue
            try:
                obj = json.loads(line)
            except ValueError as exc:
                raise CorpusError(f"line {line_no}: not a valid record ({exc})") from None
            if not isinstance(obj, dict):
                raise CorpusError(f"line {line_no}: record must be an object")
            unknown = sorted(set(obj) - set(_FIELDS))
            if unknown:
                raise CorpusError(f"line {line_no}: unknown fields {unknown}")
            missing = [f for f in _FIELDS[:-1] if f not in obj]
            if missing:
                raise CorpusError(f"line {line_no}: missing fields {missing}")
            for field in obj:
                if not isinstance(obj[field], str):
                    raise CorpusError(f"line {line_no}: field {field!r} must be a string")
            try:
                doc = Document(**obj)
            except CorpusError as exc:
                raise CorpusError(f"line {line_no}: {exc}") from None
            if doc.id in seen:
                raise CorpusError(f"line {line_no}: duplicate document id {doc.id!r}")
            seen.add(doc.id)
            docs.append(doc)
    return docs


def write_corpus(
    docs: Iterable[Document], path, header: Mapping[str, str] | None = None
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            for key, value in header.items():
                fh.write(f"# {key} = {value}\n")
        for doc in docs:
            record = {
                "id": doc.id,
                "text": doc.text,
                "category": doc.category,
                "dataset": doc.dataset,
                "split": doc.split,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def _seeded_shuffle(items: list, seed: int) -> None:
    """In-place Fisher-Yates driven by a 64-bit-seeded generator."""
    rng = random.Random(seed & _MASK64)
    for i in range(len(items) - 1, 0, -1):
        j = rng.randrange(i + 1)
        items[i], items[j] = items[j], items[i]


def stratified_sample(
    docs: Sequence[Document], quota: Mapping[str, int], seed: int
) -> list[Document]:
    """Draw per-category quotas deterministically.

    Documents are sorted by id, shuffled once with the seeded generator, then
    taken per category until each quota fills. Output is sorted by id. A
    category without enough documents is an error naming the category.
    """
    pool = sorted(docs, key=lambda d: d.id)
    _seeded_shuffle(pool, seed)
    wanted = {c: int(n) for c, n in quota.items()}
    for category, n in wanted.items():
        if n < 0:
            raise CorpusError(f"quota for category {category!r} is negative")
        available = sum(1 for d in docs if d.category == category)
        if available < n:
            raise CorpusError(
                f"category {category!r}: quota {n} exceeds available {available}"
            )
    taken: dict[str, int] = {c: 0 for c in wanted}
    out = []
    for doc in pool:
        need = wanted.get(doc.category, 0)
        if taken.get(doc.category, 0) < need:
            taken[doc.category] += 1
            out.append(doc)
    return sorted(out, key=lambda d: d.id)


def sample_dev(docs: Sequence[Document], n: int, seed: int) -> list[Document]:
    """Pick n train documents and reassign them to the dev split.

    Returns only the selected documents, sorted by id. Selection is the same
    documented shuffle used by stratified_sample.
    """
    candidates = sorted((d for d in docs if d.split == "train"), key=lambda d: d.id)
    if n < 0:
        raise CorpusError("dev sample size is negative")
    if n > len(candidates):
        raise CorpusError(
            f"dev sample size {n} exceeds {len(candidates)} train documents"
        )
    _seeded_shuffle(candidates, seed)
    chosen = candidates[:n]
    return sorted((replace(d, split="dev") for d in chosen), key=lambda d: d.id)


def corpus_stats(docs: Sequence[Document]) -> CorpusManifest:
    """Summarize a corpus: per-split counts and per-document token counts."""
    if not docs:
        raise CorpusError("empty corpus")
    counts: dict[str, int] = {}
    token_counts = []
    for doc in docs:
        counts[doc.split] = counts.get(doc.split, 0) + 1
        token_counts.append(len(tokenize(doc.text)))
    token_counts.sort()
    n = len(token_counts)
    low = token_counts[(n - 1) // 2]
    mid = (token_counts[(n - 1) // 2] + token_counts[n // 2]) / 2
    datasets = sorted({doc.dataset for doc in docs})
    return CorpusManifest(
        dataset="+".join(datasets),
        total=n,
        counts=dict(sorted(counts.items())),
        token_min=token_counts[0],
        token_median_low=low,
        token_median=mid,
        token_max=token_counts[-1],
    )
