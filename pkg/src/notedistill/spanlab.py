"""Tokenization, entity grounding, IO projection, and the token-label file format.

This module owns the label vocabulary used everywhere else. A sequence label
is one of the surface strings ``O``, ``I-MED``, ``I-DIS``, ``I-SYM``; span
labels are the bare class names ``MED``, ``DIS``, ``SYM``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import SpanError, TokenFileError, TokenMismatchError

LABEL_CLASSES = ("MED", "DIS", "SYM")
O_LABEL = "O"
IO_LABELS = (O_LABEL,) + tuple("I-" + c for c in LABEL_CLASSES)

# Conflict resolution order for overlapping spans: earlier wins.
_CLASS_PRIORITY = {c: i for i, c in enumerate(LABEL_CLASSES)}

# A token is a maximal run of letters/digits, or a single other
# non-whitespace character. "[^\W_]" is letters+digits (word chars minus
# underscore), so "q.d." splits into q / . / d / .
_TOKEN_RE = re.compile(r"[^\W_]+|\S", re.UNICODE)


@dataclass(frozen=True, slots=True)
class Token:
    """One surface token with character offsets into its source text."""

    text: str
    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise SpanError(f"bad token offsets ({self.start}, {self.end})")


@dataclass(frozen=True, slots=True)
class EntitySpan:
    """Character interval carrying a class label and the teacher that produced it."""

    start: int
    end: int
    label: str
    source: str = ""

    def __post_init__(self):
        if self.start < 0 or self.start >= self.end:
            raise SpanError(f"bad span offsets ({self.start}, {self.end})")
        if self.label not in LABEL_CLASSES:
            raise SpanError(f"unknown span label {self.label!r}")

    def overlaps(self, start: int, end: int) -> bool:
        return self.start < end and start < self.end


@dataclass(frozen=True, slots=True)
class TokenLabelSequence:
    """Immutable per-document labeling: one label per token, aligned by index."""

    doc_id: str
    tokens: tuple[Token, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.labels):
            raise SpanError(
                f"{self.doc_id}: {len(self.tokens)} tokens vs {len(self.labels)} labels"
            )
        for lab in self.labels:
            if lab not in IO_LABELS:
                raise SpanError(f"{self.doc_id}: unknown label {lab!r}")


def tokenize(text: str) -> tuple[Token, ...]:
    """Split text into offset-preserving tokens.

    Example::

        >>> [t.text for t in tokenize("q.d.")]
        ['q', '.', 'd', '.']
    """
    return tuple(Token(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text))


def ground_entities(
    text: str, entities: Sequence[str], label: str, source: str = ""
) -> tuple[tuple[EntitySpan, ...], tuple[str, ...]]:
    """Locate entity strings in text as character spans.

    Matching is case-insensitive and finds every occurrence, but a match only
    counts when both its boundaries fall on token boundaries; matches that
    start or end inside a letter/digit run are rejected. Overlapping spans
    are merged. Entity strings that produce no spans come back in the second
    element, in input order.
    """
    if label not in LABEL_CLASSES:
        raise SpanError(f"unknown span label {label!r}")
    tokens = tokenize(text)
    starts = {t.start for t in tokens}
    ends = {t.end for t in tokens}
    lower = text.lower()

    raw: list[tuple[int, int]] = []
    ungrounded: list[str] = []
    for entity in entities:
        needle = entity.strip().lower()
        hits = 0
        if needle:
            pos = lower.find(needle)
            while pos != -1:
                end = pos + len(needle)
                if pos in starts and end in ends:
                    raw.append((pos, end))
                    hits += 1
                pos = lower.find(needle, pos + 1)
        if hits == 0:
            ungrounded.append(entity)

    merged: list[EntitySpan] = []
    for start, end in sorted(set(raw)):
        if merged and start < merged[-1].end:
            if end > merged[-1].end:
                merged[-1] = EntitySpan(merged[-1].start, end, label, source)
        else:
            merged.append(EntitySpan(start, end, label, source))
    return tuple(merged), tuple(ungrounded)


def project_to_io(tokens: Sequence[Token], spans: Sequence[EntitySpan]) -> tuple[str, ...]:
    """Label each token that overlaps a span; others stay O.

    Overlap is judged on character intervals. When spans of different classes
    cover one token, MED beats DIS beats SYM.
    """
    limit = tokens[-1].end if tokens else 0
    for span in spans:
        if span.end > limit:
            raise SpanError(
                f"span ({span.start}, {span.end}) lies outside the tokenized text (end {limit})"
            )
    labels = []
    for tok in tokens:
        covering = [s.label for s in spans if s.overlaps(tok.start, tok.end)]
        if covering:
            best = min(covering, key=_CLASS_PRIORITY.__getitem__)
            labels.append("I-" + best)
        else:
            labels.append(O_LABEL)
    return tuple(labels)


def _require_same_tokens(a: TokenLabelSequence, b: TokenLabelSequence) -> None:
    if a.doc_id != b.doc_id:
        raise TokenMismatchError(f"doc_id mismatch: {a.doc_id!r} vs {b.doc_id!r}")
    if a.tokens != b.tokens:
        raise TokenMismatchError(f"{a.doc_id}: token sequences differ")


def union_labels(a: TokenLabelSequence, b: TokenLabelSequence) -> TokenLabelSequence:
    """Token-level union: a token is labeled when either input labels it.

    Both sequences must describe the same tokens and carry at most one label
    class between them; mixing classes is an error because the union of two
    different tasks is not meaningful.
    """
    _require_same_tokens(a, b)
    classes = {lab for lab in a.labels + b.labels if lab != O_LABEL}
    if len(classes) > 1:
        raise TokenMismatchError(
            f"{a.doc_id}: cannot union mixed label classes {sorted(classes)}"
        )
    merged = tuple(
        la if la != O_LABEL else lb for la, lb in zip(a.labels, b.labels)
    )
    return TokenLabelSequence(a.doc_id, a.tokens, merged)


# --- token-label file format -------------------------------------------------
#
#   # doc_id = <id>
#   <token>\t<label>
#   ...
#   <blank line>
#
# File-level "# key = value" comment lines (config hashes and the like) are
# permitted and skipped. Offsets are not stored; the reader reconstructs them
# canonically, placing tokens one space apart from position zero.

_DOC_HEADER = "# doc_id = "


def _canonical_tokens(texts: Sequence[str]) -> tuple[Token, ...]:
    tokens = []
    pos = 0
    for text in texts:
        tokens.append(Token(text, pos, pos + len(text)))
        pos += len(text) + 1
    return tuple(tokens)


def write_token_file(
    sequences: Iterable[TokenLabelSequence], path, header: Mapping[str, str] | None = None
) -> None:
    """Write sequences in the token-label format, optionally with comment headers."""
    lines: list[str] = []
    if header:
        for key, value in header.items():
            lines.append(f"# {key} = {value}")
    for seq in sequences:
        if "\n" in seq.doc_id or "\t" in seq.doc_id:
            raise TokenFileError(f"doc_id {seq.doc_id!r} contains tab or newline")
        lines.append(f"{_DOC_HEADER}{seq.doc_id}")
        for tok, lab in zip(seq.tokens, seq.labels):
            lines.append(f"{tok.text}\t{lab}")
        lines.append("")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        if lines:
            fh.write("\n")


def read_token_file(path) -> list[TokenLabelSequence]:
    """Parse a token-label file back into sequences with canonical offsets."""
    sequences: list[TokenLabelSequence] = []
    seen: set[str] = set()
    doc_id: str | None = None
    texts: list[str] = []
    labels: list[str] = []

    def close(line_no: int) -> None:
        nonlocal doc_id
        if doc_id is None:
            return
        if doc_id in seen:
            raise TokenFileError(f"line {line_no}: duplicate doc_id {doc_id!r}")
        seen.add(doc_id)
        sequences.append(
            TokenLabelSequence(doc_id, _canonical_tokens(texts), tuple(labels))
        )
        doc_id = None
        texts.clear()
        labels.clear()

    with open(path, "r", encoding="utf-8") as fh:
        line_no = 0
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if line.startswith(_DOC_HEADER):
                close(line_no)
                doc_id = line[len(_DOC_HEADER):]
                continue
            if line.startswith("# "):
                continue
            if not line.strip():
                close(line_no)
                continue
            if doc_id is None:
                raise TokenFileError(f"line {line_no}: token line before any doc_id header")
            parts = line.split("\t")
            if len(parts) != 2:
                raise TokenFileError(
                    f"line {line_no}: expected token<TAB>label, got {len(parts)} fields"
                )
            text, lab = parts
            if not text:
                raise TokenFileError(f"line {line_no}: empty token text")
            if lab not in IO_LABELS:
                raise TokenFileError(f"line {line_no}: unknown label {lab!r}")
            texts.append(text)
            labels.append(lab)
        close(line_no + 1)
    return sequences
