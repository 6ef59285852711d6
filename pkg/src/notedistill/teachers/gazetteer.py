"""Ontology teacher: lexicon lookup with longest-match-first scanning."""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus import Document
from ..errors import LexiconError
from ..spanlab import EntitySpan, tokenize

# semantic type -> task class; entries outside the task's set never fire
TASK_TUIS = {
    "MED": frozenset({"T195", "T123", "T200", "T125", "T121"}),
    "DIS": frozenset({"T020", "T190", "T019", "T047", "T050", "T037", "T191", "T046"}),
    "SYM": frozenset({"T184"}),
}
_TUI_TO_TASK = {tui: task for task, tuis in TASK_TUIS.items() for tui in tuis}


@dataclass(frozen=True, slots=True)
class LexiconEntry:
    surface: str  # lowercase surface form
    tui: str
    label: str

    def __post_init__(self):
        if not self.surface:
            raise LexiconError("empty surface form")
        if self.surface != self.surface.lower():
            raise LexiconError(f"surface {self.surface!r} must be lowercase")
        if self.label not in TASK_TUIS:
            raise LexiconError(f"unknown label {self.label!r}")
        if self.tui not in TASK_TUIS[self.label]:
            raise LexiconError(
                f"semantic type {self.tui!r} does not belong to label {self.label}"
            )


def load_lexicon(path) -> tuple[LexiconEntry, ...]:
    """Read a tab-separated lexicon: surface, tui, label. Surfaces are
    lowercased on load; validation errors name the line."""
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("# "):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise LexiconError(
                    f"line {line_no}: expected surface<TAB>tui<TAB>label, got {len(parts)} fields"
                )
            surface, tui, label = parts
            try:
                entries.append(LexiconEntry(surface.strip().lower(), tui.strip(), label.strip()))
            except LexiconError as exc:
                raise LexiconError(f"line {line_no}: {exc}") from None
    return tuple(entries)


def gazetteer_label(
    lexicon: tuple[LexiconEntry, ...] | list[LexiconEntry],
    document: Document,
    task: str,
    source: str = "ontology",
) -> tuple[EntitySpan, ...]:
    """Match lexicon surfaces against a document, token-aligned.

    The scan is case-insensitive, walks left to right, and prefers the
    entry covering the most tokens at each position; matched tokens are
    consumed, so output spans never overlap. Only entries whose semantic
    type maps to the task produce spans.
    """
    if task not in TASK_TUIS:
        raise LexiconError(f"unknown task {task!r}")
    by_first: dict[str, list[tuple[str, ...]]] = {}
    for entry in lexicon:
        if _TUI_TO_TASK.get(entry.tui) != task:
            continue
        pieces = tuple(t.text for t in tokenize(entry.surface))
        if pieces:
            by_first.setdefault(pieces[0], []).append(pieces)
    for pieces_list in by_first.values():
        pieces_list.sort(key=len, reverse=True)

    tokens = tokenize(document.text)
    lowered = [t.text.lower() for t in tokens]
    spans = []
    i = 0
    while i < len(tokens):
        matched = 0
        for pieces in by_first.get(lowered[i], ()):
            k = len(pieces)
            if tuple(lowered[i : i + k]) == pieces:
                spans.append(
                    EntitySpan(tokens[i].start, tokens[i + k - 1].end, task, source)
                )
                matched = k
                break
        i += matched or 1
    return tuple(spans)
