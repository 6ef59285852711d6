"""Prompt templates and response parsing for LLM teachers.

Responses are expected to carry entity strings separated by ``//``, either as
plain text or inside a JSON object's ``entities`` field. Anything else
degrades to a raw split so parsing never fails outright; strings that do not
occur in the note are discarded later, at grounding time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from ..errors import PromptError
from ..spanlab import LABEL_CLASSES

NOTE_PLACEHOLDER = "{note}"

# expected response shape per task; informational, the parser handles both
OUTPUT_MODES = ("delimited", "object")

_BUILTIN_FILES = {"MED": "medication.txt", "DIS": "disease.txt", "SYM": "symptom.txt"}
_BUILTIN_MODES = {"MED": "delimited", "DIS": "delimited", "SYM": "object"}


@dataclass(frozen=True, slots=True)
class PromptTemplate:
    task: str
    body: str
    output_mode: str = "delimited"

    def __post_init__(self):
        if self.task not in LABEL_CLASSES:
            raise PromptError(f"unknown task {self.task!r}")
        if self.output_mode not in OUTPUT_MODES:
            raise PromptError(f"unknown output mode {self.output_mode!r}")
        n = self.body.count(NOTE_PLACEHOLDER)
        if n != 1:
            raise PromptError(
                f"template body must contain exactly one {NOTE_PLACEHOLDER!r}, found {n}"
            )


def load_builtin_template(task: str) -> PromptTemplate:
    """Load the packaged prompt for a task."""
    if task not in _BUILTIN_FILES:
        raise PromptError(f"unknown task {task!r}")
    body = (
        resources.files("notedistill")
        .joinpath("data/prompts")
        .joinpath(_BUILTIN_FILES[task])
        .read_text(encoding="utf-8")
    )
    return PromptTemplate(task=task, body=body, output_mode=_BUILTIN_MODES[task])


def load_template_file(task: str, path, output_mode: str = "delimited") -> PromptTemplate:
    with open(path, "r", encoding="utf-8") as fh:
        return PromptTemplate(task=task, body=fh.read(), output_mode=output_mode)


def render_prompt(template: PromptTemplate, note_text: str) -> str:
    """Substitute the note into the template, exactly once.

    A literal "{note}" inside the note itself is preserved: only the
    template's own placeholder is replaced.
    """
    return template.body.replace(NOTE_PLACEHOLDER, note_text, 1)


def parse_teacher_response(task: str, raw_response: str | None) -> list[str]:
    """Extract entity strings from a teacher response. Never raises.

    If the response parses as a JSON object with an ``entities`` field, that
    field is split on ``//``; extra fields (rationales, negation notes) are
    ignored. Otherwise the raw text is split on ``//``. Pieces are trimmed,
    empties dropped, and exact duplicates removed keeping first occurrence.
    The task argument selects the convention; all current tasks share one.
    """
    del task
    text = raw_response or ""
    try:
        obj = json.loads(text)
    except (ValueError, RecursionError):
        obj = None
    if isinstance(obj, dict) and "entities" in obj:
        value = obj["entities"]
        if isinstance(value, str):
            pieces = value.split("//")
        elif isinstance(value, list):
            pieces = [str(v) for v in value]
        else:
            pieces = str(value).split("//")
    else:
        pieces = text.split("//")
    out: list[str] = []
    seen: set[str] = set()
    for piece in pieces:
        stripped = piece.strip()
        if stripped and stripped not in seen:
            seen.add(stripped)
            out.append(stripped)
    return out
