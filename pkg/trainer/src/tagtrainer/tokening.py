"""Word tokenization matching the evaluator's tokenizer byte for byte.

The rule: maximal runs of letters/digits, or a single other non-whitespace
character. Underscore counts as punctuation, not a word character.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_TOKEN_RE = re.compile(r"[^\W_]+|\S", re.UNICODE)


@dataclass(frozen=True, slots=True)
class Token:
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    return [Token(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]
