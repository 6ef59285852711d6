"""Self-contained WordPiece vocabulary for the from-scratch encoder.

Built from the training tokens: every distinct lowercased word is a piece,
every character is a piece (plus its "##" continuation form), so any input
word encodes without loss; truly unseen characters fall back to [UNK].
Encoding is greedy longest-match, the standard WordPiece algorithm.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import ArtifactError

PAD, UNK, CLS, SEP = "[PAD]", "[UNK]", "[CLS]", "[SEP]"
_SPECIALS = (PAD, UNK, CLS, SEP)


class WordPieceVocab:
    def __init__(self, pieces: Sequence[str]):
        if tuple(pieces[:4]) != _SPECIALS:
            raise ArtifactError(f"vocab must start with {_SPECIALS}")
        self.pieces = list(pieces)
        self.index = {p: i for i, p in enumerate(self.pieces)}
        if len(self.index) != len(self.pieces):
            raise ArtifactError("vocab has duplicate pieces")

    def __len__(self) -> int:
        return len(self.pieces)

    @property
    def pad_id(self) -> int:
        return self.index[PAD]

    @property
    def cls_id(self) -> int:
        return self.index[CLS]

    @property
    def sep_id(self) -> int:
        return self.index[SEP]

    @classmethod
    def build(cls, words: Iterable[str]) -> "WordPieceVocab":
        words = sorted({w.lower() for w in words})
        chars = sorted({c for w in words for c in w})
        pieces = list(_SPECIALS)
        pieces.extend(chars)
        pieces.extend("##" + c for c in chars)
        known = set(pieces)
        pieces.extend(w for w in words if w not in known)
        return cls(pieces)

    def encode_word(self, word: str) -> list[int]:
        """Greedy longest-match subword ids; whole word -> [UNK] on dead ends."""
        word = word.lower()
        ids: list[int] = []
        start = 0
        while start < len(word):
            end = len(word)
            piece_id = None
            while end > start:
                candidate = word[start:end]
                if start > 0:
                    candidate = "##" + candidate
                piece_id = self.index.get(candidate)
                if piece_id is not None:
                    break
                end -= 1
            if piece_id is None:
                return [self.index[UNK]]
            ids.append(piece_id)
            start = end
        return ids or [self.index[UNK]]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for piece in self.pieces:
                fh.write(piece + "\n")

    @classmethod
    def load(cls, path) -> "WordPieceVocab":
        with open(path, "r", encoding="utf-8") as fh:
            pieces = [line.rstrip("\n") for line in fh if line.rstrip("\n")]
        return cls(pieces)
