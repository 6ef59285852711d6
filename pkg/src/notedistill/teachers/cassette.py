"""Record/replay store for teacher calls.

Each call is keyed by a digest of (teacher name, task, rendered prompt) and
persisted as one JSON line in an append-only file per teacher. Replays return
exactly the stored response bytes, which is what makes pipeline runs
reproducible without network access.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass
from pathlib import Path

from ..errors import CassetteError

_RECORD_FIELDS = (
    "key",
    "model",
    "task",
    "doc_id",
    "raw_response",
    "entities",
    "tokens_in",
    "tokens_out",
    "latency_ms",
)

_SAFE_NAME = re.compile(r"[^A-Za-z0-9._-]+")


@dataclass(frozen=True, slots=True)
class TeacherRecord:
    """One teacher call: cache key, raw and parsed response, usage numbers."""

    key: str
    model: str
    task: str
    doc_id: str
    raw_response: str
    entities: tuple[str, ...]
    tokens_in: int
    tokens_out: int
    latency_ms: float

    def __post_init__(self):
        if self.tokens_in < 0 or self.tokens_out < 0 or self.latency_ms < 0:
            raise CassetteError(f"{self.doc_id}: negative usage numbers")

    def to_json(self) -> str:
        record = {
            "key": self.key,
            "model": self.model,
            "task": self.task,
            "doc_id": self.doc_id,
            "raw_response": self.raw_response,
            "entities": list(self.entities),
            "tokens_in": self.tokens_in,
            "tokens_out": self.tokens_out,
            "latency_ms": self.latency_ms,
        }
        return json.dumps(record, ensure_ascii=False)


def cache_key(teacher: str, task: str, prompt: str) -> str:
    """Digest identifying one rendered call. Unit separators prevent
    concatenation collisions between the three parts."""
    material = "\x1f".join((teacher, task, prompt)).encode("utf-8")
    return hashlib.sha256(material).hexdigest()


class CassetteStore:
    """Directory of per-teacher JSONL record files, loaded into memory."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self._lock = threading.Lock()
        self._records: dict[str, TeacherRecord] = {}
        if self.directory.exists():
            for file in sorted(self.directory.glob("*.jsonl")):
                self._load_file(file)

    def _load_file(self, file: Path) -> None:
        with open(file, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip() or line.startswith("# "):
                    continue
                try:
                    obj = json.loads(line)
                except ValueError as exc:
                    raise CassetteError(f"{file.name} line {line_no}: {exc}") from None
                missing = [f for f in _RECORD_FIELDS if f not in obj]
                if missing:
                    raise CassetteError(
                        f"{file.name} line {line_no}: missing fields {missing}"
                    )
                record = TeacherRecord(
                    key=obj["key"],
                    model=obj["model"],
                    task=obj["task"],
                    doc_id=obj["doc_id"],
                    raw_response=obj["raw_response"],
                    entities=tuple(obj["entities"]),
                    tokens_in=int(obj["tokens_in"]),
                    tokens_out=int(obj["tokens_out"]),
                    latency_ms=float(obj["latency_ms"]),
                )
                existing = self._records.get(record.key)
                if existing is not None and existing != record:
                    raise CassetteError(
                        f"{file.name} line {line_no}: conflicting records for key {record.key}"
                    )
                self._records[record.key] = record

    def __len__(self) -> int:
        return len(self._records)

    def get(self, key: str) -> TeacherRecord | None:
        with self._lock:
            return self._records.get(key)

    def put(self, record: TeacherRecord) -> None:
        """Append a record to its teacher's file. Idempotent per key; a
        conflicting record for an existing key is an error."""
        with self._lock:
            existing = self._records.get(record.key)
            if existing is not None:
                if existing != record:
                    raise CassetteError(f"conflicting record for key {record.key}")
                return
            self.directory.mkdir(parents=True, exist_ok=True)
            name = _SAFE_NAME.sub("_", record.model) or "teacher"
            with open(self.directory / f"{name}.jsonl", "a", encoding="utf-8") as fh:
                fh.write(record.to_json() + "\n")
            self._records[record.key] = record
