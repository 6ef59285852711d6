"""Teacher combination: subset enumeration, label union, and dev-set selection."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

from .errors import EnsembleError
from .evaluation import ConfusionCounts, compute_metrics, confusion
from .spanlab import IO_LABELS, O_LABEL, TokenLabelSequence, union_labels

MAX_TEACHERS = 16


@dataclass(frozen=True, slots=True)
class Combo:
    """A non-empty set of teachers, kept sorted for canonical identity."""

    members: tuple[str, ...]

    def __post_init__(self):
        if not self.members:
            raise EnsembleError("combo must have at least one member")
        if list(self.members) != sorted(set(self.members)):
            raise EnsembleError(f"combo members must be sorted and unique: {self.members}")

    def __str__(self) -> str:
        return "+".join(self.members)


@dataclass(frozen=True, slots=True)
class ComboResult:
    combo: Combo
    f1: float
    precision: float
    recall: float


def enumerate_combos(teachers) -> list[Combo]:
    """All non-empty subsets, ordered by size then lexicographically.

    Five teachers give 31 combos; k teachers give 2^k - 1.
    """
    names = sorted(set(teachers))
    if not names:
        raise EnsembleError("empty teacher set")
    if len(names) > MAX_TEACHERS:
        raise EnsembleError(f"{len(names)} teachers exceeds the limit of {MAX_TEACHERS}")
    return [
        Combo(members)
        for size in range(1, len(names) + 1)
        for members in combinations(names, size)
    ]


def combine_union(
    labelings: Mapping[str, Mapping[str, TokenLabelSequence]],
    combo: Combo,
    doc_id: str,
) -> TokenLabelSequence:
    """Union the combo members' labelings of one document.

    The union is associative and commutative, so member order never changes
    the outcome; a member without a labeling for the document is an error.
    """
    merged: TokenLabelSequence | None = None
    for member in combo.members:
        per_doc = labelings.get(member)
        if per_doc is None or doc_id not in per_doc:
            raise EnsembleError(f"teacher {member!r} has no labeling for doc {doc_id!r}")
        seq = per_doc[doc_id]
        merged = seq if merged is None else union_labels(merged, seq)
    assert merged is not None
    return merged


def _check_task_labels(seq: TokenLabelSequence, task: str, who: str) -> None:
    allowed = {O_LABEL, "I-" + task}
    bad = sorted(set(seq.labels) - allowed)
    if bad:
        raise EnsembleError(f"{who} doc {seq.doc_id!r}: labels {bad} outside task {task}")


def select_best_combo(
    labelings: Mapping[str, Mapping[str, TokenLabelSequence]],
    gold: Mapping[str, TokenLabelSequence],
    task: str,
) -> list[ComboResult]:
    """Score every combo against gold and rank the full table.

    Scores are micro-averaged: token counts pool across documents before any
    ratio is taken. Ranking is by descending F1, then fewer members, then
    canonical member order, so the result is a total order and reruns are
    stable. The winner is the first element.
    """
    if "I-" + task not in IO_LABELS:
        raise EnsembleError(f"unknown task {task!r}")
    if not gold:
        raise EnsembleError("empty dev set: no gold documents to score against")
    if not labelings:
        raise EnsembleError("no teacher labelings given")
    for doc_id, seq in gold.items():
        _check_task_labels(seq, task, "gold")
        if seq.doc_id != doc_id:
            raise EnsembleError(f"gold map key {doc_id!r} holds doc {seq.doc_id!r}")

    results = []
    for combo in enumerate_combos(labelings.keys()):
        counts = ConfusionCounts()
        for doc_id in sorted(gold):
            pred = combine_union(labelings, combo, doc_id)
            _check_task_labels(pred, task, str(combo))
            counts = counts + confusion(gold[doc_id], pred)
        metrics = compute_metrics(counts, task=task, system=str(combo))
        results.append(
            ComboResult(
                combo=combo,
                f1=metrics.f1,
                precision=metrics.precision,
                recall=metrics.recall,
            )
        )
    results.sort(key=lambda r: (-r.f1, len(r.combo.members), r.combo.members))
    return results
