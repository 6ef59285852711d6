"""Token-level scoring, agreement, and error adjudication."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import EvaluationError, TokenFileError, TokenMismatchError
from .spanlab import O_LABEL, TokenLabelSequence

VERDICTS = ("correct", "partially_correct", "incorrect")
ERROR_KINDS = ("fp", "fn")

_WORKSHEET_COLUMNS = (
    "doc_id",
    "token_index",
    "kind",
    "context",
    "model_label",
    "gold_label",
    "annotator",
    "verdict",
)


@dataclass(frozen=True, slots=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise EvaluationError("confusion counts must be non-negative")

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True, slots=True)
class MetricsReport:
    """Scores for one system. Ratios with a zero denominator are reported as
    0.0 and named in ``undefined``."""

    task: str
    system: str
    precision: float
    recall: float
    f1: float
    npv: float
    specificity: float
    counts: ConfusionCounts
    undefined: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class ErrorInstance:
    doc_id: str
    token_index: int
    kind: str  # "fp" or "fn"
    context: str
    model_label: str
    gold_label: str

    def __post_init__(self):
        if self.kind not in ERROR_KINDS:
            raise EvaluationError(f"unknown error kind {self.kind!r}")

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.doc_id, self.token_index, self.kind)


@dataclass(frozen=True, slots=True)
class AdjudicationAssignment:
    instance: ErrorInstance
    annotators: tuple[str, ...]

    @property
    def double(self) -> bool:
        return len(self.annotators) == 2


@dataclass(frozen=True, slots=True)
class AdjudicationRecord:
    instance: ErrorInstance
    annotator: str
    verdict: str

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise EvaluationError(f"unknown verdict {self.verdict!r}")


@dataclass(slots=True)
class AdjudicationSummary:
    """Verdict percentages per error kind, plus agreement on the
    doubly-annotated subset."""

    per_kind: dict[str, dict] = field(default_factory=dict)
    double_count: int = 0
    double_kappa: float | None = None


def confusion(gold: TokenLabelSequence, pred: TokenLabelSequence) -> ConfusionCounts:
    """Per-token binary confusion: any non-O label counts as positive."""
    if gold.doc_id != pred.doc_id:
        raise TokenMismatchError(f"doc_id mismatch: {gold.doc_id!r} vs {pred.doc_id!r}")
    if gold.tokens != pred.tokens:
        raise TokenMismatchError(f"{gold.doc_id}: token sequences differ")
    tp = fp = fn = tn = 0
    for g, p in zip(gold.labels, pred.labels):
        if g != O_LABEL and p != O_LABEL:
            tp += 1
        elif g != O_LABEL:
            fn += 1
        elif p != O_LABEL:
            fp += 1
        else:
            tn += 1
    return ConfusionCounts(tp, fp, fn, tn)


def _ratio(num: int, denom: int, name: str, undefined: list[str]) -> float:
    if denom == 0:
        undefined.append(name)
        return 0.0
    return num / denom


def compute_metrics(
    counts: ConfusionCounts, task: str = "", system: str = ""
) -> MetricsReport:
    """Precision, recall, F1, NPV, and specificity from pooled counts."""
    if counts.total == 0:
        raise EvaluationError("nothing scored: all confusion counts are zero")
    undefined: list[str] = []
    precision = _ratio(counts.tp, counts.tp + counts.fp, "precision", undefined)
    recall = _ratio(counts.tp, counts.tp + counts.fn, "recall", undefined)
    npv = _ratio(counts.tn, counts.tn + counts.fn, "npv", undefined)
    specificity = _ratio(counts.tn, counts.tn + counts.fp, "specificity", undefined)
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        undefined.append("f1")
        f1 = 0.0
    return MetricsReport(
        task=task,
        system=system,
        precision=precision,
        recall=recall,
        f1=f1,
        npv=npv,
        specificity=specificity,
        counts=counts,
        undefined=tuple(undefined),
    )


def cohen_kappa(a: Sequence[str], b: Sequence[str]) -> float:
    """Multiclass chance-corrected agreement between two label sequences."""
    if len(a) != len(b):
        raise EvaluationError(f"length mismatch: {len(a)} vs {len(b)}")
    n = len(a)
    if n == 0:
        raise EvaluationError("empty sequences")
    observed = sum(1 for x, y in zip(a, b) if x == y) / n
    freq_a: dict[str, int] = {}
    freq_b: dict[str, int] = {}
    for x in a:
        freq_a[x] = freq_a.get(x, 0) + 1
    for y in b:
        freq_b[y] = freq_b.get(y, 0) + 1
    expected = sum(freq_a[k] * freq_b.get(k, 0) for k in freq_a) / (n * n)
    if expected == 1.0:
        # both raters constant on the same label; agreement is exact
        if observed == 1.0:
            return 1.0
        raise EvaluationError("kappa undefined: chance agreement is 1 with disagreement")
    return (observed - expected) / (1.0 - expected)


def extract_errors(
    gold: TokenLabelSequence, pred: TokenLabelSequence, window: int = 5
) -> list[ErrorInstance]:
    """One instance per disagreeing token, with +-window tokens of context."""
    if window < 0:
        raise EvaluationError(f"window must be non-negative, got {window}")
    confusion(gold, pred)  # validates alignment
    texts = [t.text for t in gold.tokens]
    out = []
    for i, (g, p) in enumerate(zip(gold.labels, pred.labels)):
        if g == p or (g != O_LABEL and p != O_LABEL):
            continue
        kind = "fn" if g != O_LABEL else "fp"
        lo = max(0, i - window)
        context = " ".join(texts[lo : i + window + 1])
        out.append(
            ErrorInstance(
                doc_id=gold.doc_id,
                token_index=i,
                kind=kind,
                context=context,
                model_label=p,
                gold_label=g,
            )
        )
    return out


def sample_for_adjudication(
    instances: Sequence[ErrorInstance], n: int, n_double: int, seed: int
) -> list[AdjudicationAssignment]:
    """Pick n instances for review, the first n_double of the seeded draw
    assigned to two annotators. Output is ordered by (doc, token, kind)."""
    if n < 0 or n_double < 0:
        raise EvaluationError("sample sizes must be non-negative")
    if n > len(instances):
        raise EvaluationError(f"requested {n} instances, only {len(instances)} available")
    if n_double > n:
        raise EvaluationError(f"double-annotation count {n_double} exceeds sample size {n}")
    ordered = sorted(instances, key=lambda e: e.key)
    rng = random.Random(seed & ((1 << 64) - 1))
    for i in range(len(ordered) - 1, 0, -1):
        j = rng.randrange(i + 1)
        ordered[i], ordered[j] = ordered[j], ordered[i]
    flagged = {inst.key for inst in ordered[:n_double]}
    chosen = ordered[:n]
    assignments = [
        AdjudicationAssignment(
            instance=inst,
            annotators=("annotator_1", "annotator_2")
            if inst.key in flagged
            else ("annotator_1",),
        )
        for inst in chosen
    ]
    return sorted(assignments, key=lambda a: a.instance.key)


def write_adjudication_worksheet(
    assignments: Iterable[AdjudicationAssignment],
    path,
    header: Mapping[str, str] | None = None,
) -> None:
    """Export a TSV worksheet, one row per annotator slot, verdict blank."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            for key, value in header.items():
                fh.write(f"# {key} = {value}\n")
        fh.write("\t".join(_WORKSHEET_COLUMNS) + "\n")
        for assignment in assignments:
            inst = assignment.instance
            for annotator in assignment.annotators:
                row = (
                    inst.doc_id,
                    str(inst.token_index),
                    inst.kind,
                    inst.context.replace("\t", " "),
                    inst.model_label,
                    inst.gold_label,
                    annotator,
                    "",
                )
                fh.write("\t".join(row) + "\n")


def read_adjudication_records(path) -> list[AdjudicationRecord]:
    """Import a filled worksheet; rows with an empty verdict are skipped."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        saw_header = False
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("# "):
                continue
            parts = line.split("\t")
            if not saw_header:
                if tuple(parts) != _WORKSHEET_COLUMNS:
                    raise TokenFileError(
                        f"line {line_no}: bad worksheet header {parts!r}"
                    )
                saw_header = True
                continue
            if len(parts) != len(_WORKSHEET_COLUMNS):
                raise TokenFileError(
                    f"line {line_no}: expected {len(_WORKSHEET_COLUMNS)} fields, got {len(parts)}"
                )
            doc_id, token_index, kind, context, model_label, gold_label, annotator, verdict = parts
            if not verdict:
                continue
            try:
                instance = ErrorInstance(
                    doc_id=doc_id,
                    token_index=int(token_index),
                    kind=kind,
                    context=context,
                    model_label=model_label,
                    gold_label=gold_label,
                )
                records.append(AdjudicationRecord(instance, annotator, verdict))
            except (ValueError, EvaluationError) as exc:
                raise TokenFileError(f"line {line_no}: {exc}") from None
        if not saw_header:
            raise TokenFileError("worksheet has no header row")
    return records


def aggregate_adjudications(records: Sequence[AdjudicationRecord]) -> AdjudicationSummary:
    """Tally verdicts per error kind.

    A doubly-annotated instance contributes its first annotator's verdict to
    the percentages; both verdicts feed the kappa side-report.
    """
    by_instance: dict[tuple, list[AdjudicationRecord]] = {}
    for record in records:
        by_instance.setdefault(record.instance.key, []).append(record)

    summary = AdjudicationSummary()
    primary: dict[str, list[str]] = {}
    pairs: list[tuple[str, str]] = []
    for key in sorted(by_instance):
        group = sorted(by_instance[key], key=lambda r: r.annotator)
        kind = group[0].instance.kind
        primary.setdefault(kind, []).append(group[0].verdict)
        if len(group) >= 2:
            pairs.append((group[0].verdict, group[1].verdict))

    for kind in sorted(primary):
        verdicts = primary[kind]
        n = len(verdicts)
        percentages = {
            v: 100.0 * verdicts.count(v) / n for v in VERDICTS
        }
        summary.per_kind[kind] = {"n": n, "percentages": percentages}
    summary.double_count = len(pairs)
    if pairs:
        summary.double_kappa = cohen_kappa(
            [a for a, _ in pairs], [b for _, b in pairs]
        )
    return summary
