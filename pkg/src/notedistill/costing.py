"""Cost and latency accounting for teacher and tagger runs.

LLM cost is token-metered; local taggers are billed as GPU-seconds against an
hourly rate. Comparisons are percent differences against a configurable
baseline system.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import yaml

from .errors import CostingError

SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True, slots=True)
class ModelPrice:
    input_per_million_usd: float
    output_per_million_usd: float

    def __post_init__(self):
        if self.input_per_million_usd < 0 or self.output_per_million_usd < 0:
            raise CostingError("prices must be non-negative")


@dataclass(frozen=True, slots=True)
class PricingTable:
    models: Mapping[str, ModelPrice]
    gpu_hourly_usd: float

    def __post_init__(self):
        if self.gpu_hourly_usd < 0:
            raise CostingError("gpu_hourly_usd must be non-negative")

    def require(self, model: str) -> ModelPrice:
        try:
            return self.models[model]
        except KeyError:
            raise CostingError(f"no pricing for model {model!r}") from None


@dataclass(frozen=True, slots=True)
class UsageRecord:
    """One note processed by one system. Exactly one of the token pair or
    inference_seconds is populated; latency_s is wall time either way."""

    system: str
    doc_id: str
    latency_s: float
    tokens_in: int | None = None
    tokens_out: int | None = None
    inference_seconds: float | None = None

    def __post_init__(self):
        has_tokens = self.tokens_in is not None or self.tokens_out is not None
        if has_tokens and (self.tokens_in is None or self.tokens_out is None):
            raise CostingError(f"{self.system}/{self.doc_id}: partial token pair")
        if has_tokens == (self.inference_seconds is not None):
            raise CostingError(
                f"{self.system}/{self.doc_id}: need either a token pair or inference_seconds"
            )
        if self.latency_s < 0:
            raise CostingError(f"{self.system}/{self.doc_id}: negative latency")
        if has_tokens and (self.tokens_in < 0 or self.tokens_out < 0):
            raise CostingError(f"{self.system}/{self.doc_id}: negative token counts")
        if self.inference_seconds is not None and self.inference_seconds < 0:
            raise CostingError(f"{self.system}/{self.doc_id}: negative inference time")

    @property
    def is_llm(self) -> bool:
        return self.tokens_in is not None


@dataclass(frozen=True, slots=True)
class SystemCost:
    system: str
    notes: int
    total_cost_usd: float
    total_time_s: float
    cost_per_note_usd: float
    time_per_note_s: float
    total_cost_pct: float
    total_time_pct: float
    cost_per_note_pct: float
    time_per_note_pct: float


@dataclass(frozen=True, slots=True)
class CostReport:
    baseline: str
    rows: tuple[SystemCost, ...]


def llm_note_cost(tokens_in: int, tokens_out: int, price: ModelPrice) -> float:
    """Token-metered cost in USD."""
    return (
        tokens_in * price.input_per_million_usd
        + tokens_out * price.output_per_million_usd
    ) / 1_000_000.0


def gpu_note_cost(inference_seconds: float, gpu_hourly_usd: float) -> float:
    """GPU-second cost in USD."""
    return inference_seconds / SECONDS_PER_HOUR * gpu_hourly_usd


def percent_diff(value: float, baseline: float) -> float:
    """Signed percent difference of value against baseline."""
    if baseline <= 0:
        raise CostingError(f"baseline must be positive, got {baseline}")
    return 100.0 * (value - baseline) / baseline


def load_pricing(path) -> PricingTable:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict) or "models" not in data or "gpu_hourly_usd" not in data:
        raise CostingError(f"{path}: pricing file needs 'models' and 'gpu_hourly_usd'")
    models = {}
    for name, spec in data["models"].items():
        try:
            models[name] = ModelPrice(
                input_per_million_usd=float(spec["input_per_million_usd"]),
                output_per_million_usd=float(spec["output_per_million_usd"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CostingError(f"{path}: bad price entry for {name!r} ({exc})") from None
    return PricingTable(models=models, gpu_hourly_usd=float(data["gpu_hourly_usd"]))


def write_usage(records: Sequence[UsageRecord], path, header: Mapping[str, str] | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            for key, value in header.items():
                fh.write(f"# {key} = {value}\n")
        for rec in records:
            obj: dict = {"system": rec.system, "doc_id": rec.doc_id, "latency_s": rec.latency_s}
            if rec.is_llm:
                obj["tokens_in"] = rec.tokens_in
                obj["tokens_out"] = rec.tokens_out
            else:
                obj["inference_seconds"] = rec.inference_seconds
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_usage(path) -> list[UsageRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip() or line.startswith("# "):
                continue
            try:
                obj = json.loads(line)
                records.append(
                    UsageRecord(
                        system=obj["system"],
                        doc_id=obj["doc_id"],
                        latency_s=float(obj["latency_s"]),
                        tokens_in=obj.get("tokens_in"),
                        tokens_out=obj.get("tokens_out"),
                        inference_seconds=obj.get("inference_seconds"),
                    )
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise CostingError(f"{path} line {line_no}: {exc}") from None
            except CostingError as exc:
                raise CostingError(f"{path} line {line_no}: {exc}") from None
    return records


def build_cost_report(
    records: Sequence[UsageRecord], pricing: PricingTable, baseline: str
) -> CostReport:
    """Aggregate usage per system and compare everything to the baseline.

    Per-note figures divide by the number of distinct notes, so a system that
    ran several tasks over the same notes is still averaged per note.
    """
    if not records:
        raise CostingError("no usage records")
    by_system: dict[str, list[UsageRecord]] = {}
    for rec in records:
        by_system.setdefault(rec.system, []).append(rec)
    if baseline not in by_system:
        raise CostingError(f"baseline system {baseline!r} has no usage records")

    totals: dict[str, tuple[int, float, float]] = {}
    for system, recs in by_system.items():
        cost = 0.0
        time_s = 0.0
        for rec in recs:
            if rec.is_llm:
                cost += llm_note_cost(rec.tokens_in, rec.tokens_out, pricing.require(system))
            else:
                cost += gpu_note_cost(rec.inference_seconds, pricing.gpu_hourly_usd)
            time_s += rec.latency_s
        notes = len({r.doc_id for r in recs})
        totals[system] = (notes, cost, time_s)

    base_notes, base_cost, base_time = totals[baseline]
    rows = []
    order = [baseline] + sorted(s for s in totals if s != baseline)
    for system in order:
        notes, cost, time_s = totals[system]
        rows.append(
            SystemCost(
                system=system,
                notes=notes,
                total_cost_usd=cost,
                total_time_s=time_s,
                cost_per_note_usd=cost / notes,
                time_per_note_s=time_s / notes,
                total_cost_pct=percent_diff(cost, base_cost),
                total_time_pct=percent_diff(time_s, base_time),
                cost_per_note_pct=percent_diff(cost / notes, base_cost / base_notes),
                time_per_note_pct=percent_diff(time_s / notes, base_time / base_notes),
            )
        )
    return CostReport(baseline=baseline, rows=tuple(rows))
