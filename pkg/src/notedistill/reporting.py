"""Report files and companion figures.

Every writer accepts a header mapping (typically the config hash) emitted as
"# key = value" comment lines, so any output can be traced back to the exact
configuration that produced it. Figures are rendered deterministically: fixed
size, no timestamps, no software metadata.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import yaml

from .corpus import CorpusManifest, Document
from .costing import CostReport
from .ensemble import Combo, ComboResult
from .errors import TokenFileError
from .evaluation import AdjudicationSummary, MetricsReport, VERDICTS
from .spanlab import tokenize

_PNG_META = {"Software": None}  # drop the library stamp for stable bytes


def _write_lines(path, header: Mapping[str, str] | None, lines: Sequence[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            for key, value in header.items():
                fh.write(f"# {key} = {value}\n")
        for line in lines:
            fh.write(line + "\n")


def _write_yaml(path, header: Mapping[str, str] | None, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            for key, value in header.items():
                fh.write(f"# {key} = {value}\n")
        yaml.safe_dump(payload, fh, sort_keys=True, default_flow_style=False)


def write_ranking_report(
    results: Sequence[ComboResult], path, header: Mapping[str, str] | None = None
) -> None:
    lines = ["rank\tmembers\tf1\tprecision\trecall"]
    for rank, result in enumerate(results, start=1):
        lines.append(
            f"{rank}\t{result.combo}\t{result.f1:.6f}"
            f"\t{result.precision:.6f}\t{result.recall:.6f}"
        )
    _write_lines(path, header, lines)


def write_winner(result: ComboResult, path, header: Mapping[str, str] | None = None) -> None:
    _write_yaml(
        path,
        header,
        {
            "members": list(result.combo.members),
            "f1": round(result.f1, 6),
            "precision": round(result.precision, 6),
            "recall": round(result.recall, 6),
        },
    )


def read_winner(path) -> Combo:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict) or "members" not in data:
        raise TokenFileError(f"{path}: winner file needs a 'members' list")
    return Combo(tuple(sorted(data["members"])))


def write_metrics_report(
    report: MetricsReport, path, header: Mapping[str, str] | None = None
) -> None:
    _write_yaml(
        path,
        header,
        {
            "task": report.task,
            "system": report.system,
            "precision": round(report.precision, 6),
            "recall": round(report.recall, 6),
            "f1": round(report.f1, 6),
            "npv": round(report.npv, 6),
            "specificity": round(report.specificity, 6),
            "counts": {
                "tp": report.counts.tp,
                "fp": report.counts.fp,
                "fn": report.counts.fn,
                "tn": report.counts.tn,
            },
            "undefined": list(report.undefined),
        },
    )


def write_manifest(
    manifest: CorpusManifest, path, header: Mapping[str, str] | None = None
) -> None:
    _write_yaml(
        path,
        header,
        {
            "dataset": manifest.dataset,
            "total": manifest.total,
            "counts": manifest.counts,
            "tokens": {
                "min": manifest.token_min,
                "median_low": manifest.token_median_low,
                "median": manifest.token_median,
                "max": manifest.token_max,
            },
        },
    )


def write_cost_report(report: CostReport, path, header: Mapping[str, str] | None = None) -> None:
    lines = [
        "system\tnotes\ttotal_cost_usd\ttotal_time_s\tcost_per_note_usd"
        "\ttime_per_note_s\ttotal_cost_pct\ttotal_time_pct"
        "\tcost_per_note_pct\ttime_per_note_pct"
    ]
    for row in report.rows:
        lines.append(
            f"{row.system}\t{row.notes}\t{row.total_cost_usd:.6f}\t{row.total_time_s:.3f}"
            f"\t{row.cost_per_note_usd:.8f}\t{row.time_per_note_s:.4f}"
            f"\t{row.total_cost_pct:+.1f}\t{row.total_time_pct:+.1f}"
            f"\t{row.cost_per_note_pct:+.1f}\t{row.time_per_note_pct:+.1f}"
        )
    _write_lines(path, header, lines)


def write_adjudication_summary(
    summary: AdjudicationSummary, path, header: Mapping[str, str] | None = None
) -> None:
    payload = {
        "per_kind": {
            kind: {
                "n": block["n"],
                "percentages": {v: round(p, 2) for v, p in block["percentages"].items()},
            }
            for kind, block in summary.per_kind.items()
        },
        "double_annotated": summary.double_count,
        "double_kappa": None
        if summary.double_kappa is None
        else round(summary.double_kappa, 6),
    }
    _write_yaml(path, header, payload)


# --- figures ------------------------------------------------------------


def _save(fig, path) -> None:
    fig.savefig(path, format="png", metadata=_PNG_META)
    plt.close(fig)


def render_ranking_figure(results: Sequence[ComboResult], path, top_n: int = 10) -> None:
    """Horizontal bars of the best combos by F1."""
    top = list(results[:top_n])[::-1]
    fig, ax = plt.subplots(figsize=(8, 0.5 + 0.4 * len(top)))
    ax.barh([str(r.combo) for r in top], [r.f1 for r in top], color="#4878a8")
    ax.set_xlabel("F1 (dev)")
    ax.set_xlim(0, 1)
    ax.set_title("Teacher combinations ranked by dev F1")
    fig.tight_layout()
    _save(fig, path)


def render_metrics_figure(report: MetricsReport, path) -> None:
    names = ["precision", "recall", "f1", "npv", "specificity"]
    values = [getattr(report, n) for n in names]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(names, values, color="#4878a8")
    ax.set_ylim(0, 1)
    ax.set_ylabel("score")
    title = f"{report.system or 'system'} on task {report.task or '?'}"
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def render_cost_figure(report: CostReport, path) -> None:
    systems = [row.system for row in report.rows]
    costs = [row.cost_per_note_usd for row in report.rows]
    times = [row.time_per_note_s for row in report.rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.bar(systems, costs, color="#a85548")
    ax1.set_yscale("log")
    ax1.set_ylabel("USD per note (log)")
    ax1.tick_params(axis="x", rotation=30)
    ax2.bar(systems, times, color="#4878a8")
    ax2.set_yscale("log")
    ax2.set_ylabel("seconds per note (log)")
    ax2.tick_params(axis="x", rotation=30)
    fig.suptitle(f"Cost and latency per note (baseline: {report.baseline})")
    fig.tight_layout()
    _save(fig, path)


def render_token_histogram(docs: Sequence[Document], path) -> None:
    counts = [len(tokenize(d.text)) for d in docs]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(counts, bins=min(20, max(5, len(set(counts)))), color="#4878a8")
    ax.set_xlabel("tokens per document")
    ax.set_ylabel("documents")
    ax.set_title("Corpus token-length distribution")
    fig.tight_layout()
    _save(fig, path)
