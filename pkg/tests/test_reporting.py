import pytest
import yaml

from notedistill.corpus import corpus_stats
from notedistill.costing import ModelPrice, PricingTable, UsageRecord, build_cost_report
from notedistill.ensemble import Combo, ComboResult
from notedistill.errors import TokenFileError
from notedistill.evaluation import AdjudicationSummary, ConfusionCounts, compute_metrics
from notedistill.reporting import (
    read_winner,
    render_cost_figure,
    render_metrics_figure,
    render_ranking_figure,
    render_token_histogram,
    write_adjudication_summary,
    write_cost_report,
    write_manifest,
    write_metrics_report,
    write_ranking_report,
    write_winner,
)
from tests.conftest import make_doc

RESULTS = [
    ComboResult(Combo(("a",)), f1=0.9, precision=0.85, recall=0.96),
    ComboResult(Combo(("a", "b")), f1=0.8, precision=0.7, recall=0.93),
]


def yaml_body(path):
    text = "\n".join(
        line for line in path.read_text().splitlines() if not line.startswith("#")
    )
    return yaml.safe_load(text)


class TestDelimitedReports:
    def test_ranking_report_shape(self, tmp_path):
        path = tmp_path / "ranking.tsv"
        write_ranking_report(RESULTS, path, header={"config_hash": "h"})
        lines = path.read_text().splitlines()
        assert lines[0] == "# config_hash = h"
        assert lines[1] == "rank\tmembers\tf1\tprecision\trecall"
        assert lines[2] == "1\ta\t0.900000\t0.850000\t0.960000"
        assert lines[3].startswith("2\ta+b\t0.800000")

    def test_cost_report_shape(self, tmp_path):
        pricing = PricingTable(models={"m": ModelPrice(1.0, 2.0)}, gpu_hourly_usd=3.6)
        records = [
            UsageRecord("tagger", "d", 0.5, inference_seconds=1.0),
            UsageRecord("m", "d", 2.0, tokens_in=1000, tokens_out=500),
        ]
        report = build_cost_report(records, pricing, baseline="tagger")
        path = tmp_path / "cost.tsv"
        write_cost_report(report, path)
        lines = path.read_text().splitlines()
        assert lines[0].split("\t") == [
            "system",
            "notes",
            "total_cost_usd",
            "total_time_s",
            "cost_per_note_usd",
            "time_per_note_s",
            "total_cost_pct",
            "total_time_pct",
            "cost_per_note_pct",
            "time_per_note_pct",
        ]
        tagger_row = lines[1].split("\t")
        assert tagger_row[0] == "tagger"
        assert tagger_row[6] == "+0.0"  # baseline compares to itself
        m_row = lines[2].split("\t")
        assert m_row[0] == "m"
        assert float(m_row[2]) == pytest.approx(0.002)
        assert m_row[6].startswith("+")


class TestYamlReports:
    def test_winner_round_trip(self, tmp_path):
        path = tmp_path / "winner.yaml"
        write_winner(RESULTS[0], path, header={"config_hash": "h"})
        assert read_winner(path) == Combo(("a",))
        doc = yaml_body(path)
        assert doc["f1"] == 0.9
        assert doc["members"] == ["a"]

    def test_winner_missing_members_rejected(self, tmp_path):
        path = tmp_path / "winner.yaml"
        path.write_text("f1: 0.5\n")
        with pytest.raises(TokenFileError, match="members"):
            read_winner(path)

    def test_metrics_report_fields(self, tmp_path):
        report = compute_metrics(ConfusionCounts(6, 2, 3, 9), task="SYM", system="s")
        path = tmp_path / "metrics.yaml"
        write_metrics_report(report, path)
        doc = yaml_body(path)
        assert doc["precision"] == 0.75
        assert doc["counts"] == {"tp": 6, "fp": 2, "fn": 3, "tn": 9}
        assert doc["undefined"] == []
        assert doc["system"] == "s"

    def test_manifest_fields(self, tmp_path):
        docs = [
            make_doc("a", category="x", text="one two three"),
            make_doc("b", category="y", text="one two"),
        ]
        manifest = corpus_stats(docs)
        path = tmp_path / "manifest.yaml"
        write_manifest(manifest, path)
        doc = yaml_body(path)
        assert doc["total"] == 2
        assert doc["tokens"]["min"] == 2
        assert doc["tokens"]["max"] == 3
        assert doc["tokens"]["median_low"] == 2
        assert doc["tokens"]["median"] == 2.5

    def test_adjudication_summary_rounding(self, tmp_path):
        summary = AdjudicationSummary(
            per_kind={
                "fp": {
                    "n": 49,
                    "percentages": {
                        "correct": 100 / 49,
                        "partially_correct": 800 / 49,
                        "incorrect": 4000 / 49,
                    },
                }
            },
            double_count=3,
            double_kappa=0.123456789,
        )
        path = tmp_path / "summary.yaml"
        write_adjudication_summary(summary, path)
        doc = yaml_body(path)
        pct = doc["per_kind"]["fp"]["percentages"]
        assert pct == {"correct": 2.04, "partially_correct": 16.33, "incorrect": 81.63}
        assert doc["double_annotated"] == 3
        assert doc["double_kappa"] == 0.123457


class TestFigures:
    PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

    def test_each_figure_is_a_png(self, tmp_path):
        pricing = PricingTable(models={"m": ModelPrice(1.0, 2.0)}, gpu_hourly_usd=3.6)
        cost = build_cost_report(
            [
                UsageRecord("tagger", "d", 0.5, inference_seconds=1.0),
                UsageRecord("m", "d", 2.0, tokens_in=10, tokens_out=5),
            ],
            pricing,
            baseline="tagger",
        )
        metrics = compute_metrics(ConfusionCounts(6, 2, 3, 9), task="SYM", system="s")
        docs = [make_doc(f"d{i}", text="alpha beta " * (i + 1)) for i in range(4)]
        targets = {
            "ranking": lambda p: render_ranking_figure(RESULTS, p),
            "metrics": lambda p: render_metrics_figure(metrics, p),
            "cost": lambda p: render_cost_figure(cost, p),
            "hist": lambda p: render_token_histogram(docs, p),
        }
        for name, render in targets.items():
            path = tmp_path / f"{name}.png"
            render(path)
            blob = path.read_bytes()
            assert blob.startswith(self.PNG_MAGIC)
            assert len(blob) > 1000

    def test_figure_bytes_are_stable_across_renders(self, tmp_path):
        first = tmp_path / "a.png"
        second = tmp_path / "b.png"
        render_ranking_figure(RESULTS, first)
        render_ranking_figure(RESULTS, second)
        assert first.read_bytes() == second.read_bytes()
