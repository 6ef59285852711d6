import json

import pytest

from notedistill.corpus import (
    Document,
    corpus_stats,
    load_corpus,
    sample_dev,
    stratified_sample,
    write_corpus,
)
from notedistill.errors import CorpusError
from tests.conftest import make_doc


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n")


class TestLoadCorpus:
    def test_well_formed(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        write_lines(
            path,
            [
                json.dumps({"id": "a", "text": "t", "category": "progress", "dataset": "d"}),
                json.dumps(
                    {"id": "b", "text": "t2", "category": "nursing", "dataset": "d", "split": "train"}
                ),
            ],
        )
        docs = load_corpus(path)
        assert [d.id for d in docs] == ["a", "b"]
        assert docs[0].split == "unsplit"
        assert docs[1].split == "train"

    def test_duplicate_id_names_line(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        record = json.dumps({"id": "a", "text": "t", "category": "c", "dataset": "d"})
        write_lines(path, [record, record])
        with pytest.raises(CorpusError, match="line 2.*duplicate"):
            load_corpus(path)

    def test_malformed_line_names_line(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        write_lines(path, ["{not json"])
        with pytest.raises(CorpusError, match="line 1"):
            load_corpus(path)

    def test_missing_field_names_line(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        write_lines(path, [json.dumps({"id": "a", "text": "t", "category": "c"})])
        with pytest.raises(CorpusError, match="line 1.*dataset"):
            load_corpus(path)

    def test_unknown_field_rejected(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        write_lines(
            path,
            [json.dumps({"id": "a", "text": "t", "category": "c", "dataset": "d", "extra": 1})],
        )
        with pytest.raises(CorpusError, match="extra"):
            load_corpus(path)

    def test_empty_text_rejected(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        write_lines(path, [json.dumps({"id": "a", "text": "", "category": "c", "dataset": "d"})])
        with pytest.raises(CorpusError, match="line 1"):
            load_corpus(path)

    def test_bad_split_rejected(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        write_lines(
            path,
            [json.dumps({"id": "a", "text": "t", "category": "c", "dataset": "d", "split": "holdout"})],
        )
        with pytest.raises(CorpusError, match="holdout"):
            load_corpus(path)

    def test_comment_and_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        write_lines(
            path,
            [
                "# config_hash = abc",
                "",
                json.dumps({"id": "a", "text": "t", "category": "c", "dataset": "d"}),
            ],
        )
        assert len(load_corpus(path)) == 1

    def test_write_then_load_round_trip(self, tmp_path):
        docs = [make_doc(f"d{i}", text=f"text {i}") for i in range(5)]
        path = tmp_path / "docs.jsonl"
        write_corpus(docs, path, header={"config_hash": "beef"})
        assert load_corpus(path) == docs


def category_pool(counts: dict[str, int]) -> list[Document]:
    docs = []
    for category, n in counts.items():
        for i in range(n):
            docs.append(make_doc(f"{category}-{i:04d}", category=category))
    return docs


class TestStratifiedSample:
    def test_quota_respected_per_category(self):
        pool = category_pool({"progress": 300, "nursing": 300, "discharge": 300, "radiology": 300})
        quota = {"progress": 250, "nursing": 250, "discharge": 250, "radiology": 250}
        out = stratified_sample(pool, quota, seed=11)
        assert len(out) == 1000
        for category in quota:
            assert sum(1 for d in out if d.category == category) == 250

    def test_uneven_quota(self):
        pool = category_pool({"progress": 260, "nursing": 140, "discharge": 130, "procedure": 260})
        quota = {"progress": 250, "nursing": 129, "discharge": 117, "procedure": 250}
        out = stratified_sample(pool, quota, seed=3)
        assert len(out) == 746

    def test_deterministic_for_fixed_seed(self):
        pool = category_pool({"a": 50, "b": 50})
        quota = {"a": 10, "b": 10}
        first = stratified_sample(pool, quota, seed=42)
        second = stratified_sample(pool, quota, seed=42)
        assert [d.id for d in first] == [d.id for d in second]

    def test_seed_changes_selection(self):
        pool = category_pool({"a": 200})
        picks = {
            tuple(d.id for d in stratified_sample(pool, {"a": 5}, seed=s)) for s in range(8)
        }
        assert len(picks) > 1

    def test_output_sorted_by_id(self):
        pool = category_pool({"a": 40})
        out = stratified_sample(pool, {"a": 15}, seed=0)
        assert [d.id for d in out] == sorted(d.id for d in out)

    def test_input_order_does_not_matter(self):
        pool = category_pool({"a": 30, "b": 30})
        quota = {"a": 7, "b": 9}
        forward = stratified_sample(pool, quota, seed=9)
        backward = stratified_sample(list(reversed(pool)), quota, seed=9)
        assert forward == backward

    def test_shortfall_names_category(self):
        pool = category_pool({"progress": 3})
        with pytest.raises(CorpusError, match="progress"):
            stratified_sample(pool, {"progress": 4}, seed=0)

    def test_zero_quota_yields_empty(self):
        pool = category_pool({"x": 5})
        assert stratified_sample(pool, {"x": 0}, seed=0) == []

    def test_zero_quota_allows_absent_category(self):
        assert stratified_sample([], {"x": 0}, seed=0) == []


class TestSampleDev:
    def test_counts_match(self):
        train = [make_doc(f"d{i:03d}", split="train") for i in range(303)]
        dev = sample_dev(train, 25, seed=1)
        assert len(dev) == 25
        assert all(d.split == "dev" for d in dev)
        dev_ids = {d.id for d in dev}
        assert len(dev_ids) == 25
        remaining = [d for d in train if d.id not in dev_ids]
        assert len(remaining) == 278

    def test_deterministic(self):
        train = [make_doc(f"d{i}", split="train") for i in range(40)]
        assert sample_dev(train, 10, seed=5) == sample_dev(train, 10, seed=5)

    def test_zero_is_empty(self):
        train = [make_doc("a", split="train")]
        assert sample_dev(train, 0, seed=0) == []

    def test_too_many_requested(self):
        train = [make_doc("a", split="train")]
        with pytest.raises(CorpusError):
            sample_dev(train, 2, seed=0)

    def test_only_train_documents_eligible(self):
        docs = [make_doc("a", split="train"), make_doc("b", split="test")]
        with pytest.raises(CorpusError):
            sample_dev(docs, 2, seed=0)


class TestCorpusStats:
    def test_frozen_counts(self):
        docs = [
            make_doc("a", text="one two three", split="train"),  # 3 tokens
            make_doc("b", text="one two three four five", split="train"),  # 5
            make_doc("c", text="one", split="dev"),  # 1
        ]
        manifest = corpus_stats(docs)
        assert manifest.total == 3
        assert manifest.counts == {"dev": 1, "train": 2}
        assert manifest.token_min == 1
        assert manifest.token_median_low == 3
        assert manifest.token_median == 3.0
        assert manifest.token_max == 5

    def test_even_count_medians_differ(self):
        docs = [
            make_doc("a", text="w"),
            make_doc("b", text="w w"),
            make_doc("c", text="w w w"),
            make_doc("d", text="w w w w"),
        ]
        manifest = corpus_stats(docs)
        assert manifest.token_median_low == 2
        assert manifest.token_median == 2.5

    def test_counts_sum_to_total(self):
        docs = [make_doc(f"d{i}", split="train" if i % 2 else "dev") for i in range(9)]
        manifest = corpus_stats(docs)
        assert sum(manifest.counts.values()) == manifest.total == 9
        assert manifest.token_min <= manifest.token_median_low <= manifest.token_max

    def test_dataset_names_joined(self):
        docs = [make_doc("a", dataset="zeta"), make_doc("b", dataset="alpha")]
        assert corpus_stats(docs).dataset == "alpha+zeta"

    def test_empty_corpus_rejected(self):
        with pytest.raises(CorpusError, match="empty corpus"):
            corpus_stats([])
