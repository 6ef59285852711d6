import json

import pytest

from tagtrainer.config import TrainerConfig
from tagtrainer.errors import (
    ArtifactError,
    DocumentsError,
    TrainerConfigError,
    TrainFileError,
)
from tagtrainer.iofmt import (
    LabeledDoc,
    read_documents,
    read_train_file,
    single_task_labels,
    write_token_file,
)
from tagtrainer.tokening import tokenize
from tagtrainer.training import window_spans
from tagtrainer.vocab import WordPieceVocab


class TestConfig:
    def test_defaults(self):
        config = TrainerConfig()
        assert config.base_model == "scratch"
        assert config.learning_rate == 2e-5
        assert config.batch_size == 8
        assert config.weight_decay == 0.01
        assert config.epochs == 10

    def test_positive_hyperparameters_enforced(self):
        with pytest.raises(TrainerConfigError, match="learning_rate"):
            TrainerConfig(learning_rate=0)
        with pytest.raises(TrainerConfigError, match="batch_size"):
            TrainerConfig(batch_size=0)
        with pytest.raises(TrainerConfigError, match="epochs"):
            TrainerConfig(epochs=0)
        with pytest.raises(TrainerConfigError, match="weight_decay"):
            TrainerConfig(weight_decay=-0.1)

    def test_head_divisibility(self):
        with pytest.raises(TrainerConfigError, match="num_heads"):
            TrainerConfig(hidden_size=100, num_heads=3)

    def test_hash_is_stable_and_sensitive(self):
        assert TrainerConfig().hash() == TrainerConfig().hash()
        assert TrainerConfig().hash() != TrainerConfig(seed=1).hash()
        assert len(TrainerConfig().hash()) == 12


class TestWindowSpans:
    def test_short_doc_single_window(self):
        assert window_spans(10, 126) == [(0, 10)]

    def test_windows_cover_everything_with_overlap(self):
        for n in (127, 200, 252, 509, 1000):
            spans = window_spans(n, 126)
            assert spans[0][0] == 0
            assert spans[-1][1] == n
            for (a_start, a_end), (b_start, b_end) in zip(spans, spans[1:]):
                assert b_start < a_end  # overlap
                assert b_start == a_end - 126 // 4
                assert a_end - a_start <= 126
            assert all(end - start <= 126 for start, end in spans)

    def test_every_position_in_some_window(self):
        spans = window_spans(400, 62)
        covered = set()
        for start, end in spans:
            covered.update(range(start, end))
        assert covered == set(range(400))

    def test_empty_doc(self):
        assert window_spans(0, 126) == [(0, 0)]


class TestVocab:
    def test_whole_word_is_one_piece(self):
        vocab = WordPieceVocab.build(["fever", "chills"])
        assert len(vocab.encode_word("fever")) == 1
        assert len(vocab.encode_word("FEVER")) == 1  # case-folded

    def test_unseen_word_falls_back_to_pieces(self):
        vocab = WordPieceVocab.build(["fever"])
        ids = vocab.encode_word("free")  # f, r, e, e all seen as chars
        assert len(ids) > 1

    def test_unseen_character_is_unk(self):
        vocab = WordPieceVocab.build(["abc"])
        assert vocab.encode_word("ü") == [vocab.index["[UNK]"]]

    def test_greedy_prefers_longest_match(self):
        vocab = WordPieceVocab.build(["fevers", "fever"])
        assert vocab.encode_word("fevers") == [vocab.index["fevers"]]

    def test_save_load_round_trip(self, tmp_path):
        vocab = WordPieceVocab.build(["fever", "chills", "q.d"])
        vocab.save(tmp_path / "vocab.txt")
        loaded = WordPieceVocab.load(tmp_path / "vocab.txt")
        assert loaded.pieces == vocab.pieces
        assert loaded.encode_word("chills") == vocab.encode_word("chills")

    def test_specials_must_lead(self):
        with pytest.raises(ArtifactError):
            WordPieceVocab(["a", "b"])


class TestTokenize:
    def test_splits_words_and_punctuation(self):
        tokens = [t.text for t in tokenize("Pt denies q.d. dosing")]
        assert tokens == ["Pt", "denies", "q", ".", "d", ".", "dosing"]

    def test_offsets_index_source_text(self):
        text = "fever, chills"
        for token in tokenize(text):
            assert text[token.start : token.end] == token.text


class TestTrainFileIo:
    def test_round_trip(self, tmp_path):
        docs = [
            LabeledDoc("d1", ("fever", "today"), ("I-SYM", "O")),
            LabeledDoc("d2", (), ()),
        ]
        path = tmp_path / "train.tsv"
        write_token_file(docs, path, header={"config_hash": "x"})
        assert read_train_file(path) == docs

    def test_unknown_label_names_line(self, tmp_path):
        path = tmp_path / "train.tsv"
        path.write_text("# doc_id = d\nfever\tI-BAD\n\n")
        with pytest.raises(TrainFileError, match="line 2"):
            read_train_file(path)

    def test_token_before_header_rejected(self, tmp_path):
        path = tmp_path / "train.tsv"
        path.write_text("fever\tO\n")
        with pytest.raises(TrainFileError, match="line 1"):
            read_train_file(path)

    def test_duplicate_doc_rejected(self, tmp_path):
        path = tmp_path / "train.tsv"
        path.write_text("# doc_id = d\na\tO\n\n# doc_id = d\nb\tO\n\n")
        with pytest.raises(TrainFileError, match="duplicate"):
            read_train_file(path)

    def test_single_task_inventory(self):
        docs = [LabeledDoc("d", ("a", "b"), ("I-SYM", "O"))]
        assert single_task_labels(docs) == ["O", "I-SYM"]

    def test_multi_task_file_rejected(self):
        docs = [LabeledDoc("d", ("a", "b"), ("I-SYM", "I-MED"))]
        with pytest.raises(TrainFileError, match="single task"):
            single_task_labels(docs)

    def test_all_o_file_rejected(self):
        docs = [LabeledDoc("d", ("a",), ("O",))]
        with pytest.raises(TrainFileError, match="no entity labels"):
            single_task_labels(docs)

    def test_empty_file_rejected(self):
        with pytest.raises(TrainFileError, match="no documents"):
            single_task_labels([])


class TestDocumentsIo:
    def write(self, tmp_path, rows):
        path = tmp_path / "docs.jsonl"
        with open(path, "w") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")
        return path

    def full_row(self, **overrides):
        row = {
            "id": "d1",
            "category": "progress",
            "split": "unsplit",
            "dataset": "x",
            "text": "fever today",
        }
        row.update(overrides)
        return row

    def test_reads_documents(self, tmp_path):
        path = self.write(tmp_path, [self.full_row()])
        docs = read_documents(path)
        assert docs[0].doc_id == "d1"
        assert docs[0].text == "fever today"

    def test_missing_field_names_line(self, tmp_path):
        row = self.full_row()
        del row["dataset"]
        path = self.write(tmp_path, [self.full_row(id="other"), row])
        with pytest.raises(DocumentsError, match="line 2"):
            read_documents(path)

    def test_duplicate_id_rejected(self, tmp_path):
        path = self.write(tmp_path, [self.full_row(), self.full_row()])
        with pytest.raises(DocumentsError, match="duplicate"):
            read_documents(path)

    def test_comments_skipped(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        path.write_text("# config_hash = x\n" + json.dumps(self.full_row()) + "\n")
        assert len(read_documents(path)) == 1
