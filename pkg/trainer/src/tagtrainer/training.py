"""Fit a compact token-classification encoder on a teacher-labeled file.

Long documents are split into overlapping subword windows that never cross a
document boundary. Supervision lands on the first subword of each word; the
rest are masked out of the loss.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import asdict
from pathlib import Path

import torch

from .config import SCRATCH, TrainerConfig
from .errors import ArtifactError
from .iofmt import read_train_file, single_task_labels
from .vocab import WordPieceVocab

log = logging.getLogger(__name__)

IGNORE = -100

CONFIG_FILE = "config.json"
LABEL_MAP_FILE = "label_map.json"
VOCAB_FILE = "vocab.txt"
WEIGHTS_FILE = "weights.pt"
PRETRAINED_DIR = "model"
TOKENIZER_DIR = "tokenizer"


def window_spans(n_pieces: int, budget: int) -> list[tuple[int, int]]:
    """Cover [0, n_pieces) with windows of at most `budget`, overlapping by a
    quarter budget so no prediction sits hard against a window edge."""
    if n_pieces <= budget:
        return [(0, max(n_pieces, 0))]
    overlap = budget // 4
    spans = []
    start = 0
    while True:
        end = min(start + budget, n_pieces)
        spans.append((start, end))
        if end == n_pieces:
            return spans
        start = end - overlap


class ScratchEncoder:
    """Word-to-subword encoder backed by the self-contained vocabulary."""

    def __init__(self, vocab: WordPieceVocab):
        self.vocab = vocab
        self.cls_id = vocab.cls_id
        self.sep_id = vocab.sep_id
        self.pad_id = vocab.pad_id

    def __len__(self) -> int:
        return len(self.vocab)

    def encode_word(self, word: str) -> list[int]:
        return self.vocab.encode_word(word)


class PretrainedEncoder:
    """Adapter giving a checkpoint tokenizer the same word-level protocol."""

    def __init__(self, tokenizer):
        self.tokenizer = tokenizer
        self.cls_id = tokenizer.cls_token_id
        self.sep_id = tokenizer.sep_token_id
        self.pad_id = tokenizer.pad_token_id

    def __len__(self) -> int:
        return len(self.tokenizer)

    def encode_word(self, word: str) -> list[int]:
        ids = self.tokenizer.convert_tokens_to_ids(self.tokenizer.tokenize(word))
        return list(ids) or [self.tokenizer.unk_token_id]


def encode_words(encoder, words) -> tuple[list[int], list[int]]:
    """All subword ids for a document plus each word's first-subword index."""
    pieces: list[int] = []
    firsts: list[int] = []
    for word in words:
        firsts.append(len(pieces))
        pieces.extend(encoder.encode_word(word))
    return pieces, firsts


def _build_scratch_model(vocab_size: int, config: TrainerConfig, num_labels: int):
    from transformers import BertConfig, BertForTokenClassification

    bert = BertConfig(
        vocab_size=vocab_size,
        hidden_size=config.hidden_size,
        num_hidden_layers=config.num_layers,
        num_attention_heads=config.num_heads,
        intermediate_size=config.hidden_size * 2,
        max_position_embeddings=config.max_seq_len + 2,
        num_labels=num_labels,
    )
    return BertForTokenClassification(bert)


def _training_windows(docs, encoder, labels, budget):
    """(input_ids, label_ids) pairs, one per window, CLS/SEP added."""
    label_index = {label: i for i, label in enumerate(labels)}
    out = []
    for doc in docs:
        pieces, firsts = encode_words(encoder, doc.tokens)
        first_label = dict(zip(firsts, (label_index[l] for l in doc.labels)))
        for start, end in window_spans(len(pieces), budget):
            ids = [encoder.cls_id] + pieces[start:end] + [encoder.sep_id]
            tags = [IGNORE]
            for p in range(start, end):
                tags.append(first_label.get(p, IGNORE))
            tags.append(IGNORE)
            out.append((ids, tags))
    return out


def _batches(windows, batch_size, pad_id):
    for i in range(0, len(windows), batch_size):
        chunk = windows[i : i + batch_size]
        width = max(len(ids) for ids, _ in chunk)
        input_ids, attention, labels = [], [], []
        for ids, tags in chunk:
            pad = width - len(ids)
            input_ids.append(ids + [pad_id] * pad)
            attention.append([1] * len(ids) + [0] * pad)
            labels.append(tags + [IGNORE] * pad)
        yield (
            torch.tensor(input_ids, dtype=torch.long),
            torch.tensor(attention, dtype=torch.long),
            torch.tensor(labels, dtype=torch.long),
        )


def train_tagger(train_file, out_dir, config: TrainerConfig | None = None) -> Path:
    """Train on a token-label TSV and save the model artifact directory.

    Validation happens before any model work so a bad file leaves nothing
    behind. The label map and config hash are deterministic for a given file
    and config; weight determinism is not promised.
    """
    config = config or TrainerConfig()
    docs = read_train_file(train_file)
    labels = single_task_labels(docs, path=train_file)
    task = labels[1].removeprefix("I-")

    torch.manual_seed(config.seed)
    if config.base_model == SCRATCH:
        vocab = WordPieceVocab.build(t for doc in docs for t in doc.tokens)
        encoder = ScratchEncoder(vocab)
        model = _build_scratch_model(len(vocab), config, len(labels))
    else:
        from transformers import AutoModelForTokenClassification, AutoTokenizer

        tokenizer = AutoTokenizer.from_pretrained(config.base_model)
        encoder = PretrainedEncoder(tokenizer)
        model = AutoModelForTokenClassification.from_pretrained(
            config.base_model, num_labels=len(labels)
        )

    budget = config.max_seq_len - 2
    windows = _training_windows(docs, encoder, labels, budget)
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay
    )
    rng = random.Random(config.seed)
    model.train()
    for epoch in range(1, config.epochs + 1):
        rng.shuffle(windows)
        total, steps = 0.0, 0
        for input_ids, attention, label_ids in _batches(
            windows, config.batch_size, encoder.pad_id
        ):
            optimizer.zero_grad()
            loss = model(
                input_ids=input_ids, attention_mask=attention, labels=label_ids
            ).loss
            loss.backward()
            optimizer.step()
            total += loss.item()
            steps += 1
        log.info("epoch %d/%d: mean loss %.4f", epoch, config.epochs, total / steps)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = dict(asdict(config))
    meta.update(
        {
            "config_hash": config.hash(),
            "labels": labels,
            "task": task,
            "vocab_size": len(encoder),
        }
    )
    (out_dir / CONFIG_FILE).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    (out_dir / LABEL_MAP_FILE).write_text(
        json.dumps({"labels": labels, "task": task}, sort_keys=True) + "\n"
    )
    if config.base_model == SCRATCH:
        encoder.vocab.save(out_dir / VOCAB_FILE)
        torch.save(model.state_dict(), out_dir / WEIGHTS_FILE)
    else:
        model.save_pretrained(out_dir / PRETRAINED_DIR)
        encoder.tokenizer.save_pretrained(out_dir / TOKENIZER_DIR)
    return out_dir


def load_artifact(artifact_dir):
    """Rebuild (meta, encoder, model) from a saved artifact directory."""
    artifact_dir = Path(artifact_dir)
    config_path = artifact_dir / CONFIG_FILE
    if not config_path.exists():
        raise ArtifactError(f"{artifact_dir}: missing {CONFIG_FILE}")
    meta = json.loads(config_path.read_text())
    for key in ("labels", "base_model", "max_seq_len"):
        if key not in meta:
            raise ArtifactError(f"{artifact_dir}: {CONFIG_FILE} lacks {key!r}")
    if meta["base_model"] == SCRATCH:
        shape_keys = {
            f: meta[f]
            for f in (
                "base_model",
                "learning_rate",
                "batch_size",
                "weight_decay",
                "epochs",
                "max_seq_len",
                "seed",
                "hidden_size",
                "num_layers",
                "num_heads",
            )
        }
        config = TrainerConfig(**shape_keys)
        vocab = WordPieceVocab.load(artifact_dir / VOCAB_FILE)
        if len(vocab) != meta["vocab_size"]:
            raise ArtifactError(f"{artifact_dir}: vocab size does not match metadata")
        encoder = ScratchEncoder(vocab)
        model = _build_scratch_model(len(vocab), config, len(meta["labels"]))
        state = torch.load(artifact_dir / WEIGHTS_FILE, map_location="cpu")
        model.load_state_dict(state)
    else:
        from transformers import AutoModelForTokenClassification, AutoTokenizer

        encoder = PretrainedEncoder(
            AutoTokenizer.from_pretrained(artifact_dir / TOKENIZER_DIR)
        )
        model = AutoModelForTokenClassification.from_pretrained(
            artifact_dir / PRETRAINED_DIR
        )
    model.eval()
    return meta, encoder, model
