"""Command line entry points: tagtrain train / tagtrain predict."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import TrainerConfig
from .errors import TagtrainerError
from .inference import DEFAULT_SYSTEM, predict_tags
from .training import train_tagger


# TrainerConfig uses slots, so defaults must come from an instance, not the class.
_DEFAULTS = TrainerConfig()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tagtrain",
        description="Train a compact token tagger on teacher labels and run inference",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="fit a tagger on a token-label TSV")
    train.add_argument("--train-file", required=True)
    train.add_argument("--out", required=True, help="artifact directory")
    train.add_argument("--base-model", default=_DEFAULTS.base_model)
    train.add_argument("--learning-rate", type=float, default=_DEFAULTS.learning_rate)
    train.add_argument("--batch-size", type=int, default=_DEFAULTS.batch_size)
    train.add_argument("--weight-decay", type=float, default=_DEFAULTS.weight_decay)
    train.add_argument("--epochs", type=int, default=_DEFAULTS.epochs)
    train.add_argument("--max-seq-len", type=int, default=_DEFAULTS.max_seq_len)
    train.add_argument("--seed", type=int, default=_DEFAULTS.seed)

    predict = sub.add_parser("predict", help="tag a documents file with an artifact")
    predict.add_argument("--artifact", required=True)
    predict.add_argument("--documents", required=True)
    predict.add_argument("--out", required=True, help="output token-label TSV")
    predict.add_argument("--usage", default=None, help="optional usage JSONL")
    predict.add_argument("--system", default=DEFAULT_SYSTEM)
    return parser


def run(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            config = TrainerConfig(
                base_model=args.base_model,
                learning_rate=args.learning_rate,
                batch_size=args.batch_size,
                weight_decay=args.weight_decay,
                epochs=args.epochs,
                max_seq_len=args.max_seq_len,
                seed=args.seed,
            )
            out = train_tagger(args.train_file, args.out, config)
            print(f"artifact -> {out}")
        else:
            out = predict_tags(
                args.artifact,
                args.documents,
                args.out,
                usage_path=args.usage,
                system=args.system,
            )
            print(f"predictions -> {out}")
    except TagtrainerError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
