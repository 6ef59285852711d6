"""Command-line pipeline: sample, label, select, emit, eval, errors, cost.

Every subcommand takes --config, writes its outputs under the configured
output directory with the config hash stamped in a header line, and exits 0
on success. Failures print a single JSON line on stderr and exit nonzero.
Reruns with unchanged inputs rewrite byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import corpus as corpus_mod
from . import costing as costing_mod
from . import evaluation as eval_mod
from . import reporting
from .config import RunConfig, load_config
from .ensemble import combine_union, select_best_combo
from .errors import (
    ConfigError,
    CorpusError,
    EnsembleError,
    EvaluationError,
    NotedistillError,
)
from .spanlab import TokenLabelSequence, read_token_file, write_token_file
from .teachers import CassetteStore, label_corpus, load_lexicon
from .teachers.prompts import load_builtin_template, load_template_file


def _load_stage_corpus(path: Path, stage_hint: str) -> list[corpus_mod.Document]:
    if not path.exists():
        raise CorpusError(f"{path} not found; run '{stage_hint}' first")
    return corpus_mod.load_corpus(path)


def _read_labels(config: RunConfig, split: str, teachers: list[str]) -> dict:
    labelings = {}
    for teacher in teachers:
        path = config.labels_path(split, teacher)
        if not path.exists():
            raise EnsembleError(f"{path} not found; run 'label --split {split}' first")
        labelings[teacher] = {seq.doc_id: seq for seq in read_token_file(path)}
    return labelings


def _gold_for_docs(config: RunConfig, doc_ids: list[str]) -> dict[str, TokenLabelSequence]:
    if config.gold is None:
        raise EvaluationError("config has no gold file")
    by_id = {seq.doc_id: seq for seq in read_token_file(config.gold)}
    missing = [d for d in doc_ids if d not in by_id]
    if missing:
        raise EvaluationError(f"gold file lacks documents: {', '.join(missing)}")
    return {d: by_id[d] for d in doc_ids}


def _template_for(config: RunConfig):
    if config.prompt_file is not None:
        return load_template_file(config.task, config.prompt_file)
    return load_builtin_template(config.task)


def cmd_sample(config: RunConfig, args) -> int:
    if config.pool is None:
        raise ConfigError(["sample needs a 'pool' corpus path"])
    if not config.quota:
        raise ConfigError(["sample needs a non-empty 'quota' mapping"])
    pool = corpus_mod.load_corpus(config.pool)
    sampled = corpus_mod.stratified_sample(pool, config.quota, config.seed)
    as_train = [replace(d, split="train") for d in sampled]
    dev_docs = corpus_mod.sample_dev(as_train, config.dev_size, config.seed)
    dev_ids = {d.id for d in dev_docs}
    train_docs = [d for d in as_train if d.id not in dev_ids]

    config.output_dir.mkdir(parents=True, exist_ok=True)
    corpus_mod.write_corpus(train_docs, config.train_corpus_path(), config.header())
    corpus_mod.write_corpus(dev_docs, config.dev_corpus_path(), config.header())
    manifest = corpus_mod.corpus_stats(train_docs + dev_docs)
    reporting.write_manifest(manifest, config.manifest_path(), config.header())
    if config.figures:
        config.figure_path("corpus_tokens").parent.mkdir(parents=True, exist_ok=True)
        reporting.render_token_histogram(
            train_docs + dev_docs, config.figure_path("corpus_tokens")
        )
    print(
        f"sampled {len(train_docs)} train + {len(dev_docs)} dev documents "
        f"-> {config.output_dir}"
    )
    return 0


def cmd_label(config: RunConfig, args) -> int:
    split = args.split
    path = config.train_corpus_path() if split == "train" else config.dev_corpus_path()
    docs = _load_stage_corpus(path, "sample")
    store = CassetteStore(config.cassette_dir) if config.cassette_dir else None
    lexicon = load_lexicon(config.lexicon) if config.lexicon else ()
    result = label_corpus(
        config.teachers,
        docs,
        config.task,
        store=store,
        lexicon=lexicon,
        template=_template_for(config) if any(t.kind == "llm" for t in config.teachers) else None,
        parallelism=config.parallelism,
    )
    for teacher, per_doc in result.labelings.items():
        out = config.labels_path(split, teacher)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_token_file([per_doc[d.id] for d in docs], out, config.header())
    usage = [
        costing_mod.UsageRecord(
            system=rec.model,
            doc_id=rec.doc_id,
            latency_s=rec.latency_ms / 1000.0,
            tokens_in=rec.tokens_in,
            tokens_out=rec.tokens_out,
        )
        for rec in result.records
    ]
    costing_mod.write_usage(usage, config.usage_path(split), config.header())
    print(
        f"labeled {len(docs)} {split} documents with {len(result.labelings)} teachers "
        f"-> {config.output_dir / 'labels' / split}"
    )
    return 0


def cmd_select(config: RunConfig, args) -> int:
    dev_docs = _load_stage_corpus(config.dev_corpus_path(), "sample")
    doc_ids = [d.id for d in dev_docs]
    labelings = _read_labels(config, "dev", [t.name for t in config.teachers])
    gold = _gold_for_docs(config, doc_ids)
    results = select_best_combo(labelings, gold, config.task)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    reporting.write_ranking_report(results, config.ranking_path(), config.header())
    reporting.write_winner(results[0], config.winner_path(), config.header())
    if config.figures:
        config.figure_path("ranking").parent.mkdir(parents=True, exist_ok=True)
        reporting.render_ranking_figure(results, config.figure_path("ranking"))
    best = results[0]
    print(f"best combo: {best.combo} (f1={best.f1:.4f}) over {len(results)} candidates")
    return 0


def cmd_emit(config: RunConfig, args) -> int:
    winner_path = config.winner_path()
    if not winner_path.exists():
        raise EnsembleError(f"{winner_path} not found; run 'select' first")
    combo = reporting.read_winner(winner_path)
    train_docs = _load_stage_corpus(config.train_corpus_path(), "sample")
    labelings = _read_labels(config, "train", list(combo.members))
    merged = [combine_union(labelings, combo, d.id) for d in train_docs]
    write_token_file(merged, config.distill_path(), config.header())
    print(f"emitted {len(merged)} training labelings from {combo} -> {config.distill_path()}")
    return 0


def _paired_sequences(gold_path: Path, pred_path: Path):
    """Pair every predicted document with its gold labeling.

    The prediction file decides what gets scored; the gold file may cover
    more documents than were predicted, but never fewer.
    """
    gold = {seq.doc_id: seq for seq in read_token_file(gold_path)}
    pred = read_token_file(pred_path)
    if not pred:
        raise EvaluationError(f"{pred_path} holds no documents")
    missing = [seq.doc_id for seq in pred if seq.doc_id not in gold]
    if missing:
        raise EvaluationError(f"gold file lacks documents: {', '.join(missing)}")
    return [(gold[seq.doc_id], seq) for seq in pred]


def cmd_eval(config: RunConfig, args) -> int:
    pairs = _paired_sequences(Path(args.gold), Path(args.pred))
    counts = eval_mod.ConfusionCounts()
    for gold_seq, pred_seq in pairs:
        counts = counts + eval_mod.confusion(gold_seq, pred_seq)
    report = eval_mod.compute_metrics(counts, task=config.task, system=args.system)
    out = Path(args.out) if args.out else config.output_dir / "metrics.yaml"
    out.parent.mkdir(parents=True, exist_ok=True)
    reporting.write_metrics_report(report, out, config.header())
    if config.figures:
        config.figure_path("metrics").parent.mkdir(parents=True, exist_ok=True)
        reporting.render_metrics_figure(report, config.figure_path("metrics"))
    print(
        f"{report.system}: precision={report.precision:.4f} recall={report.recall:.4f} "
        f"f1={report.f1:.4f} ({counts.total} tokens) -> {out}"
    )
    return 0


def cmd_errors(config: RunConfig, args) -> int:
    config.output_dir.mkdir(parents=True, exist_ok=True)
    if args.adjudicated:
        records = eval_mod.read_adjudication_records(Path(args.adjudicated))
        summary = eval_mod.aggregate_adjudications(records)
        out = config.output_dir / "adjudication_summary.yaml"
        reporting.write_adjudication_summary(summary, out, config.header())
        kappa = "n/a" if summary.double_kappa is None else f"{summary.double_kappa:.4f}"
        print(
            f"aggregated {len(records)} verdicts over {sum(b['n'] for b in summary.per_kind.values())} "
            f"instances (double kappa: {kappa}) -> {out}"
        )
        return 0
    instances = []
    for gold_seq, pred_seq in _paired_sequences(Path(args.gold), Path(args.pred)):
        instances.extend(
            eval_mod.extract_errors(gold_seq, pred_seq, config.adjudication_window)
        )
    n = min(config.adjudication_n, len(instances))
    n_double = min(config.adjudication_n_double, n)
    assignments = eval_mod.sample_for_adjudication(instances, n, n_double, config.seed)
    out = config.output_dir / "adjudication_worksheet.tsv"
    eval_mod.write_adjudication_worksheet(assignments, out, config.header())
    print(
        f"extracted {len(instances)} errors, sampled {n} ({n_double} double-annotated) -> {out}"
    )
    return 0


def cmd_cost(config: RunConfig, args) -> int:
    if config.pricing is None:
        raise ConfigError(["cost needs a 'pricing' file"])
    pricing = costing_mod.load_pricing(config.pricing)
    records = []
    for usage_path in args.usage:
        records.extend(costing_mod.load_usage(Path(usage_path)))
    report = costing_mod.build_cost_report(records, pricing, config.baseline_system)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    out = config.output_dir / "cost_report.tsv"
    reporting.write_cost_report(report, out, config.header())
    if config.figures:
        config.figure_path("cost").parent.mkdir(parents=True, exist_ok=True)
        reporting.render_cost_figure(report, config.figure_path("cost"))
    print(f"cost report for {len(report.rows)} systems -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="notedistill",
        description="Distill clinical NER labels from teacher ensembles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the YAML run config")
        p.set_defaults(func=func)
        return p

    add("sample", cmd_sample, "stratified corpus sampling plus dev split")
    p_label = add("label", cmd_label, "run all teachers over a split")
    p_label.add_argument("--split", choices=("train", "dev"), default="dev")
    add("select", cmd_select, "rank teacher combos on dev and persist the winner")
    add("emit", cmd_emit, "write the winning combo's training labels")
    p_eval = add("eval", cmd_eval, "score predictions against gold labels")
    p_eval.add_argument("--gold", required=True)
    p_eval.add_argument("--pred", required=True)
    p_eval.add_argument("--system", default="predictions")
    p_eval.add_argument("--out", default=None)
    p_err = add("errors", cmd_errors, "extract errors and manage adjudication")
    p_err.add_argument("--gold")
    p_err.add_argument("--pred")
    p_err.add_argument("--adjudicated", help="filled worksheet to aggregate")
    p_cost = add("cost", cmd_cost, "build the cost comparison report")
    p_cost.add_argument("--usage", nargs="+", required=True)
    return parser


def run(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        if args.command == "errors" and not args.adjudicated:
            if not args.gold or not args.pred:
                raise ConfigError(["errors needs --gold and --pred unless --adjudicated is given"])
        return args.func(config, args)
    except NotedistillError as exc:
        message = str(exc).replace("\n", " ")
        print(json.dumps({"error": exc.code, "message": message}), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
