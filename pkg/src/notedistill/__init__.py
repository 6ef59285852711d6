"""Weakly supervised clinical NER: teacher labeling, ensemble selection,
evaluation, and cost accounting."""

__version__ = "0.1.0"

from .corpus import CorpusManifest, Document, corpus_stats, load_corpus, sample_dev, stratified_sample
from .ensemble import Combo, ComboResult, combine_union, enumerate_combos, select_best_combo
from .errors import NotedistillError
from .evaluation import (
    ConfusionCounts,
    ErrorInstance,
    MetricsReport,
    cohen_kappa,
    compute_metrics,
    confusion,
    extract_errors,
)
from .spanlab import (
    EntitySpan,
    Token,
    TokenLabelSequence,
    ground_entities,
    project_to_io,
    read_token_file,
    tokenize,
    union_labels,
    write_token_file,
)

__all__ = [
    "__version__",
    "CorpusManifest",
    "Document",
    "corpus_stats",
    "load_corpus",
    "sample_dev",
    "stratified_sample",
    "Combo",
    "ComboResult",
    "combine_union",
    "enumerate_combos",
    "select_best_combo",
    "NotedistillError",
    "ConfusionCounts",
    "ErrorInstance",
    "MetricsReport",
    "cohen_kappa",
    "compute_metrics",
    "confusion",
    "extract_errors",
    "EntitySpan",
    "Token",
    "TokenLabelSequence",
    "ground_entities",
    "project_to_io",
    "read_token_file",
    "tokenize",
    "union_labels",
    "write_token_file",
]
