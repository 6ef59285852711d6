"""Distillation trainer for token-level entity taggers.

Consumes the labeling pipeline's token-label TSV, trains a compact encoder
classifier, and emits predictions in the same format for the pipeline's
evaluator. No code is shared with the pipeline; the file formats are the
contract.
"""

from .config import SCRATCH, TrainerConfig
from .errors import (
    AlignmentError,
    ArtifactError,
    DocumentsError,
    TagtrainerError,
    TrainerConfigError,
    TrainFileError,
)
from .inference import predict_tags
from .iofmt import (
    InputDoc,
    LabeledDoc,
    read_documents,
    read_train_file,
    write_token_file,
)
from .tokening import Token, tokenize
from .training import train_tagger
from .vocab import WordPieceVocab

__version__ = "0.1.0"

__all__ = [
    "SCRATCH",
    "TrainerConfig",
    "TagtrainerError",
    "TrainFileError",
    "DocumentsError",
    "ArtifactError",
    "AlignmentError",
    "TrainerConfigError",
    "InputDoc",
    "LabeledDoc",
    "Token",
    "WordPieceVocab",
    "predict_tags",
    "read_documents",
    "read_train_file",
    "tokenize",
    "train_tagger",
    "write_token_file",
    "__version__",
]
