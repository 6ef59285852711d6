"""Training hyperparameters and the hash that stamps artifacts."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass

from .errors import TrainerConfigError

SCRATCH = "scratch"


@dataclass(frozen=True, slots=True)
class TrainerConfig:
    base_model: str = SCRATCH
    learning_rate: float = 2e-5
    batch_size: int = 8
    weight_decay: float = 0.01
    epochs: int = 10
    max_seq_len: int = 128
    seed: int = 13
    # encoder shape, used only when base_model == "scratch"
    hidden_size: int = 128
    num_layers: int = 2
    num_heads: int = 2

    def __post_init__(self):
        problems = []
        if not self.base_model:
            problems.append("base_model must be non-empty")
        if self.learning_rate <= 0:
            problems.append("learning_rate must be positive")
        if self.batch_size < 1:
            problems.append("batch_size must be at least 1")
        if self.weight_decay < 0:
            problems.append("weight_decay must be non-negative")
        if self.epochs < 1:
            problems.append("epochs must be at least 1")
        if self.max_seq_len < 8:
            problems.append("max_seq_len must be at least 8")
        if self.hidden_size < 8 or self.num_layers < 1 or self.num_heads < 1:
            problems.append("encoder shape fields must be positive")
        if self.hidden_size % max(self.num_heads, 1) != 0:
            problems.append("hidden_size must divide evenly by num_heads")
        if problems:
            raise TrainerConfigError("; ".join(problems))

    def hash(self) -> str:
        canonical = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]
