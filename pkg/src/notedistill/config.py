"""Run configuration: one YAML file drives every CLI subcommand.

Validation collects every problem before failing so a bad config is fixed in
one round trip. Relative paths resolve against the config file's directory.
The configuration hash identifies the raw file contents and is stamped into
every output the pipeline writes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError
from .spanlab import LABEL_CLASSES
from .teachers import TeacherSpec

_TEACHER_KINDS = ("llm", "lexicon")
_TEACHER_MODES = ("replay", "record")

_KNOWN_KEYS = {
    "task",
    "seed",
    "parallelism",
    "figures",
    "output_dir",
    "pool",
    "gold",
    "quota",
    "dev_size",
    "teachers",
    "cassette_dir",
    "lexicon",
    "pricing",
    "baseline_system",
    "endpoint",
    "api_key_env",
    "adjudication",
    "prompt_file",
}


@dataclass(slots=True)
class RunConfig:
    task: str
    seed: int
    output_dir: Path
    pool: Path | None
    gold: Path | None
    quota: dict[str, int]
    dev_size: int
    teachers: list[TeacherSpec]
    cassette_dir: Path | None
    lexicon: Path | None
    pricing: Path | None
    baseline_system: str
    parallelism: int = 4
    figures: bool = True
    adjudication_n: int = 170
    adjudication_n_double: int = 90
    adjudication_window: int = 5
    prompt_file: Path | None = None
    config_hash: str = ""
    base_dir: Path = field(default_factory=Path)

    # conventional locations of stage outputs under output_dir
    def train_corpus_path(self) -> Path:
        return self.output_dir / "train.jsonl"

    def dev_corpus_path(self) -> Path:
        return self.output_dir / "dev.jsonl"

    def manifest_path(self) -> Path:
        return self.output_dir / "manifest.yaml"

    def labels_path(self, split: str, teacher: str) -> Path:
        safe = "".join(c if c.isalnum() or c in "._-" else "_" for c in teacher)
        return self.output_dir / "labels" / split / f"{safe}.tsv"

    def usage_path(self, split: str) -> Path:
        return self.output_dir / f"usage_{split}.jsonl"

    def ranking_path(self) -> Path:
        return self.output_dir / "ranking.tsv"

    def winner_path(self) -> Path:
        return self.output_dir / "winner.yaml"

    def distill_path(self) -> Path:
        return self.output_dir / "train_distill.tsv"

    def figure_path(self, name: str) -> Path:
        return self.output_dir / "figures" / f"{name}.png"

    def header(self) -> dict[str, str]:
        return {"config_hash": self.config_hash}


def compute_config_hash(raw: dict) -> str:
    canonical = json.dumps(raw, sort_keys=True, ensure_ascii=False, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def load_config(path) -> RunConfig:
    path = Path(path)
    problems: list[str] = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError([f"cannot read config: {exc}"]) from None
    except yaml.YAMLError as exc:
        raise ConfigError([f"config is not valid YAML: {exc}"]) from None
    if not isinstance(raw, dict):
        raise ConfigError(["config must be a mapping"])

    for key in sorted(set(raw) - _KNOWN_KEYS):
        problems.append(f"unknown key {key!r}")

    def take(key, expected, default=None, required=False):
        if key not in raw:
            if required:
                problems.append(f"missing key {key!r}")
            return default
        value = raw[key]
        if not isinstance(value, expected) or isinstance(value, bool) and expected is int:
            problems.append(f"key {key!r} must be {getattr(expected, '__name__', expected)}")
            return default
        return value

    base = path.parent
    task = take("task", str, required=True)
    if task is not None and task not in LABEL_CLASSES:
        problems.append(f"task must be one of {list(LABEL_CLASSES)}, got {task!r}")
    seed = take("seed", int, default=0)
    parallelism = take("parallelism", int, default=4)
    if parallelism is not None and parallelism < 1:
        problems.append("parallelism must be at least 1")
    figures = take("figures", bool, default=True)
    output_dir = take("output_dir", str, required=True)
    dev_size = take("dev_size", int, default=0)
    if dev_size is not None and dev_size < 0:
        problems.append("dev_size must be non-negative")
    baseline = take("baseline_system", str, default="distilled-tagger")

    quota = {}
    if "quota" in raw:
        if not isinstance(raw["quota"], dict):
            problems.append("quota must be a mapping of category to count")
        else:
            for category, n in raw["quota"].items():
                if not isinstance(n, int) or isinstance(n, bool) or n < 0:
                    problems.append(f"quota for {category!r} must be a non-negative integer")
                else:
                    quota[str(category)] = n

    teachers: list[TeacherSpec] = []
    endpoint = take("endpoint", str)
    api_key_env = take("api_key_env", str)
    raw_teachers = raw.get("teachers")
    if not isinstance(raw_teachers, list) or not raw_teachers:
        problems.append("teachers must be a non-empty list")
        raw_teachers = []
    for i, spec in enumerate(raw_teachers):
        if not isinstance(spec, dict) or "name" not in spec:
            problems.append(f"teachers[{i}] must be a mapping with a name")
            continue
        kind = spec.get("kind", "llm")
        mode = spec.get("mode", "replay")
        if kind not in _TEACHER_KINDS:
            problems.append(f"teachers[{i}] ({spec['name']}): unknown kind {kind!r}")
            continue
        if kind == "llm" and mode not in _TEACHER_MODES:
            problems.append(f"teachers[{i}] ({spec['name']}): unknown mode {mode!r}")
            continue
        teachers.append(
            TeacherSpec(
                name=str(spec["name"]),
                kind=kind,
                mode=mode,
                endpoint=spec.get("endpoint", endpoint),
                api_key_env=spec.get("api_key_env", api_key_env),
            )
        )
    names = [t.name for t in teachers]
    if len(set(names)) != len(names):
        problems.append(f"duplicate teacher names: {names}")
    if any(t.kind == "lexicon" for t in teachers) and "lexicon" not in raw:
        problems.append("a lexicon teacher is configured but no lexicon file is given")
    if any(t.kind == "llm" for t in teachers) and "cassette_dir" not in raw:
        problems.append("an llm teacher is configured but no cassette_dir is given")

    def input_path(key, required=False):
        value = take(key, str, required=required)
        if value is None:
            return None
        resolved = base / value
        if not resolved.exists():
            problems.append(f"{key}: path {value!r} does not exist")
            return None
        return resolved

    pool = input_path("pool")
    gold = input_path("gold")
    lexicon = input_path("lexicon")
    pricing = input_path("pricing")
    cassette_dir = input_path("cassette_dir")
    prompt_file = input_path("prompt_file")

    adjudication_n, adjudication_n_double, adjudication_window = 170, 90, 5
    if "adjudication" in raw:
        adj = raw["adjudication"]
        if not isinstance(adj, dict):
            problems.append("adjudication must be a mapping")
        else:
            for name in set(adj) - {"n", "n_double", "window"}:
                problems.append(f"adjudication: unknown key {name!r}")
            for name, fallback in (("n", 170), ("n_double", 90), ("window", 5)):
                value = adj.get(name, fallback)
                if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                    problems.append(f"adjudication.{name} must be a non-negative integer")
                else:
                    if name == "n":
                        adjudication_n = value
                    elif name == "n_double":
                        adjudication_n_double = value
                    else:
                        adjudication_window = value

    if problems:
        raise ConfigError(problems)

    return RunConfig(
        task=task,
        seed=seed,
        output_dir=base / output_dir,
        pool=pool,
        gold=gold,
        quota=quota,
        dev_size=dev_size,
        teachers=teachers,
        cassette_dir=cassette_dir,
        lexicon=lexicon,
        pricing=pricing,
        baseline_system=baseline,
        parallelism=parallelism,
        figures=figures,
        adjudication_n=adjudication_n,
        adjudication_n_double=adjudication_n_double,
        adjudication_window=adjudication_window,
        prompt_file=prompt_file,
        config_hash=compute_config_hash(raw),
        base_dir=base,
    )
