"""Run a set of teachers over a corpus and collect per-document labelings."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from ..corpus import Document
from ..errors import LabelingError, NotedistillError
from ..spanlab import TokenLabelSequence, ground_entities, project_to_io, tokenize
from .cassette import CassetteStore, TeacherRecord
from .gazetteer import LexiconEntry, gazetteer_label
from .llm import LlmTeacherConfig, invoke_llm_teacher
from .prompts import PromptTemplate, load_builtin_template

log = logging.getLogger(__name__)

DEFAULT_PARALLELISM = 4


@dataclass(frozen=True, slots=True)
class TeacherSpec:
    """One configured teacher. Kind "llm" goes through the cassette client,
    kind "lexicon" through the gazetteer."""

    name: str
    kind: str = "llm"
    mode: str = "replay"
    endpoint: str | None = None
    api_key_env: str | None = None

    def __post_init__(self):
        if self.kind not in ("llm", "lexicon"):
            raise LabelingError(f"teacher {self.name!r}: unknown kind {self.kind!r}")


@dataclass(slots=True)
class LabelingResult:
    """labelings: teacher name -> doc_id -> sequence. records carries the
    underlying LLM teacher calls for cost accounting."""

    labelings: dict[str, dict[str, TokenLabelSequence]] = field(default_factory=dict)
    records: list[TeacherRecord] = field(default_factory=list)
    ungrounded_counts: dict[str, int] = field(default_factory=dict)


def _label_llm_doc(
    config: LlmTeacherConfig,
    template: PromptTemplate,
    doc: Document,
    store: CassetteStore,
) -> tuple[TeacherRecord, TokenLabelSequence, int]:
    record = invoke_llm_teacher(config, template, doc, store)
    spans, ungrounded = ground_entities(
        doc.text, record.entities, template.task, source=config.name
    )
    if ungrounded:
        log.debug(
            "teacher %s doc %s: %d ungrounded strings: %s",
            config.name, doc.id, len(ungrounded), ", ".join(ungrounded),
        )
    tokens = tokenize(doc.text)
    return record, TokenLabelSequence(doc.id, tokens, project_to_io(tokens, spans)), len(ungrounded)


def label_corpus(
    teachers: Sequence[TeacherSpec],
    documents: Sequence[Document],
    task: str,
    *,
    store: CassetteStore | None = None,
    lexicon: Sequence[LexiconEntry] = (),
    template: PromptTemplate | None = None,
    parallelism: int = DEFAULT_PARALLELISM,
) -> LabelingResult:
    """Label every document with every teacher.

    LLM teachers fan out across documents with bounded parallelism; cassette
    writes are serialized by the store itself. Any single failure aborts the
    run with a summary of what had already completed.
    """
    if not teachers:
        raise LabelingError("no teachers configured")
    names = [t.name for t in teachers]
    if len(set(names)) != len(names):
        raise LabelingError(f"duplicate teacher names in {names}")
    if parallelism < 1:
        raise LabelingError(f"parallelism must be positive, got {parallelism}")
    if any(t.kind == "llm" for t in teachers) and store is None:
        raise LabelingError("LLM teachers need a cassette store")

    result = LabelingResult()
    for spec in teachers:
        per_doc: dict[str, TokenLabelSequence] = {}
        ungrounded_total = 0
        if spec.kind == "lexicon":
            for doc in documents:
                spans = gazetteer_label(tuple(lexicon), doc, task, source=spec.name)
                tokens = tokenize(doc.text)
                per_doc[doc.id] = TokenLabelSequence(
                    doc.id, tokens, project_to_io(tokens, spans)
                )
        else:
            config = LlmTeacherConfig(
                name=spec.name,
                mode=spec.mode,
                endpoint=spec.endpoint,
                api_key_env=spec.api_key_env,
            )
            tpl = template or load_builtin_template(task)
            with ThreadPoolExecutor(max_workers=parallelism) as pool:
                futures = [
                    pool.submit(_label_llm_doc, config, tpl, doc, store)
                    for doc in documents
                ]
                outcomes = []
                failure: NotedistillError | None = None
                for future in futures:
                    try:
                        outcomes.append(future.result())
                    except NotedistillError as exc:
                        failure = exc
                        break
                if failure is not None:
                    done = [doc.id for doc, o in zip(documents, outcomes)]
                    raise LabelingError(
                        f"teacher {spec.name!r} failed after completing "
                        f"{len(done)} of {len(documents)} documents "
                        f"({', '.join(done) or 'none'}): {failure}"
                    ) from failure
            for doc, (record, seq, n_ungrounded) in zip(documents, outcomes):
                result.records.append(record)
                per_doc[doc.id] = seq
                ungrounded_total += n_ungrounded
        if ungrounded_total:
            log.info(
                "teacher %s: %d entity strings could not be grounded",
                spec.name, ungrounded_total,
            )
        result.labelings[spec.name] = per_doc
        result.ungrounded_counts[spec.name] = ungrounded_total
    return result
