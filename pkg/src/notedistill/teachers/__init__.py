"""Teacher labelers: prompted LLM teachers and the ontology gazetteer."""

from .cassette import CassetteStore, TeacherRecord, cache_key
from .gazetteer import TASK_TUIS, LexiconEntry, gazetteer_label, load_lexicon
from .labeling import LabelingResult, TeacherSpec, label_corpus
from .llm import LlmTeacherConfig, approx_token_count, invoke_llm_teacher
from .prompts import (
    PromptTemplate,
    load_builtin_template,
    parse_teacher_response,
    render_prompt,
)

__all__ = [
    "CassetteStore",
    "TeacherRecord",
    "cache_key",
    "TASK_TUIS",
    "LexiconEntry",
    "gazetteer_label",
    "load_lexicon",
    "LabelingResult",
    "TeacherSpec",
    "label_corpus",
    "LlmTeacherConfig",
    "approx_token_count",
    "invoke_llm_teacher",
    "PromptTemplate",
    "load_builtin_template",
    "parse_teacher_response",
    "render_prompt",
]
