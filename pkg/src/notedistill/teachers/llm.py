"""HTTP client for LLM teachers with cassette record/replay.

Requests use the chat-completion shape and pinned near-greedy sampling
(temperature 0.01, top-p 0.9). Transient failures retry with capped
exponential backoff, three attempts total.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass

import requests

from ..corpus import Document
from ..errors import CassetteMissError, EndpointError
from .cassette import CassetteStore, TeacherRecord, cache_key
from .prompts import PromptTemplate, parse_teacher_response, render_prompt

TEMPERATURE = 0.01
TOP_P = 0.9
MAX_ATTEMPTS = 3
_BACKOFF_BASE_S = 0.5
_BACKOFF_CAP_S = 4.0
_RETRYABLE_STATUS = {429, 500, 502, 503, 504}


@dataclass(frozen=True, slots=True)
class LlmTeacherConfig:
    name: str
    mode: str = "replay"  # "replay" answers from the cassette only
    endpoint: str | None = None
    api_key_env: str | None = None
    timeout_s: float = 60.0

    def __post_init__(self):
        if self.mode not in ("replay", "record"):
            raise EndpointError(f"teacher {self.name!r}: unknown mode {self.mode!r}")


def approx_token_count(text: str) -> int:
    """Byte-length heuristic used when an endpoint reports no usage."""
    return math.ceil(len(text.encode("utf-8")) / 4)


def _post_with_retry(config: LlmTeacherConfig, payload: dict) -> tuple[dict, float]:
    if not config.endpoint:
        raise EndpointError(f"teacher {config.name!r}: record mode needs an endpoint")
    headers = {"Content-Type": "application/json"}
    if config.api_key_env:
        key = os.environ.get(config.api_key_env)
        if not key:
            raise EndpointError(
                f"teacher {config.name!r}: credential variable {config.api_key_env} is unset"
            )
        headers["Authorization"] = f"Bearer {key}"
    last = "no attempt made"
    for attempt in range(MAX_ATTEMPTS):
        if attempt:
            time.sleep(min(_BACKOFF_BASE_S * 2 ** (attempt - 1), _BACKOFF_CAP_S))
        started = time.perf_counter()
        try:
            response = requests.post(
                config.endpoint, json=payload, headers=headers, timeout=config.timeout_s
            )
        except requests.RequestException as exc:
            last = f"connection failure ({exc.__class__.__name__})"
            continue
        latency_ms = (time.perf_counter() - started) * 1000.0
        if response.status_code in _RETRYABLE_STATUS:
            last = f"status {response.status_code}"
            continue
        if response.status_code != 200:
            raise EndpointError(
                f"teacher {config.name!r}: status {response.status_code} from endpoint"
            )
        try:
            return response.json(), latency_ms
        except ValueError:
            raise EndpointError(
                f"teacher {config.name!r}: endpoint returned a non-JSON body"
            ) from None
    raise EndpointError(
        f"teacher {config.name!r}: giving up after {MAX_ATTEMPTS} attempts, last: {last}"
    )


def invoke_llm_teacher(
    config: LlmTeacherConfig,
    template: PromptTemplate,
    document: Document,
    store: CassetteStore,
) -> TeacherRecord:
    """Return the teacher's record for one document.

    Replay mode answers from the cassette and treats a miss as an error.
    Record mode calls the endpoint on a miss, stores the record, and returns
    it; a later replay of the same call yields identical bytes.
    """
    prompt = render_prompt(template, document.text)
    key = cache_key(config.name, template.task, prompt)
    record = store.get(key)
    if record is not None:
        return record
    if config.mode == "replay":
        raise CassetteMissError(
            f"cassette miss for teacher {config.name!r}, task {template.task}, "
            f"doc {document.id!r} (key {key})"
        )
    payload = {
        "model": config.name,
        "temperature": TEMPERATURE,
        "top_p": TOP_P,
        "messages": [{"role": "user", "content": prompt}],
    }
    body, latency_ms = _post_with_retry(config, payload)
    try:
        content = body["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        raise EndpointError(
            f"teacher {config.name!r}: response lacks choices[0].message.content"
        ) from None
    usage = body.get("usage") or {}
    record = TeacherRecord(
        key=key,
        model=config.name,
        task=template.task,
        doc_id=document.id,
        raw_response=content,
        entities=tuple(parse_teacher_response(template.task, content)),
        tokens_in=int(usage.get("prompt_tokens", approx_token_count(prompt))),
        tokens_out=int(usage.get("completion_tokens", approx_token_count(content))),
        latency_ms=latency_ms,
    )
    store.put(record)
    return record
