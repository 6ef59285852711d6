#!/usr/bin/env python3
"""Regenerate the toy fixtures under fixtures/.

The fixture corpus is designed so that the gpt-4o cassette alone reproduces
the gold labels exactly while every other teacher both misses each note's
rare symptom and adds at least one false positive. That makes {gpt-4o} the
unique selection winner no matter which documents land in the dev split.

Run from the repo root after an editable install:

    python3 scripts/build_fixtures.py
"""

from __future__ import annotations

import json
import random
from pathlib import Path

import yaml

from notedistill.corpus import Document, write_corpus
from notedistill.spanlab import ground_entities, project_to_io, tokenize, TokenLabelSequence, write_token_file
from notedistill.teachers import approx_token_count, cache_key, load_builtin_template, parse_teacher_response, render_prompt

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

# per note: (id, category, text, gold terms, common gold terms in the
# lexicon, FP strings for gpt-4o-mini / o1-mini / gemini)
NOTES = [
    (
        "note-001",
        "progress",
        "Pt reports nausea and vomiting since Tuesday. Denies fever or photophobia. "
        "Blood pressure stable on lisinopril. Appetite fair.",
        ["nausea", "vomiting", "fever", "photophobia"],
        ["nausea", "vomiting", "fever"],
        ["stable"],
        ["Tuesday"],
        ["stable", "fair"],
    ),
    (
        "note-002",
        "progress",
        "Patient with persistent headache and dizziness. Reports tinnitus in the left ear. "
        "No chest pressure. Sleep pattern normal.",
        ["headache", "dizziness", "tinnitus"],
        ["headache", "dizziness"],
        ["normal"],
        ["Sleep"],
        ["left", "ear"],
    ),
    (
        "note-003",
        "nursing",
        "Overnight the patient had fever and chills. New onset vertigo when standing. "
        "Pressure ulcer dressing changed. Took fluids well.",
        ["fever", "chills", "vertigo"],
        ["fever", "chills"],
        ["standing"],
        ["fluids"],
        ["dressing", "Overnight"],
    ),
    (
        "note-004",
        "nursing",
        "Resident complains of fatigue and poor appetite. Episodes of palpitations noted "
        "on telemetry. Cuff pressure rechecked at bedside.",
        ["fatigue", "palpitations"],
        ["fatigue"],
        ["telemetry"],
        ["bedside"],
        ["poor", "Resident"],
    ),
    (
        "note-005",
        "discharge",
        "Discharged home after resolution of cough and fever. Mild wheezing persists with "
        "exertion. Home blood pressure monitoring arranged.",
        ["cough", "fever", "wheezing"],
        ["cough", "fever"],
        ["exertion"],
        ["resolution"],
        ["exertion", "monitoring"],
    ),
    (
        "note-006",
        "discharge",
        "Patient leaves with improved nausea. Myalgia after statin dose reduction. Eye "
        "pressure normal per ophthalmology. Follow up in two weeks.",
        ["nausea", "myalgia"],
        ["nausea"],
        ["statin"],
        ["weeks"],
        ["ophthalmology", "improved"],
    ),
    (
        "note-007",
        "radiology",
        "CT head obtained for worsening headache and dizziness. Patient endorsed pruritus "
        "after contrast. No acute findings. Pressure settings per protocol.",
        ["headache", "dizziness", "pruritus"],
        ["headache", "dizziness"],
        ["contrast"],
        ["protocol"],
        ["findings", "acute"],
    ),
    (
        "note-008",
        "radiology",
        "Chest film for productive cough and rigors. No effusion. Mild fatigue reported "
        "during positioning. Pressure bag used for injector.",
        ["cough", "rigors", "fatigue"],
        ["cough", "fatigue"],
        ["effusion"],
        ["injector"],
        ["positioning", "film"],
    ),
]

# symptom surfaces; "pressure" is the deliberate gazetteer false positive
LEXICON = [
    ("nausea", "T184", "SYM"),
    ("vomiting", "T184", "SYM"),
    ("fever", "T184", "SYM"),
    ("headache", "T184", "SYM"),
    ("dizziness", "T184", "SYM"),
    ("fatigue", "T184", "SYM"),
    ("cough", "T184", "SYM"),
    ("chills", "T184", "SYM"),
    ("pressure", "T184", "SYM"),
    ("lisinopril", "T121", "MED"),
    ("statin", "T121", "MED"),
]

BASE_LATENCY_MS = {
    "gpt-4o": 1660.0,
    "gpt-4o-mini": 905.0,
    "o1-mini": 580.0,
    "gemini-1.5-flash": 1170.0,
}


def responses_for(note) -> dict[str, str]:
    _, _, text, gold, common, mini_fp, o1_fp, gemini_fp = note
    joined = " // ".join(gold)
    negated = "Yes, negated symptoms were included"
    return {
        "gpt-4o": json.dumps(
            {"entities": joined, "negated_symptoms_included": negated}
        ),
        "gpt-4o-mini": json.dumps({"entities": " // ".join(common + mini_fp)}),
        "o1-mini": " // ".join(common[:1] + o1_fp),
        "gemini-1.5-flash": json.dumps(
            {
                # stray padding exercises the parser's trimming
                "entities": " // ".join(f" {t} " for t in common + gemini_fp),
                "negated_symptoms_included": negated,
            }
        ),
    }


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    (FIXTURES / "cassettes").mkdir(exist_ok=True)

    docs = [
        Document(id=n[0], text=n[2], category=n[1], dataset="toy", split="unsplit")
        for n in NOTES
    ]
    write_corpus(docs, FIXTURES / "pool.jsonl")

    gold_seqs = []
    for note in NOTES:
        doc_id, _, text, gold, *_ = note
        spans, ungrounded = ground_entities(text, gold, "SYM", source="gold")
        if ungrounded:
            raise SystemExit(f"{doc_id}: gold terms not groundable: {ungrounded}")
        tokens = tokenize(text)
        gold_seqs.append(TokenLabelSequence(doc_id, tokens, project_to_io(tokens, spans)))
    write_token_file(gold_seqs, FIXTURES / "gold.tsv")

    with open(FIXTURES / "lexicon.tsv", "w", encoding="utf-8") as fh:
        for surface, tui, label in LEXICON:
            fh.write(f"{surface}\t{tui}\t{label}\n")

    template = load_builtin_template("SYM")
    rng = random.Random(20240601)
    files = {name: [] for name in BASE_LATENCY_MS}
    for note in NOTES:
        doc_id, _, text, *_ = note
        prompt = render_prompt(template, text)
        for name, raw in responses_for(note).items():
            entities = parse_teacher_response("SYM", raw)
            record = {
                "key": cache_key(name, "SYM", prompt),
                "model": name,
                "task": "SYM",
                "doc_id": doc_id,
                "raw_response": raw,
                "entities": entities,
                "tokens_in": approx_token_count(prompt),
                "tokens_out": approx_token_count(raw),
                "latency_ms": round(BASE_LATENCY_MS[name] + rng.uniform(-80, 80), 1),
            }
            files[name].append(json.dumps(record, ensure_ascii=False))
    for name, lines in files.items():
        safe = name.replace("/", "_")
        with open(FIXTURES / "cassettes" / f"{safe}.jsonl", "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    with open(FIXTURES / "pricing.yaml", "w", encoding="utf-8") as fh:
        yaml.safe_dump(
            {
                "models": {
                    "gpt-4o": {"input_per_million_usd": 2.5, "output_per_million_usd": 10.0},
                    "gpt-4o-mini": {"input_per_million_usd": 0.15, "output_per_million_usd": 0.6},
                    "o1-mini": {"input_per_million_usd": 3.0, "output_per_million_usd": 12.0},
                    "gemini-1.5-flash": {"input_per_million_usd": 0.075, "output_per_million_usd": 0.3},
                },
                "gpu_hourly_usd": 4.74,
            },
            fh,
            sort_keys=True,
        )

    tagger_rng = random.Random(7)
    with open(FIXTURES / "usage_tagger.jsonl", "w", encoding="utf-8") as fh:
        for note in NOTES:
            seconds = round(0.14 + tagger_rng.uniform(-0.02, 0.02), 4)
            fh.write(
                json.dumps(
                    {
                        "system": "distilled-tagger",
                        "doc_id": note[0],
                        "latency_s": seconds,
                        "inference_seconds": seconds,
                    }
                )
                + "\n"
            )

    config = {
        "task": "SYM",
        "seed": 20240601,
        "parallelism": 2,
        "figures": True,
        "output_dir": "out",
        "pool": "pool.jsonl",
        "gold": "gold.tsv",
        "quota": {"progress": 2, "nursing": 2, "discharge": 1, "radiology": 1},
        "dev_size": 2,
        "teachers": [
            {"name": "gpt-4o", "kind": "llm", "mode": "replay"},
            {"name": "gpt-4o-mini", "kind": "llm", "mode": "replay"},
            {"name": "o1-mini", "kind": "llm", "mode": "replay"},
            {"name": "gemini-1.5-flash", "kind": "llm", "mode": "replay"},
            {"name": "ontology", "kind": "lexicon"},
        ],
        "cassette_dir": "cassettes",
        "lexicon": "lexicon.tsv",
        "pricing": "pricing.yaml",
        "baseline_system": "distilled-tagger",
        "adjudication": {"n": 170, "n_double": 90, "window": 5},
    }
    with open(FIXTURES / "config.yaml", "w", encoding="utf-8") as fh:
        yaml.safe_dump(config, fh, sort_keys=False)

    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
