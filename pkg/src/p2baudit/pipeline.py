"""Run both assessment strategies over a corpus and persist evidence records.

Every report downstream is computed from these JSON records alone, so a
provider run never has to be repeated to re-format results.
"""

from __future__ import annotations

import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .checklist import questions_for
from .common import Strategy
from .corpus import PlatformCorpus
from .direct import ChunkFailure, ChunkScore, assess_question_direct, chunk_document
from .dox import DEFAULT_THETA, DoxResult, dox_score, explanatory_relevance, load_archetypes
from .errors import AuditError, UnparseableVerdict
from .providers import Embedder, GenerationConfig, TextGenerator, estimate_tokens, prompt_hash
from .retrieval import (
    DEFAULT_TOP_K,
    Verdict,
    binary_of_verdict,
    build_synthesis_prompt,
    parse_verdict,
    retrieve_top_k,
    validate_citations,
)

logger = logging.getLogger(__name__)

RECORD_VERSION = 1
MOCK_TIMESTAMP = "1970-01-01T00:00:00Z"


@dataclass(frozen=True)
class AuditSettings:
    theta: float = DEFAULT_THETA
    k: int = DEFAULT_TOP_K
    aspect: str | None = None
    max_workers: int = 4
    timestamp: str | None = None

    def stamp(self) -> str:
        return self.timestamp or datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def slug(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-") or "platform"


def record_filename(platform: str, strategy: Strategy) -> str:
    return f"{slug(platform)}__{strategy.value}.json"


def _ordered_map(fn, items, max_workers):
    """Map preserving input order; each item yields (result, error)."""
    def safe(item):
        try:
            return fn(item), None
        except AuditError as exc:
            return None, exc
    if max_workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            return list(pool.map(safe, items))
    return [safe(i) for i in items]


def _failure(question, exc):
    return {"question_id": question.id, "error": type(exc).__name__, "message": str(exc)}


def _chunk_entry(result):
    if isinstance(result, ChunkScore):
        return {"chunk_ref": result.chunk_ref, "score": result.score, "explanation": result.explanation,
                "prompt_hash": result.prompt_hash}
    assert isinstance(result, ChunkFailure)
    return {"chunk_ref": result.chunk_ref, "score": None, "error": result.error,
            "response": result.response, "prompt_hash": result.prompt_hash}


def record_header(corpus, strategy, model_id, settings, label=None, **extra):
    head = {
        "record_version": RECORD_VERSION,
        "platform_name": corpus.platform_name,
        "platform_type": corpus.platform_type.value,
        "strategy": strategy.value,
        "label": label or f"{strategy.value}:{model_id}",
        "model_id": model_id,
        "timestamp": settings.stamp(),
    }
    head.update(extra)
    return head


def assess_direct(corpus: PlatformCorpus, generator: TextGenerator, config: GenerationConfig,
                  settings: AuditSettings = AuditSettings(), questions=None, label=None) -> dict:
    """Direct strategy over every applicable question; returns the record document."""
    questions = questions if questions is not None else questions_for(corpus.platform_type)
    chunks = chunk_document(corpus, config)

    def one(q):
        a = assess_question_direct(corpus, q, config, generator, chunks=chunks)
        return {
            "question_id": q.id,
            "question": q.closed_text,
            "ordinal_score": a.ordinal_score,
            "binary": a.binary.value,
            "chunks": [_chunk_entry(r) for r in a.evidence],
        }

    results = _ordered_map(one, questions, settings.max_workers)
    record = record_header(corpus, Strategy.DIRECT, config.model_id, settings, label,
                     context_limit_tokens=config.context_limit_tokens,
                     chunk_count=len(chunks),
                     chunks=[{"chunk_ref": i, "token_estimate": c.token_estimate,
                              "source_doc_indices": list(c.source_doc_indices)} for i, c in enumerate(chunks)])
    record["questions"] = [r for r, _ in results if r is not None]
    record["failures"] = [_failure(q, e) for q, (_, e) in zip(questions, results) if e is not None]
    return record


def fit_synthesis_prompt(question_open, answers, config: GenerationConfig):
    """Drop the lowest-ranked answers until the synthesis prompt fits the context window."""
    answers = list(answers)
    prompt = build_synthesis_prompt(question_open, answers)
    while len(answers) > 1 and (estimate_tokens(prompt) + config.max_response_tokens
                                > config.context_limit_tokens):
        answers.pop()
        prompt = build_synthesis_prompt(question_open, answers)
    return answers, prompt


def _synthesize(generator, config, prompt):
    response = generator.generate(config, prompt)
    try:
        return response, parse_verdict(response)
    except UnparseableVerdict:
        logger.info("re-asking after unparseable verdict")
    response = generator.generate(config, prompt)
    return response, parse_verdict(response)


def assess_retrieval(corpus: PlatformCorpus, generator: TextGenerator, embedder: Embedder,
                     config: GenerationConfig, settings: AuditSettings = AuditSettings(),
                     questions=None, label=None, embedding_model_id: str = "mock") -> dict:
    """Retrieval + synthesis + DoX strategy over every applicable question."""
    questions = questions if questions is not None else questions_for(corpus.platform_type)
    paragraphs = corpus.paragraphs()
    documents = corpus.documents
    archetypes = load_archetypes(aspect=settings.aspect)
    vectors = embedder.embed([p.text for p in paragraphs]) if paragraphs else None

    def one(q):
        answers = retrieve_top_k(q.open_text, paragraphs, embedder, settings.k, vectors)
        answers, prompt = fit_synthesis_prompt(q.open_text, answers, config)
        response, parsed = _synthesize(generator, config, prompt)
        parsed, invalid = validate_citations(parsed, len(answers))
        if parsed.verdict is Verdict.CANNOT_ANSWER:
            support = []
            dox = DoxResult({a: 0.0 for a in archetypes.archetypes}, 0.0)
        else:
            support = [answers[r] for r in parsed.cited_paragraph_ranks] or answers
            dox = dox_score(parsed.text, None, embedder, settings.theta, archetypes)
        return {
            "question_id": q.id,
            "question": q.closed_text,
            "open_question": q.open_text,
            "top_k": [{"rank": a.rank, "doc_url": documents[a.paragraph.doc_index].url,
                       "doc_index": a.paragraph.doc_index, "paragraph_index": a.paragraph.para_index,
                       "pertinence": a.pertinence} for a in answers],
            "prompt_hash": prompt_hash(prompt),
            "raw_response": response,
            "verdict": parsed.verdict.value,
            "binary": binary_of_verdict(parsed.verdict).value,
            "cited_ranks": list(parsed.cited_paragraph_ranks),
            "invalid_citations": invalid,
            "dox": {"per_archetype": dox.per_archetype, "dox": dox.dox},
            "max_pertinence": max((a.pertinence for a in support), default=0.0),
            "explanatory_relevance": explanatory_relevance(dox.dox, support),
        }

    results = _ordered_map(one, questions, settings.max_workers)
    record = record_header(corpus, Strategy.RETRIEVAL_DOX, config.model_id, settings, label,
                     embedding_model_id=embedding_model_id, theta=settings.theta, k=settings.k,
                     aspect=archetypes.aspect, paragraph_count=len(paragraphs))
    record["questions"] = [r for r, _ in results if r is not None]
    record["failures"] = [_failure(q, e) for q, (_, e) in zip(questions, results) if e is not None]
    return record


def dump_record(record: dict) -> str:
    return json.dumps(record, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_record(record: dict, out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / record_filename(record["platform_name"], Strategy(record["strategy"]))
    path.write_text(dump_record(record), encoding="utf-8")
    return path


def load_record(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def record_paths(paths) -> list[Path]:
    """Expand directories into their ``*__*.json`` record files, keeping order."""
    out = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            out.extend(sorted(p.glob("*__*.json")))
        else:
            out.append(p)
    return out
