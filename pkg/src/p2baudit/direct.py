"""Direct scoring strategy: chunk the documentation, score every chunk 1-5, keep the max."""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .checklist import ChecklistQuestion, questions_for
from .common import Binary, QuestionAssessment, Strategy
from .corpus import PlatformCorpus
from .errors import AllChunksFailed, BudgetTooSmall, OutOfRangeScore, UnparseableScore
from .providers import GenerationConfig, TextGenerator, estimate_tokens, prompt_hash

DIRECT_TEMPLATE = (
    "Your task is to assess the compliance of this documentation based on the following question. "
    "Conduct a compliance assessment, focusing on both the technical and legal requirements.\n"
    "Your assessment should start with a numerical score from 1 to 5, where 1 indicates the question "
    "is not answered at all and 5 indicates it's perfectly answered. Following the score, provide a "
    "brief explanation highlighting the strengths or weaknesses in addressing the question. Consider "
    "the completeness, clarity, and legal implications in your explanation.\n"
    "For example, your assessment might look like:\n"
    "'Score: 3. Explanation: The question was only partially answered. While the technical aspects "
    "are covered, it lacks legal disclosures.'\n"
    "Question:\n"
    "{question}\n"
    "Documentation:\n"
    "{chunk}"
)

SAFETY_MARGIN_TOKENS = 64
PARAGRAPH_SEP = "\n\n"
SENTENCE_SEP = " "

_PLACEHOLDER = re.compile(r"\{(question|chunk)\}")
_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")
_SCORE = re.compile(r"Score:\s*", re.IGNORECASE)
_INT = re.compile(r"[+-]?\d+")
_EXPLANATION = re.compile(r"Explanation:\s*(.*)", re.IGNORECASE | re.DOTALL)


@dataclass(frozen=True)
class Chunk:
    text: str
    token_estimate: int
    source_doc_indices: tuple[int, ...]
    # (doc_index, para_index) of every paragraph with text in this chunk
    paragraph_refs: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class ChunkScore:
    chunk_ref: int
    score: int
    explanation: str
    prompt_hash: str = ""


@dataclass(frozen=True)
class ChunkFailure:
    chunk_ref: int
    error: str
    response: str
    prompt_hash: str = ""


def build_direct_prompt(question: ChecklistQuestion, chunk: Chunk | str) -> str:
    text = chunk if isinstance(chunk, str) else chunk.text
    values = {"question": question.closed_text, "chunk": text}
    return _PLACEHOLDER.sub(lambda m: values[m.group(1)], DIRECT_TEMPLATE)


def chunk_budget(config: GenerationConfig, questions) -> int:
    longest = max((q.closed_text for q in questions), key=lambda t: len(t.encode("utf-8")), default="")
    overhead = estimate_tokens(DIRECT_TEMPLATE + longest) + SAFETY_MARGIN_TOKENS
    return config.context_limit_tokens - overhead - config.max_response_tokens


def _hard_split(text: str, budget: int) -> list[str]:
    """Cut at the last UTF-8 character boundary at or below ``budget * 4`` bytes."""
    limit = budget * 4
    pieces = []
    while estimate_tokens(text) > budget:
        raw = text.encode("utf-8")[:limit]
        cut = len(raw.decode("utf-8", errors="ignore"))
        pieces.append(text[:cut])
        text = text[cut:]
    if text:
        pieces.append(text)
    return pieces


def _paragraph_units(text: str, budget: int) -> list[str]:
    if estimate_tokens(text) <= budget:
        return [text]
    units = []
    for sentence in _SENTENCE_END.split(text):
        if not sentence:
            continue
        units.extend(_hard_split(sentence, budget))
    return units


def chunk_document(corpus: PlatformCorpus, config: GenerationConfig, questions=None) -> list[Chunk]:
    """Greedily pack retained paragraphs, in document order, into budget-sized chunks.

    Paragraphs are never reordered. A paragraph larger than the budget is split
    at sentence ends, and a sentence larger than the budget at a byte offset.
    """
    if questions is None:
        questions = questions_for(corpus.platform_type)
    budget = chunk_budget(config, questions)
    if budget <= 0:
        raise BudgetTooSmall(f"chunk budget is {budget} tokens")

    chunks: list[Chunk] = []
    parts: list[str] = []
    refs: list[tuple[int, int]] = []

    def flush():
        if parts:
            text = "".join(parts)
            docs = tuple(sorted({d for d, _ in refs}))
            chunks.append(Chunk(text, estimate_tokens(text), docs, tuple(dict.fromkeys(refs))))
            parts.clear()
            refs.clear()

    for para in corpus.paragraphs():
        ref = (para.doc_index, para.para_index)
        for i, unit in enumerate(_paragraph_units(para.text, budget)):
            sep = "" if not parts else (SENTENCE_SEP if i else PARAGRAPH_SEP)
            if parts and estimate_tokens("".join(parts) + sep + unit) > budget:
                flush()
                sep = ""
            parts.append(sep + unit)
            refs.append(ref)
    flush()
    return chunks


def parse_score(response: str, chunk_ref: int = 0) -> ChunkScore:
    m = _SCORE.search(response)
    if m is None:
        raise UnparseableScore(f"no 'Score:' in response: {response[:80]!r}")
    num = _INT.match(response, m.end())
    if num is None:
        raise UnparseableScore(f"'Score:' not followed by an integer: {response[:80]!r}")
    score = int(num.group())
    if not 1 <= score <= 5:
        raise OutOfRangeScore(f"score {score} outside 1-5")
    expl = _EXPLANATION.search(response, num.end())
    explanation = expl.group(1).strip() if expl else response.strip()
    return ChunkScore(chunk_ref, score, explanation)


def normalize_binary(score: int) -> Binary:
    if not isinstance(score, int) or not 1 <= score <= 5:
        raise OutOfRangeScore(f"score {score!r} outside 1-5")
    return Binary.YES if score >= 3 else Binary.NO


def score_chunk(question, chunk, ref, config, generator) -> ChunkScore | ChunkFailure:
    prompt = build_direct_prompt(question, chunk)
    h = prompt_hash(prompt)
    response = ""
    error = None
    for _ in range(2):  # one re-ask on unparseable output
        response = generator.generate(config, prompt)
        try:
            s = parse_score(response, ref)
        except (UnparseableScore, OutOfRangeScore) as exc:
            error = exc
            continue
        return ChunkScore(ref, s.score, s.explanation, h)
    return ChunkFailure(ref, f"{type(error).__name__}: {error}", response, h)


def assess_question_direct(corpus, question, config, generator: TextGenerator, chunks=None,
                           max_workers: int = 1) -> QuestionAssessment:
    if chunks is None:
        chunks = chunk_document(corpus, config)
    jobs = [(question, c, i, config, generator) for i, c in enumerate(chunks)]
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            results = list(pool.map(lambda a: score_chunk(*a), jobs))
    else:
        results = [score_chunk(*a) for a in jobs]
    scores = [r.score for r in results if isinstance(r, ChunkScore)]
    if not scores:
        raise AllChunksFailed(f"{question.id}: no chunk yielded a parseable score")
    best = max(scores)
    return QuestionAssessment(question.id, Strategy.DIRECT, normalize_binary(best),
                              tuple(results), ordinal_score=best)
