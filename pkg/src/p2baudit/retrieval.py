"""Answer retrieval over documentation paragraphs and verdict synthesis."""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass

import numpy as np

from .common import Binary
from .corpus import Paragraph, PlatformCorpus
from .errors import DimensionMismatch, EmptyAnswerList, NoParagraphs, UnparseableVerdict
from .providers import Embedder

logger = logging.getLogger(__name__)

DEFAULT_TOP_K = 20

SYNTHESIS_TEMPLATE = (
    "Output a comprehensive answer based only and exclusively on the information within the "
    "paragraphs below (if any can be used to answer) which were extracted from the documentation "
    "to be assessed. If no paragraph can answer the question, then output only \"No, I cannot "
    "answer\". Otherwise, the comprehensive answer must contain citations to the source paragraphs, "
    "e.g., blablabla (paragraphs 1 and 2), blabla (paragraph 0). It should also start with \"Yes\" if "
    "the answer is positive, \"No\" if the answer is negative, or \"N/A\" if the answer is not "
    "available.\n"
    "Question: {question}\n"
    "Paragraphs: {contents}"
)

CANNOT_ANSWER = "No, I cannot answer"

_PLACEHOLDER = re.compile(r"\{(question|contents)\}")
_LEADING = re.compile(r"(yes|n/a|no)\b", re.IGNORECASE)
_CITATION = re.compile(r"\(\s*paragraphs?\s+(\d+(?:\s*(?:,|and|,\s*and)\s*\d+)*)\s*\)", re.IGNORECASE)
_DIGITS = re.compile(r"\d+")


class Verdict(str, enum.Enum):
    YES = "Yes"
    NO = "No"
    NA = "N/A"
    CANNOT_ANSWER = "CannotAnswer"


@dataclass(frozen=True)
class RetrievedAnswer:
    paragraph: Paragraph
    pertinence: float
    rank: int


@dataclass(frozen=True)
class SynthesizedAnswer:
    verdict: Verdict
    text: str
    cited_paragraph_ranks: tuple[int, ...] = ()


def pertinence_score(q, p) -> float:
    """Cosine similarity of two unit vectors mapped affinely onto [0, 1]."""
    q = np.asarray(q, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if q.shape != p.shape:
        raise DimensionMismatch(f"{q.shape} vs {p.shape}")
    return float(min(1.0, max(0.0, (float(q @ p) + 1.0) / 2.0)))


def pertinence_matrix(queries: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Pairwise pertinence, rows = queries, columns = targets."""
    if queries.shape[1] != targets.shape[1]:
        raise DimensionMismatch(f"{queries.shape} vs {targets.shape}")
    return np.clip((queries @ targets.T + 1.0) / 2.0, 0.0, 1.0)


def rank_paragraphs(paragraphs, pertinences, k: int = DEFAULT_TOP_K) -> list[RetrievedAnswer]:
    """Order by pertinence descending, then (doc_index, para_index) ascending."""
    order = sorted(range(len(paragraphs)),
                   key=lambda i: (-pertinences[i], paragraphs[i].doc_index, paragraphs[i].para_index))
    return [RetrievedAnswer(paragraphs[i], float(pertinences[i]), rank)
            for rank, i in enumerate(order[:k])]


def retrieve_top_k(question_open: str, corpus: PlatformCorpus | list[Paragraph], embedder: Embedder,
                   k: int = DEFAULT_TOP_K, paragraph_vectors: np.ndarray | None = None) -> list[RetrievedAnswer]:
    """Top ``k`` paragraphs for an open question.

    ``corpus`` may be a corpus or an already segmented paragraph list; callers
    retrieving many questions over one corpus can pass precomputed
    ``paragraph_vectors`` to avoid re-embedding.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    paragraphs = corpus.paragraphs() if isinstance(corpus, PlatformCorpus) else list(corpus)
    if not paragraphs:
        raise NoParagraphs("corpus has no retained paragraphs")
    if paragraph_vectors is None:
        paragraph_vectors = embedder.embed([p.text for p in paragraphs])
    qvec = embedder.embed([question_open])
    scores = pertinence_matrix(qvec, paragraph_vectors)[0]
    return rank_paragraphs(paragraphs, scores, k)


def format_contents(answers) -> str:
    return "\n".join(f"paragraph {a.rank}: {a.paragraph.text}" for a in sorted(answers, key=lambda a: a.rank))


def build_synthesis_prompt(question_open: str, answers) -> str:
    if not answers:
        raise EmptyAnswerList("synthesis needs at least one retrieved answer")
    values = {"question": question_open, "contents": format_contents(answers)}
    return _PLACEHOLDER.sub(lambda m: values[m.group(1)], SYNTHESIS_TEMPLATE)


def extract_citations(text: str) -> tuple[int, ...]:
    ranks = set()
    for m in _CITATION.finditer(text):
        ranks.update(int(d) for d in _DIGITS.findall(m.group(1)))
    return tuple(sorted(ranks))


def parse_verdict(response: str) -> SynthesizedAnswer:
    text = response.strip()
    if text.lower().startswith(CANNOT_ANSWER.lower()):
        return SynthesizedAnswer(Verdict.CANNOT_ANSWER, text, ())
    m = _LEADING.match(text)
    if m is None:
        raise UnparseableVerdict(f"no leading Yes/No/N/A in {text[:80]!r}")
    verdict = {"yes": Verdict.YES, "no": Verdict.NO, "n/a": Verdict.NA}[m.group(1).lower()]
    return SynthesizedAnswer(verdict, text, extract_citations(text))


def validate_citations(answer: SynthesizedAnswer, n_answers: int) -> tuple[SynthesizedAnswer, list[int]]:
    """Drop cited ranks that were not in the prompt; return the cleaned answer and the dropped ranks."""
    valid = tuple(r for r in answer.cited_paragraph_ranks if 0 <= r < n_answers)
    invalid = [r for r in answer.cited_paragraph_ranks if not 0 <= r < n_answers]
    if invalid:
        logger.warning("answer cites paragraphs %s outside the %d retrieved", invalid, n_answers)
    return SynthesizedAnswer(answer.verdict, answer.text, valid), invalid


def binary_of_verdict(v: Verdict) -> Binary:
    return Binary.YES if v is Verdict.YES else Binary.NO
