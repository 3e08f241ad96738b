"""Deterministic stand-ins for the language model, used by ``--mock`` runs and tests.

The responder recognises the two prompt templates and answers from lexical
overlap between the question and the supplied text, so mock runs produce
plausible, reproducible evidence without any model.
"""

from __future__ import annotations

import re

from .direct import DIRECT_TEMPLATE
from .providers import GenerationConfig, MockGenerator, TokenHashEmbedder, content_tokens
from .retrieval import CANNOT_ANSWER, SYNTHESIS_TEMPLATE

_DIRECT_HEAD = DIRECT_TEMPLATE.split("{", 1)[0]
_SYNTH_HEAD = SYNTHESIS_TEMPLATE.split("{", 1)[0]
_PARA_LINE = re.compile(r"^paragraph (\d+): (.*)$")
_NEGATION = re.compile(r"\b(?:not|never|no longer|cannot)\b", re.IGNORECASE)

SUPPORT_THRESHOLD = 0.5


def overlap(question: str, text: str) -> float:
    """Share of the question's content tokens that occur in ``text``."""
    q = set(content_tokens(question))
    if not q:
        return 0.0
    return len(q & set(content_tokens(text))) / len(q)


def _direct_response(prompt: str) -> str:
    body = prompt[len(_DIRECT_HEAD):]
    question, _, chunk = body.partition("\nDocumentation:\n")
    share = overlap(question, chunk)
    score = min(5, 1 + int(share * 5))
    if score >= 4:
        why = "Most elements of the question are addressed in the documentation."
    elif score == 3:
        why = "The question was only partially answered."
    else:
        why = "The documentation does not address the question."
    return f"Score: {score}. Explanation: {why} Term coverage {share:.2f}."


def _first_sentence(text: str) -> str:
    sentence = re.split(r"(?<=[.!?])\s+", text.strip(), maxsplit=1)[0]
    return sentence.rstrip(".!?")


def _synthesis_response(prompt: str) -> str:
    body = prompt[len(_SYNTH_HEAD):]
    question, _, contents = body.partition("\nParagraphs: ")
    paragraphs = []
    for line in contents.split("\n"):
        m = _PARA_LINE.match(line)
        if m:
            paragraphs.append((int(m.group(1)), m.group(2)))
        elif paragraphs:
            rank, text = paragraphs[-1]
            paragraphs[-1] = (rank, text + "\n" + line)
    scored = sorted(((overlap(question, text), rank, text) for rank, text in paragraphs),
                    key=lambda t: (-t[0], t[1]))
    support = [t for t in scored if t[0] >= SUPPORT_THRESHOLD][:3]
    if not support:
        return CANNOT_ANSWER
    lead = "No" if _NEGATION.search(support[0][2]) else "Yes"
    parts = [f"{_first_sentence(text)} (paragraph {rank})" for _, rank, text in support]
    return f"{lead}, " + "; ".join(parts) + "."


def mock_responder(config: GenerationConfig, prompt: str) -> str:
    if prompt.startswith(_DIRECT_HEAD):
        return _direct_response(prompt)
    if prompt.startswith(_SYNTH_HEAD):
        return _synthesis_response(prompt)
    return "N/A"


def mock_generator(concurrency_cap: int = 4) -> MockGenerator:
    return MockGenerator(responder=mock_responder, concurrency_cap=concurrency_cap)


def mock_embedder() -> TokenHashEmbedder:
    return TokenHashEmbedder()
