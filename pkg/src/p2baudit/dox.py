"""Degree of explainability (DoX) of an answer, and explanatory relevance.

An answer explains an aspect well when its sentences answer many archetypal
questions about it (why, what, how, ...). Each archetype question is embedded,
every sentence of the answer is scored against it, and the per-sentence
pertinences are merged with a thresholded noisy-or::

    p_hat_i = max(0, p_i - theta) / (1 - theta)
    answerability = 1 - prod(1 - p_hat_i)

DoX is the mean answerability over archetypes. Sentences at or below
``theta`` contribute nothing, and adding a sentence can only raise the score.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import BadThreshold
from .providers import Embedder
from .retrieval import pertinence_matrix

DEFAULT_THETA = 0.55


@dataclass(frozen=True)
class ArchetypeSet:
    aspect: str
    archetypes: tuple[str, ...]
    templates: tuple[str, ...]

    def __post_init__(self):
        if not self.archetypes or len(self.archetypes) != len(self.templates):
            raise ValueError("archetype set needs one template per archetype")

    def questions(self) -> list[str]:
        return [t.format(aspect=self.aspect) for t in self.templates]

    def with_aspect(self, aspect: str) -> "ArchetypeSet":
        return ArchetypeSet(aspect, self.archetypes, self.templates)


@dataclass(frozen=True)
class DoxResult:
    per_archetype: dict
    dox: float


def _parse_archetypes(data, aspect=None) -> ArchetypeSet:
    names = tuple(a["archetype"] for a in data["archetypes"])
    templates = tuple(a["template"] for a in data["archetypes"])
    return ArchetypeSet(aspect or data["default_aspect"], names, templates)


@lru_cache(maxsize=1)
def _bundled():
    return json.loads(resources.files("p2baudit").joinpath("data/archetypes.json").read_text(encoding="utf-8"))


def load_archetypes(path=None, aspect: str | None = None) -> ArchetypeSet:
    data = _bundled() if path is None else json.loads(Path(path).read_text(encoding="utf-8"))
    return _parse_archetypes(data, aspect)


def sentence_split(text: str) -> list[str]:
    """Split at ``.``, ``!`` or ``?`` followed by whitespace and a capital, or by end of text.

    Punctuation inside parentheses never ends a sentence.
    """
    sentences = []
    depth = 0
    start = 0
    n = len(text)
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        elif ch in ".!?" and depth == 0:
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            if j == n or (j > i + 1 and text[j].isupper()):
                piece = text[start:i + 1].strip()
                if piece:
                    sentences.append(piece)
                start = j
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _check_theta(theta):
    if not 0 <= theta < 1:
        raise BadThreshold(f"theta must be in [0, 1), got {theta}")


def archetype_answerability(pertinences, theta: float = DEFAULT_THETA) -> float:
    _check_theta(theta)
    miss = 1.0
    for p in pertinences:
        if not 0 <= p <= 1:
            raise ValueError(f"pertinence {p} outside [0, 1]")
        miss *= 1.0 - max(0.0, p - theta) / (1.0 - theta)
    return 1.0 - miss


def dox_from_pertinences(matrix: np.ndarray, theta: float = DEFAULT_THETA) -> np.ndarray:
    """Per-archetype answerability from an (archetypes x sentences) pertinence matrix."""
    _check_theta(theta)
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.size == 0:
        return np.zeros(matrix.shape[0])
    boosted = np.clip(matrix - theta, 0.0, None) / (1.0 - theta)
    return 1.0 - np.prod(1.0 - boosted, axis=1)


def dox_score(answer_text: str, aspect: str | None, embedder: Embedder, theta: float = DEFAULT_THETA,
              archetypes: ArchetypeSet | None = None) -> DoxResult:
    _check_theta(theta)
    archetypes = archetypes or load_archetypes()
    if aspect is not None:
        if not aspect.strip():
            raise ValueError("aspect must be non-empty")
        archetypes = archetypes.with_aspect(aspect)
    sentences = sentence_split(answer_text)
    if not sentences:
        return DoxResult({a: 0.0 for a in archetypes.archetypes}, 0.0)
    qvecs = embedder.embed(archetypes.questions())
    svecs = embedder.embed(sentences)
    per = dox_from_pertinences(pertinence_matrix(qvecs, svecs), theta)
    per_archetype = {a: float(v) for a, v in zip(archetypes.archetypes, per)}
    return DoxResult(per_archetype, math.fsum(per_archetype.values()) / len(per_archetype))


def explanatory_relevance(dox: float, answers) -> float:
    """DoX times the highest pertinence among ``answers`` (0 when there are none)."""
    if dox < 0:
        raise ValueError("dox must be non-negative")
    if not answers:
        return 0.0
    return dox * max(a.pertinence for a in answers)
