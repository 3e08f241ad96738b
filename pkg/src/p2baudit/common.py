"""Small value types shared across strategies and the evaluation harness."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Any


class Binary(str, enum.Enum):
    YES = "Yes"
    NO = "No"

    @property
    def rank(self) -> int:
        return 1 if self is Binary.YES else 0


class Strategy(str, enum.Enum):
    DIRECT = "direct"
    RETRIEVAL_DOX = "dox"


@dataclass(frozen=True)
class QuestionAssessment:
    question_id: str
    strategy: Strategy
    binary: Binary
    evidence: tuple[Any, ...] = ()
    ordinal_score: int | None = None
    explanatory_relevance: float | None = None

    def __post_init__(self):
        if self.strategy is Strategy.DIRECT and self.ordinal_score is None:
            raise ValueError("direct assessments carry an ordinal score")
        if self.strategy is Strategy.RETRIEVAL_DOX and self.explanatory_relevance is None:
            raise ValueError("retrieval assessments carry an explanatory relevance")


def round_half_up(value, places: int = 2) -> Decimal:
    """Decimal rounding with ties away from zero, as printed in reports."""
    if not isinstance(value, Decimal):
        value = Decimal(str(value)) if isinstance(value, float) else Decimal(value)
    return value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)


def percent(matches: int, total: int) -> Decimal:
    """``matches/total`` as a percentage with two decimals, half-up."""
    if total <= 0:
        raise ValueError("total must be positive")
    return round_half_up(Decimal(100 * matches) / Decimal(total))
