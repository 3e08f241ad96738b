"""Ranking-transparency checklist: closed (yes/no) and open (direct) question forms.

The bank ships as ``data/questions.json``. Each record carries the closed
question, its open rephrasing used for answer retrieval, the platform types it
applies to, and the legal provision it was drawn from. ``open_text_origin`` is
``"original"`` for the one open form taken verbatim from the source checklist and ``"derived"`` for
forms produced by the two-step conversion (find the key element the closed
question asks about, then ask for it directly).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .corpus import PlatformType
from .errors import UnknownQuestion

_TYPE_KEYS = {"intermediation": PlatformType.INTERMEDIATION, "search_engine": PlatformType.SEARCH_ENGINE}


@dataclass(frozen=True)
class ChecklistQuestion:
    id: str
    closed_text: str
    open_text: str
    applies_to: frozenset
    legal_source: str
    in_survey_subset: bool = False
    open_text_origin: str = "derived"

    def applies(self, ptype: PlatformType) -> bool:
        return ptype in self.applies_to

    @property
    def number(self) -> int:
        """Numeric position in the checklist (``"Q4-SE"`` -> 4)."""
        return int(self.id[1:].split("-")[0])


def _parse(records) -> tuple[ChecklistQuestion, ...]:
    bank = []
    for rec in records:
        q = ChecklistQuestion(
            id=rec["id"],
            closed_text=rec["closed_text"],
            open_text=rec["open_text"],
            applies_to=frozenset(_TYPE_KEYS[t] for t in rec["applies_to"]),
            legal_source=rec["legal_source"],
            in_survey_subset=bool(rec.get("in_survey_subset", False)),
            open_text_origin=rec.get("open_text_origin", "derived"),
        )
        if not q.closed_text or not q.open_text or not q.legal_source:
            raise ValueError(f"question {q.id} has an empty field")
        if q.open_text.startswith("Does the documentation"):
            raise ValueError(f"question {q.id} open form still uses the closed frame")
        if any(b.id == q.id for b in bank):
            raise ValueError(f"duplicate question id {q.id}")
        bank.append(q)
    return tuple(bank)


def load_bank(path=None) -> tuple[ChecklistQuestion, ...]:
    """Load a question bank; ``None`` loads the bundled one."""
    if path is None:
        return default_bank()
    return _parse(json.loads(Path(path).read_text(encoding="utf-8")))


@lru_cache(maxsize=1)
def default_bank() -> tuple[ChecklistQuestion, ...]:
    text = resources.files("p2baudit").joinpath("data/questions.json").read_text(encoding="utf-8")
    return _parse(json.loads(text))


def questions_for(ptype: PlatformType, bank=None) -> list[ChecklistQuestion]:
    """Questions applicable to a platform type, ordered by checklist number."""
    bank = default_bank() if bank is None else bank
    selected = [q for q in bank if q.applies(ptype)]
    return sorted(selected, key=lambda q: q.number)


def get_question(qid: str, bank=None) -> ChecklistQuestion:
    bank = default_bank() if bank is None else bank
    for q in bank:
        if q.id == qid:
            return q
    raise UnknownQuestion(qid)


def open_form(q: ChecklistQuestion, bank=None) -> str:
    bank = default_bank() if bank is None else bank
    if q not in bank:
        raise UnknownQuestion(q.id)
    return q.open_text
