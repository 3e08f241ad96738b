"""Human label fixtures: expert 1-5 ratings and survey participant ratings (CSV)."""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path

from ..common import Binary
from ..direct import normalize_binary
from ..errors import EvenLabelCount, MalformedManifest, MissingFile, OutOfRangeScore

EXPERT_FIELDS = ("expert_id", "platform", "question_id", "score")
PARTICIPANT_FIELDS = ("participant_id", "platform", "question_id", "agreement", "read_minutes")
SURVEY_PLATFORMS = ("Booking", "Tripadvisor")
SURVEY_QUESTIONS = ("Q3", "Q4", "Q15", "Q16")


@dataclass(frozen=True)
class ExpertLabel:
    expert_id: str
    platform: str
    question_id: str
    score: int

    def __post_init__(self):
        if not 1 <= self.score <= 5:
            raise OutOfRangeScore(f"expert score {self.score} outside 1-5")


@dataclass(frozen=True)
class ParticipantRating:
    participant_id: str
    platform: str
    question_id: str
    agreement: int
    read_minutes: float

    def __post_init__(self):
        if not 1 <= self.agreement <= 5:
            raise OutOfRangeScore(f"agreement {self.agreement} outside 1-5")
        if self.read_minutes < 0:
            raise ValueError("read_minutes must be non-negative")


def _read_rows(path, fields):
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"label file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:  # zero-byte file: no labels at all
            return []
        missing = set(fields) - set(reader.fieldnames or ())
        if missing:
            raise MalformedManifest(f"{path}: missing columns {sorted(missing)}")
        return list(reader)


def load_expert_labels(path) -> list[ExpertLabel]:
    return [ExpertLabel(r["expert_id"], r["platform"], r["question_id"], int(r["score"]))
            for r in _read_rows(path, EXPERT_FIELDS)]


def load_participant_ratings(path) -> list[ParticipantRating]:
    return [ParticipantRating(r["participant_id"], r["platform"], r["question_id"],
                              int(r["agreement"]), float(r["read_minutes"]))
            for r in _read_rows(path, PARTICIPANT_FIELDS)]


def write_expert_labels(path, labels) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EXPERT_FIELDS)
        for lab in labels:
            w.writerow([lab.expert_id, lab.platform, lab.question_id, lab.score])


def write_participant_ratings(path, ratings) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PARTICIPANT_FIELDS)
        for r in ratings:
            w.writerow([r.participant_id, r.platform, r.question_id, r.agreement, f"{r.read_minutes:g}"])


def majority_label(labels) -> Binary:
    """Binarize each score (>= 3 is Yes) and take the majority."""
    labels = list(labels)
    if len(labels) % 2 == 0:
        raise EvenLabelCount(f"need an odd number of labels, got {len(labels)}")
    votes = Counter(normalize_binary(lab.score if isinstance(lab, ExpertLabel) else lab) for lab in labels)
    return Binary.YES if votes[Binary.YES] > votes[Binary.NO] else Binary.NO


def majority_labels(labels) -> dict[str, dict[str, Binary]]:
    """Majority label per platform and question: ``{platform: {question_id: Binary}}``."""
    groups = defaultdict(list)
    for lab in labels:
        groups[(lab.platform, lab.question_id)].append(lab)
    out: dict[str, dict[str, Binary]] = defaultdict(dict)
    for (platform, qid), group in groups.items():
        out[platform][qid] = majority_label(group)
    return dict(out)
