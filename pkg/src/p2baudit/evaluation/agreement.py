"""Agreement rates between binary answer maps, pooling, and the two baselines."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from ..common import Binary, percent
from ..errors import EmptyList, KeyMismatch

MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class AgreementCount:
    matches: int
    total: int

    @property
    def rate(self) -> Decimal:
        """Percentage with two decimals, rounded half-up."""
        return percent(self.matches, self.total)

    @property
    def fraction(self) -> float:
        return self.matches / self.total


def agreement_rate(tool: dict, truth: dict) -> AgreementCount:
    if set(tool) != set(truth) or not truth:
        raise KeyMismatch("tool and truth cover different questions",
                          only_left=set(tool) - set(truth), only_right=set(truth) - set(tool))
    return AgreementCount(sum(tool[q] == truth[q] for q in truth), len(truth))


def pooled_agreement(per_platform) -> AgreementCount:
    """Sum matches and totals across platforms; rates are never averaged."""
    per_platform = list(per_platform)
    if not per_platform:
        raise EmptyList("nothing to pool")
    return AgreementCount(sum(c.matches for c in per_platform), sum(c.total for c in per_platform))


def always_yes_baseline(questions) -> dict:
    return {_qid(q): Binary.YES for q in questions}


class SplitMix64:
    """SplitMix64 generator (Steele, Lea & Flood), 64-bit state, 64-bit outputs.

    state += 0x9E3779B97F4A7C15
    z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)           (all arithmetic mod 2**64)
    """

    GOLDEN = 0x9E3779B97F4A7C15

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GOLDEN) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_bit(self) -> int:
        """Most significant bit of the next output."""
        return self.next_u64() >> 63


def random_baseline(questions, seed: int) -> dict:
    """One SplitMix64 bit per question, in the given order; bit 1 means Yes."""
    rng = SplitMix64(seed)
    return {_qid(q): Binary.YES if rng.next_bit() else Binary.NO for q in questions}


def _qid(q):
    return q if isinstance(q, str) else q.id
