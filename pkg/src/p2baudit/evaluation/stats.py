"""Mann-Whitney U with exact and normal-approximation p-values, and effect sizes."""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..errors import EmptySample, OutOfRangeU

EXACT_MAX_N = 12


class Alternative(str, enum.Enum):
    LESS = "less"
    GREATER = "greater"


class Method(str, enum.Enum):
    EXACT = "exact"
    NORMAL = "normal"


@dataclass(frozen=True)
class MwuResult:
    u_statistic: float
    p_value: float
    method: Method
    n1: int
    n2: int


def rankdata(values) -> list[float]:
    """1-based ranks; tied values share the mean of the ranks they span."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        i = j + 1
    return ranks


def u_statistic(a, b) -> float:
    """U of the first sample: pairs with a > b, ties counted as one half."""
    ranks = rankdata(list(a) + list(b))
    n1 = len(a)
    return sum(ranks[:n1]) - n1 * (n1 + 1) / 2


@lru_cache(maxsize=None)
def u_distribution(n1: int, n2: int) -> tuple[int, ...]:
    """Number of orderings of n1 + n2 distinct values giving each U in 0..n1*n2.

    The largest value either belongs to the first sample (beating all n2 of
    the second, so U shifts by n2) or to the second (U unchanged).
    """
    if n1 == 0 or n2 == 0:
        return (1,)
    with_a = u_distribution(n1 - 1, n2)
    with_b = u_distribution(n1, n2 - 1)
    counts = [0] * (n1 * n2 + 1)
    for u, c in enumerate(with_a):
        counts[u + n2] += c
    for u, c in enumerate(with_b):
        counts[u] += c
    return tuple(counts)


def exact_p_value(u: float, n1: int, n2: int, alternative) -> Fraction:
    alternative = Alternative(alternative)
    counts = u_distribution(n1, n2)
    total = math.comb(n1 + n2, n1)
    k = int(round(u))
    if alternative is Alternative.LESS:
        tail = sum(counts[: k + 1])
    else:
        tail = sum(counts[k:])
    return Fraction(tail, total)


def _normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2))


def normal_p_value(u: float, n1: int, n2: int, tie_counts, alternative) -> float:
    alternative = Alternative(alternative)
    n = n1 + n2
    tie_term = sum(t ** 3 - t for t in tie_counts)
    var = n1 * n2 / 12 * ((n + 1) - tie_term / (n * (n - 1))) if n > 1 else 0.0
    if var <= 0:
        return 1.0
    mu = n1 * n2 / 2
    sd = math.sqrt(var)
    if alternative is Alternative.LESS:
        p = _normal_cdf((u + 0.5 - mu) / sd)
    else:
        p = 1.0 - _normal_cdf((u - 0.5 - mu) / sd)
    return min(1.0, max(p, sys.float_info.min))


def mann_whitney_u(a, b, alternative="less") -> MwuResult:
    """One-sided test that ``a`` is stochastically smaller (``less``) or larger than ``b``.

    Exact null distribution when the pooled sample has at most 12 values and no
    ties; otherwise the tie-corrected normal approximation with a 0.5
    continuity correction.
    """
    a, b = list(a), list(b)
    if not a or not b:
        raise EmptySample("both samples must be non-empty")
    n1, n2 = len(a), len(b)
    pooled = a + b
    u = u_statistic(a, b)
    distinct = len(set(pooled))
    if n1 + n2 <= EXACT_MAX_N and distinct == len(pooled):
        p = float(exact_p_value(u, n1, n2, alternative))
        return MwuResult(u, p, Method.EXACT, n1, n2)
    counts = {}
    for v in pooled:
        counts[v] = counts.get(v, 0) + 1
    p = normal_p_value(u, n1, n2, counts.values(), alternative)
    return MwuResult(u, p, Method.NORMAL, n1, n2)


def rank_biserial(u: float, n1: int, n2: int) -> float:
    """r = 1 - 2U/(n1*n2) for the U of the first group."""
    if n1 < 1 or n2 < 1:
        raise EmptySample("group sizes must be positive")
    if not 0 <= u <= n1 * n2:
        raise OutOfRangeU(f"U={u} outside [0, {n1 * n2}]")
    return 1 - 2 * u / (n1 * n2)


def common_language_effect_size(a, b) -> float:
    """Probability that a random draw from ``a`` exceeds one from ``b`` (ties count half)."""
    a, b = list(a), list(b)
    if not a or not b:
        raise EmptySample("both samples must be non-empty")
    wins = 0.0
    for x in a:
        for y in b:
            if x > y:
                wins += 1
            elif x == y:
                wins += 0.5
    return wins / (len(a) * len(b))
