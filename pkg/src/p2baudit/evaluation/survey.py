"""Participant survey summaries: per-cell means filtered by reading time, platform comparisons."""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from .stats import Alternative, common_language_effect_size, mann_whitney_u, rank_biserial

DEFAULT_THRESHOLDS = (5, 4, 3, 2, 1, 0)


@dataclass(frozen=True)
class CellSummary:
    n: int
    mean: float | None = None
    std: float | None = None


def duration_filtered_means(ratings, min_minutes: float = 0.0) -> dict:
    """Mean and sample std (n - 1) of agreement per (platform, question_id).

    Only ratings with ``read_minutes >= min_minutes`` count. Every cell present
    in the unfiltered input is reported, with ``n == 0`` when nothing survives.
    """
    if min_minutes < 0:
        raise ValueError("min_minutes must be >= 0")
    ratings = list(ratings)
    cells: dict = {}
    for r in ratings:
        cells.setdefault((r.platform, r.question_id), [])
    for r in ratings:
        if r.read_minutes >= min_minutes:
            cells[(r.platform, r.question_id)].append(r.agreement)
    out = {}
    for key in sorted(cells):
        values = cells[key]
        if not values:
            out[key] = CellSummary(0)
        else:
            std = statistics.stdev(values) if len(values) > 1 else None
            out[key] = CellSummary(len(values), statistics.fmean(values), std)
    return out


@dataclass(frozen=True)
class PlatformComparison:
    question_id: str
    min_minutes: float
    first: str
    second: str
    n_first: int
    n_second: int
    mean_first: float
    mean_second: float
    alternative: str
    u: float
    p_value: float
    method: str
    rank_biserial: float
    cles: float


def compare_platforms(ratings, question_id, first, second, min_minutes=0.0):
    """One-sided MWU of ``first`` against ``second``, in the direction of the observed means."""
    xs = [r.agreement for r in ratings
          if r.platform == first and r.question_id == question_id and r.read_minutes >= min_minutes]
    ys = [r.agreement for r in ratings
          if r.platform == second and r.question_id == question_id and r.read_minutes >= min_minutes]
    if not xs or not ys:
        return None
    mx, my = statistics.fmean(xs), statistics.fmean(ys)
    alt = Alternative.GREATER if mx >= my else Alternative.LESS
    res = mann_whitney_u(xs, ys, alt)
    return PlatformComparison(question_id, min_minutes, first, second, len(xs), len(ys), mx, my,
                              alt.value, res.u_statistic, res.p_value, res.method.value,
                              rank_biserial(res.u_statistic, len(xs), len(ys)),
                              common_language_effect_size(xs, ys))


def threshold_sweep(ratings, first="Tripadvisor", second="Booking", thresholds=DEFAULT_THRESHOLDS):
    """Platform comparisons for every survey question at each reading-time threshold."""
    ratings = list(ratings)
    questions = sorted({r.question_id for r in ratings}, key=lambda q: int(q[1:].split("-")[0]))
    rows = []
    for t in thresholds:
        for q in questions:
            cmp = compare_platforms(ratings, q, first, second, t)
            if cmp is not None:
                rows.append(cmp)
    return rows
