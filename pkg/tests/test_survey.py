import statistics

import pytest

from p2baudit.evaluation import (
    ParticipantRating,
    compare_platforms,
    duration_filtered_means,
    load_participant_ratings,
    threshold_sweep,
)

from conftest import LABELS


def ratings(rows):
    return [ParticipantRating(f"p{i}", plat, q, a, m) for i, (plat, q, a, m) in enumerate(rows)]


SMALL = ratings([("Booking", "Q3", 4, 1.0), ("Booking", "Q3", 2, 6.0), ("Booking", "Q3", 3, 7.5),
                 ("Tripadvisor", "Q3", 5, 0.5), ("Tripadvisor", "Q3", 4, 9.0)])


def test_cells_use_sample_std():
    cells = duration_filtered_means(SMALL)
    assert cells[("Booking", "Q3")].mean == 3
    assert cells[("Booking", "Q3")].std == pytest.approx(1.0)
    assert cells[("Tripadvisor", "Q3")].n == 2


def test_filter_is_inclusive():
    cells = duration_filtered_means(SMALL, 6.0)
    assert cells[("Booking", "Q3")].n == 2
    assert cells[("Tripadvisor", "Q3")].n == 1 and cells[("Tripadvisor", "Q3")].std is None


def test_threshold_above_every_duration_empties_all_cells():
    cells = duration_filtered_means(SMALL, 100)
    assert set(cells) == {("Booking", "Q3"), ("Tripadvisor", "Q3")}
    assert all(c.n == 0 and c.mean is None for c in cells.values())


def test_fixture_examples():
    cells = duration_filtered_means(load_participant_ratings(LABELS / "participant_ratings.csv"))
    assert abs(cells[("Booking", "Q3")].mean - 3.56) <= 0.005
    assert abs(cells[("Booking", "Q3")].std - 0.95) <= 0.005
    assert abs(cells[("Tripadvisor", "Q16")].mean - 2.91) <= 0.005
    assert abs(cells[("Tripadvisor", "Q16")].std - 1.24) <= 0.005


def test_comparison_direction_follows_means():
    c = compare_platforms(SMALL, "Q3", "Tripadvisor", "Booking")
    assert c.alternative == "greater"
    assert c.mean_first == statistics.fmean([5, 4])
    assert compare_platforms(SMALL, "Q3", "Booking", "Tripadvisor").alternative == "less"
    assert compare_platforms(SMALL, "Q3", "Tripadvisor", "Booking", min_minutes=50) is None


def test_sweep_shrinks_samples_as_threshold_rises():
    rs = load_participant_ratings(LABELS / "participant_ratings.csv")
    rows = threshold_sweep(rs)
    by_q = {}
    for r in rows:
        by_q.setdefault(r.question_id, []).append((r.min_minutes, r.n_first))
    for seq in by_q.values():
        ns = [n for _, n in sorted(seq)]
        assert ns == sorted(ns, reverse=True)
    assert {r.n_first for r in rows if r.min_minutes == 5} == {55}
    assert {r.n_first for r in rows if r.min_minutes == 0} == {134}
